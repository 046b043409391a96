"""Reservoir sampling and routing.

The reservoir is a small vertex pool, disjoint from a protected set W, whose
two-sided degree certificate guarantees every vertex of the digraph keeps
enough in- and out-neighbours inside the pool.  Connector paths are then
routed with their interiors confined to the unused part of the pool.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random

from .connecting import ConnectParams, connect
from .digraph import Digraph, iter_bits, mask_of
from .errors import ReservoirFailure
from .paths import first_end_arc, last_end_arc


def paper_certificate_threshold(size: int, gamma: float) -> int:
    """Asymptotic two-sided degree floor: (2/3 + gamma/2) * (|R| + 4)."""
    return math.ceil((2 / 3 + gamma / 2) * (size + 4))


def desk_certificate_threshold(size: int) -> int:
    """Working-size degree floor: a third of the pool, at least one."""
    return max(1, size // 3)


@dataclass
class Reservoir:
    """Certified vertex pool; ``used`` grows as connectors consume it."""

    verts: int                  # bitmask
    gamma: float
    threshold: int              # degree floor the certificate was checked at
    certified: bool
    retries_used: int
    used: int = 0               # bitmask, subset of verts

    @property
    def size(self) -> int:
        return self.verts.bit_count()

    @property
    def used_count(self) -> int:
        return self.used.bit_count()

    def available(self) -> int:
        return self.verts & ~self.used


def certificate_margin(d: Digraph, rmask: int, threshold: int) -> tuple[int, int]:
    """Worst vertex and its worst-side reservoir degree, over all n vertices."""
    worst_v, worst = 0, 1 << 60
    for x in range(d.n):
        deg = min((d.out_masks[x] & rmask).bit_count(),
                  (d.in_masks[x] & rmask).bit_count())
        if deg < worst:
            worst_v, worst = x, deg
    return worst_v, worst


def sample_reservoir(d: Digraph, protected, size: int, gamma: float, seed: int,
                     retries: int = 3, *, threshold: int | None = None) -> Reservoir:
    """Uniform random pool of ``size`` vertices outside ``protected``, redrawn
    until every vertex of the digraph has at least ``threshold`` in- and
    out-neighbours inside it.

    ``threshold`` defaults to the asymptotic certificate
    ceil((2/3 + gamma/2) * (size + 4)); pass ``desk_certificate_threshold``
    for working-size runs.  Deterministic given the seed; ``retries`` is the
    total number of draws attempted.
    """
    wmask = protected if isinstance(protected, int) else mask_of(protected)
    pool = [v for v in range(d.n) if not wmask >> v & 1]
    if size < 1:
        raise ValueError("reservoir size must be positive")
    if size > len(pool):
        raise ValueError(f"cannot draw {size} vertices from a pool of {len(pool)}")
    thr = threshold if threshold is not None else paper_certificate_threshold(size, gamma)
    rng = Random(seed)
    worst_v, worst = 0, -1
    attempts = max(1, retries)
    for attempt in range(attempts):
        rmask = mask_of(rng.sample(pool, size))
        v, deg = certificate_margin(d, rmask, thr)
        if deg >= thr:
            return Reservoir(rmask, gamma, thr, certified=True, retries_used=attempt)
        if deg > worst:
            worst_v, worst = v, deg
    raise ReservoirFailure(worst_v, worst, thr, attempts)


def reservoir_connect(d: Digraph, r: Reservoir, ab: tuple[int, int],
                      cd: tuple[int, int], p: ConnectParams | None = None, *,
                      forbidden_budget: int | None = None) -> tuple[int, ...]:
    """Connect two disjoint arcs with the interior inside the unused reservoir.

    Marks the interior vertices as used.  Order is capped at
    min(ceil(16/gamma), available + 4).
    """
    p = p or ConnectParams(gamma=r.gamma)
    budget = forbidden_budget if forbidden_budget is not None else r.size
    if r.used_count > budget:
        raise ValueError(
            f"reservoir already has {r.used_count} used vertices, over budget {budget}")
    avail = r.available()
    cap = min(math.ceil(16 / p.gamma), avail.bit_count() + 4)
    if p.order_cap is not None:
        cap = min(cap, p.order_cap)
    local = ConnectParams(
        gamma=p.gamma, order_cap=cap, witness_cap=p.witness_cap, probe=p.probe,
        bf_threshold=p.bf_threshold, bf_budget=p.bf_budget,
        trace_node_cap=p.trace_node_cap)
    ends = (1 << ab[0]) | (1 << ab[1]) | (1 << cd[0]) | (1 << cd[1])
    sub = d.restrict(avail | ends)
    path = connect(sub, ab, cd, local)
    interior = mask_of(path) & ~ends
    if interior & ~avail:
        raise RuntimeError("connector interior escaped the reservoir")
    r.used |= interior
    return path
