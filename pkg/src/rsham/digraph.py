"""Dense digraph core: bitmask adjacency, generators, and graph file I/O.

Vertices are the integers ``0..n-1``.  Adjacency is stored as one Python int
per vertex (bit ``w`` of ``out_masks[v]`` is set iff the arc ``v -> w`` is
present), so the neighbourhood intersections that dominate absorber counting
and cascade construction are single big-int AND operations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from random import Random
from typing import Iterable, Iterator

from .errors import InfeasibleDegreeError

GRAPH_JSON_FORMAT = "digraph"
GRAPH_JSON_VERSION = 1


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits_list(mask: int) -> list[int]:
    return list(iter_bits(mask))


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def derive_seed(seed: int, step: int) -> int:
    """Deterministic per-stage sub-seed."""
    return (seed * 1_000_003 + step) & 0x7FFFFFFFFFFFFFFF


def frac_target(frac: float, n: int) -> int:
    """Smallest integer >= frac*n, robust to float noise near integers."""
    x = frac * n
    nearest = round(x)
    if abs(x - nearest) < 1e-9:
        return nearest
    return math.ceil(x)


@dataclass(frozen=True)
class Digraph:
    """Immutable digraph on vertices 0..n-1 with bitmask adjacency."""

    n: int
    out_masks: tuple[int, ...]
    in_masks: tuple[int, ...]

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]]) -> "Digraph":
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        out = [0] * n
        inn = [0] * n
        for t, h in arcs:
            if not (0 <= t < n and 0 <= h < n):
                raise ValueError(f"arc ({t},{h}) out of range for n={n}")
            if t == h:
                raise ValueError(f"self-loop at vertex {t}")
            out[t] |= 1 << h
            inn[h] |= 1 << t
        return cls(n, tuple(out), tuple(inn))

    @classmethod
    def complete(cls, n: int) -> "Digraph":
        full = (1 << n) - 1
        return cls(n, tuple(full ^ (1 << v) for v in range(n)),
                   tuple(full ^ (1 << v) for v in range(n)))

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def has_arc(self, u: int, v: int) -> bool:
        return bool(self.out_masks[u] >> v & 1)

    def out_degree(self, v: int) -> int:
        return self.out_masks[v].bit_count()

    def in_degree(self, v: int) -> int:
        return self.in_masks[v].bit_count()

    def arc_count(self) -> int:
        return sum(m.bit_count() for m in self.out_masks)

    def arcs(self) -> Iterator[tuple[int, int]]:
        for t in range(self.n):
            for h in iter_bits(self.out_masks[t]):
                yield (t, h)

    def reverse(self) -> "Digraph":
        return Digraph(self.n, self.in_masks, self.out_masks)

    def restrict(self, allowed: int) -> "Digraph":
        """Induced subdigraph on the bitmask ``allowed``, keeping vertex ids.

        Vertices outside ``allowed`` stay present but become isolated.
        """
        out = tuple(self.out_masks[v] & allowed if allowed >> v & 1 else 0
                    for v in range(self.n))
        inn = tuple(self.in_masks[v] & allowed if allowed >> v & 1 else 0
                    for v in range(self.n))
        return Digraph(self.n, out, inn)

    def active_count(self) -> int:
        """Number of vertices incident to at least one arc."""
        return sum(1 for v in range(self.n)
                   if self.out_masks[v] or self.in_masks[v])


def min_semi_degree(d: Digraph) -> int:
    """min over vertices of min(out-degree, in-degree)."""
    if d.n == 0:
        raise ValueError("semi-degree undefined for the empty digraph")
    return min(min(d.out_masks[v].bit_count(), d.in_masks[v].bit_count())
               for v in range(d.n))


def gen_extremal(k: int) -> Digraph:
    """Digraph on 3k vertices with semi-degree 2k-1 and no k disjoint 3-cycles.

    X = {0..2k-2} spans a complete digraph; every X-vertex sends an arc to
    every Y-vertex (Y = {2k-1..3k-1}) and receives one back; Y is independent.
    """
    if k < 1:
        raise ValueError("k must be positive")
    n = 3 * k
    x_hi = 2 * k - 1
    arcs = []
    for x in range(x_hi):
        for w in range(n):
            if w != x:
                arcs.append((x, w))          # X -> X and X -> Y
    for y in range(x_hi, n):
        for x in range(x_hi):
            arcs.append((y, x))              # Y -> X
    return Digraph.from_arcs(n, arcs)


def gen_random_semidegree(n: int, delta_frac: float, seed: int,
                          margin: float = 0.05) -> Digraph:
    """Seeded random digraph with semi-degree at least ``frac_target(delta_frac, n)``.

    Each ordered pair is included independently with probability
    ``delta_frac + margin``; vertices still short of the target afterwards are
    repaired by adding arcs to/from uniformly chosen non-neighbours.  When
    ``delta_frac == 1`` the target is capped at ``n-1`` and the complete
    digraph is returned.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    if not 0 < delta_frac <= 1:
        raise ValueError("delta_frac must lie in (0, 1]")
    target = frac_target(delta_frac, n)
    if target > n - 1:
        if delta_frac >= 1.0:
            target = n - 1
        else:
            raise InfeasibleDegreeError(
                f"semi-degree {target} unreachable on {n} vertices")
    p = min(1.0, delta_frac + margin)
    rng = Random(seed)
    if p >= 1.0:
        return Digraph.complete(n)

    out = [0] * n
    inn = [0] * n
    for u in range(n):
        row = 0
        for w in range(n):
            if w != u and rng.random() < p:
                row |= 1 << w
        out[u] = row
    for u in range(n):
        for w in iter_bits(out[u]):
            inn[w] |= 1 << u

    full = (1 << n) - 1
    for v in range(n):
        need = target - out[v].bit_count()
        if need > 0:
            candidates = bits_list(full & ~out[v] & ~(1 << v))
            for w in rng.sample(candidates, need):
                out[v] |= 1 << w
                inn[w] |= 1 << v
        need = target - inn[v].bit_count()
        if need > 0:
            candidates = bits_list(full & ~inn[v] & ~(1 << v))
            for u in rng.sample(candidates, need):
                out[u] |= 1 << v
                inn[v] |= 1 << u
    return Digraph(n, tuple(out), tuple(inn))


# ---------------------------------------------------------------------------
# Graph files: plain text ("n m" header then one "tail head" line per arc)
# and a JSON variant carrying the same arcs plus metadata.

def write_graph_text(d: Digraph, path: str | Path) -> None:
    lines = [f"{d.n} {d.arc_count()}"]
    lines.extend(f"{t} {h}" for t, h in d.arcs())
    Path(path).write_text("\n".join(lines) + "\n")


def read_graph_text(path: str | Path) -> Digraph:
    text = Path(path).read_text()
    tokens = text.split()
    if len(tokens) < 2:
        raise ValueError(f"{path}: missing 'n m' header")
    n, m = int(tokens[0]), int(tokens[1])
    if len(tokens) != 2 + 2 * m:
        raise ValueError(f"{path}: expected {m} arcs, found {(len(tokens) - 2) // 2}")
    arcs = [(int(tokens[2 + 2 * i]), int(tokens[3 + 2 * i])) for i in range(m)]
    return Digraph.from_arcs(n, arcs)


def write_graph_json(d: Digraph, path: str | Path,
                     meta: dict | None = None) -> None:
    doc = {
        "format": GRAPH_JSON_FORMAT,
        "version": GRAPH_JSON_VERSION,
        "n": d.n,
        "arcs": [[t, h] for t, h in d.arcs()],
        "meta": meta or {},
    }
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def read_graph_json(path: str | Path) -> tuple[Digraph, dict]:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != GRAPH_JSON_FORMAT:
        raise ValueError(f"{path}: not a digraph document")
    d = Digraph.from_arcs(doc["n"], [tuple(a) for a in doc["arcs"]])
    return d, doc.get("meta", {})


def save_graph(d: Digraph, path: str | Path, meta: dict | None = None) -> None:
    """Write text or JSON format depending on the file suffix."""
    if str(path).endswith(".json"):
        write_graph_json(d, path, meta)
    else:
        write_graph_text(d, path)


def load_graph(path: str | Path) -> Digraph:
    if str(path).endswith(".json"):
        return read_graph_json(path)[0]
    return read_graph_text(path)
