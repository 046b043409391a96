"""Greedy cover of a vertex set by few disjoint reverse-square paths.

Paths grow from a random arc, extending at both ends while an extension
vertex exists; fragments of order < 4 dissolve into the leftover (a kept
path needs two disjoint end-arcs for stitching).  If too many paths remain,
pairs are merged through connectors routed inside the leftover.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random

from .connecting import ConnectParams, connect_avoiding
from .digraph import Digraph, bits_list, iter_bits, mask_of
from .errors import ConnectFailure, CoverFailure
from .paths import concat, first_end_arc, last_end_arc, rs_path_violation


@dataclass(frozen=True)
class CoverResult:
    paths: tuple[tuple[int, ...], ...]
    leftover: frozenset[int]

    def covered_mask(self) -> int:
        m = 0
        for p in self.paths:
            m |= mask_of(p)
        return m


def _grow_path(d: Digraph, start_u: int, start_v: int, unused: int,
               rng: Random) -> list[int]:
    """Extend u,v forwards and backwards until both directions are stuck.

    Forward extension by w needs arcs (last -> w) and (w -> second-to-last);
    backward extension mirrors it.  Candidates are taken in seeded-random
    order.
    """
    seq = [start_u, start_v]
    unused &= ~((1 << start_u) | (1 << start_v))
    while True:
        fwd = d.out_masks[seq[-1]] & d.in_masks[seq[-2]] & unused
        if fwd:
            w = rng.choice(bits_list(fwd))
            seq.append(w)
            unused &= ~(1 << w)
            continue
        back = d.in_masks[seq[0]] & d.out_masks[seq[1]] & unused
        if back:
            w = rng.choice(bits_list(back))
            seq.insert(0, w)
            unused &= ~(1 << w)
            continue
        return seq


def greedy_path_cover(d: Digraph, path_budget: int, leftover_budget: int,
                      seed: int, *, vertices: int | None = None,
                      connect_params: ConnectParams | None = None) -> CoverResult:
    """Disjoint reverse-square paths covering the given vertex set.

    Raises CoverFailure (carrying the achieved counts) when the budgets
    cannot be met even after merging.  Deterministic given the seed.
    """
    if path_budget < 0 or leftover_budget < 0:
        raise ValueError("budgets must be nonnegative")
    scope = vertices if vertices is not None else d.full_mask
    rng = Random(seed)
    sub = d.restrict(scope) if vertices is not None else d
    unused = scope
    paths: list[tuple[int, ...]] = []
    leftover = 0

    while True:
        starters = [u for u in iter_bits(unused) if sub.out_masks[u] & unused & ~(1 << u)]
        if not starters:
            break
        u = rng.choice(starters)
        v = rng.choice(bits_list(sub.out_masks[u] & unused & ~(1 << u)))
        seq = _grow_path(sub, u, v, unused, rng)
        if len(seq) >= 4:
            paths.append(tuple(seq))
            unused &= ~mask_of(seq)
        else:
            leftover |= mask_of(seq)
            unused &= ~mask_of(seq)
    leftover |= unused

    if len(paths) > path_budget:
        paths, leftover = _merge_paths(sub, paths, leftover, path_budget,
                                       connect_params or ConnectParams(), scope)

    result = CoverResult(tuple(paths), frozenset(iter_bits(leftover)))
    _audit_cover(d, result, scope)
    if len(result.paths) > path_budget or len(result.leftover) > leftover_budget:
        raise CoverFailure(len(result.paths), path_budget,
                           len(result.leftover), leftover_budget)
    return result


def _merge_paths(sub: Digraph, paths: list[tuple[int, ...]], leftover: int,
                 budget: int, params: ConnectParams, scope: int):
    """Reduce the path count by connecting pairs through leftover vertices."""
    merged = True
    while len(paths) > budget and merged:
        merged = False
        for i in range(len(paths)):
            for j in range(len(paths)):
                if i == j:
                    continue
                forbidden = scope & ~leftover
                try:
                    q = connect_avoiding(sub, last_end_arc(paths[i]),
                                         first_end_arc(paths[j]), forbidden, params)
                except (ConnectFailure, ValueError):
                    continue
                joined = concat(concat(paths[i], q), paths[j])
                interior = mask_of(q) & leftover
                leftover &= ~interior
                keep = [paths[k] for k in range(len(paths)) if k not in (i, j)]
                keep.append(joined)
                paths = keep
                merged = True
                break
            if merged:
                break
    return paths, leftover


def _audit_cover(d: Digraph, result: CoverResult, scope: int) -> None:
    seen = 0
    for p in result.paths:
        if len(p) < 4:
            raise RuntimeError(f"cover kept a path of order {len(p)}")
        violation = rs_path_violation(d, p)
        if violation is not None:
            raise RuntimeError(f"cover path {p} missing arc {violation}")
        pm = mask_of(p)
        if pm & seen:
            raise RuntimeError("cover paths overlap")
        seen |= pm
    lm = mask_of(result.leftover)
    if lm & seen:
        raise RuntimeError("leftover intersects a cover path")
    if (seen | lm) != scope:
        raise RuntimeError("cover does not partition the vertex set")
