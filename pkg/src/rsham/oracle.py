"""Exact reference searches for small instances.

These are the ground-truth implementations the rest of the library is tested
against.  They never guess: every search distinguishes a definite absence
(state space exhausted) from running out of budget.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations

from .digraph import Digraph, iter_bits
from .paths import is_absorber, is_rs_cycle, is_rs_path

FOUND = "found"
ABSENT = "absent"
EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int = 20_000_000
    time_cap: float = 120.0

    def __post_init__(self):
        if self.max_nodes <= 0 or self.time_cap <= 0:
            raise ValueError("budget fields must be positive")


@dataclass(frozen=True)
class SearchResult:
    status: str                      # FOUND | ABSENT | EXHAUSTED
    witness: tuple | None = None
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.status == FOUND


class _Budget:
    """Mutable node/time counter shared across a recursion."""

    __slots__ = ("max_nodes", "deadline", "nodes", "hit")

    def __init__(self, budget: SearchBudget):
        self.max_nodes = budget.max_nodes
        self.deadline = time.monotonic() + budget.time_cap
        self.nodes = 0
        self.hit = False

    def tick(self) -> bool:
        """Count one search node; True while within budget."""
        self.nodes += 1
        if self.nodes >= self.max_nodes:
            self.hit = True
        elif self.nodes % 4096 == 0 and time.monotonic() > self.deadline:
            self.hit = True
        return not self.hit


def bf_rs_hamiltonian_cycle(d: Digraph, budget: SearchBudget | None = None) -> SearchResult:
    """Depth-first search for a reverse-square Hamiltonian cycle.

    Orderings start at vertex 0 (rotations are equivalent).  A partial
    ordering ``..x,y`` extends by ``w`` only if ``y->w`` and ``w->x`` are
    arcs; closing checks the three wrap-around arcs.  Intended for n <= 14.
    """
    if d.n < 3:
        raise ValueError("need n >= 3")
    b = _Budget(budget or SearchBudget())
    n = d.n
    out, inn = d.out_masks, d.in_masks
    path = [0]
    full = d.full_mask

    def extend(used: int) -> tuple | None:
        if not b.tick():
            return None
        j = len(path)
        if j == n:
            y, x = path[-1], path[-2]
            if d.has_arc(y, 0) and d.has_arc(0, x) and d.has_arc(path[1], y):
                return tuple(path)
            return None
        if j == 1:
            cands = out[0] & ~used
        else:
            cands = out[path[-1]] & inn[path[-2]] & ~used
        for w in iter_bits(cands):
            path.append(w)
            got = extend(used | 1 << w)
            path.pop()
            if got is not None:
                return got
            if b.hit:
                return None
        return None

    witness = extend(1)
    if witness is not None:
        return SearchResult(FOUND, witness, b.nodes)
    return SearchResult(EXHAUSTED if b.hit else ABSENT, None, b.nodes)


def bf_count_absorbers(d: Digraph, v: int) -> int:
    """Exact number of ordered 4-tuples (a,b,c,d) that absorb ``v``.

    Scans every (b,c) pair admissible for ``v`` and counts the compatible
    (a,d) completions with bitmask intersections; the only coincidence to
    correct for is a = d.
    """
    if not 0 <= v < d.n:
        raise ValueError(f"vertex {v} out of range")
    out, inn = d.out_masks, d.in_masks
    total = 0
    for b in iter_bits(inn[v]):
        for c in iter_bits(out[b] & inn[b] & out[v]):
            a_mask = inn[b] & out[c] & out[v]
            d_mask = out[c] & inn[b] & inn[v]
            total += a_mask.bit_count() * d_mask.bit_count() - (a_mask & d_mask).bit_count()
    return total


def bf_connect(d: Digraph, ab: tuple[int, int], cd: tuple[int, int],
               max_order: int, budget: SearchBudget | None = None) -> SearchResult:
    """Shortest reverse-square path from end-arc ``ab`` to end-arc ``cd``.

    Breadth-first search over states keyed by the last two vertices plus the
    used-vertex set (extension legality depends on exactly that window).
    Exact for small active vertex counts.
    """
    a, b = ab
    c, dd = cd
    if not d.has_arc(a, b) or not d.has_arc(c, dd):
        raise ValueError("end-arcs must be arcs of the digraph")
    if len({a, b, c, dd}) != 4:
        raise ValueError("end-arcs must be vertex-disjoint")
    bud = _Budget(budget or SearchBudget())
    out, inn = d.out_masks, d.in_masks
    frontier: list[tuple[tuple[int, ...], int]] = [((a, b), (1 << a) | (1 << b))]
    seen = {(a, b, frontier[0][1])}
    while frontier:
        nxt: list[tuple[tuple[int, ...], int]] = []
        for path, used in frontier:
            if not bud.tick():
                return SearchResult(EXHAUSTED, None, bud.nodes)
            x, y = path[-2], path[-1]
            if (x, y) == (c, dd):
                return SearchResult(FOUND, path, bud.nodes)
            if len(path) >= max_order:
                continue
            cands = out[y] & inn[x] & ~used
            for w in iter_bits(cands):
                if w == dd and y != c:
                    continue
                key = (y, w, used | 1 << w)
                if key in seen:
                    continue
                seen.add(key)
                nxt.append((path + (w,), used | 1 << w))
        frontier = nxt
    return SearchResult(ABSENT, None, bud.nodes)


def directed_triangles(d: Digraph) -> list[tuple[int, int, int]]:
    """All vertex triples spanning a directed 3-cycle, each listed once."""
    tris = []
    for u, v, w in combinations(range(d.n), 3):
        if (d.has_arc(u, v) and d.has_arc(v, w) and d.has_arc(w, u)) or \
           (d.has_arc(u, w) and d.has_arc(w, v) and d.has_arc(v, u)):
            tris.append((u, v, w))
    return tris


def bf_disjoint_triangles(d: Digraph, k: int, budget: SearchBudget | None = None) -> SearchResult:
    """Exact decision: does the digraph contain k vertex-disjoint 3-cycles?

    Backtracks over the lowest-id unresolved vertex: either it joins one of
    its triangles or it is skipped, with at most n - 3k skips in total.
    """
    if 3 * k > d.n:
        raise ValueError(f"cannot pack {k} disjoint triangles into {d.n} vertices")
    if k <= 0:
        return SearchResult(FOUND, (), 0)
    bud = _Budget(budget or SearchBudget())
    tris = directed_triangles(d)
    by_vertex: list[list[tuple[int, int, int]]] = [[] for _ in range(d.n)]
    for t in tris:
        for v in t:
            by_vertex[v].append(t)
    max_skips = d.n - 3 * k
    chosen: list[tuple[int, int, int]] = []

    def solve(v: int, used: int, skips: int) -> bool | None:
        """True found / False exhausted-absent / None budget hit."""
        if len(chosen) == k:
            return True
        if not bud.tick():
            return None
        while v < d.n and used >> v & 1:
            v += 1
        if v == d.n:
            return False
        for t in by_vertex[v]:
            tm = (1 << t[0]) | (1 << t[1]) | (1 << t[2])
            if tm & used:
                continue
            chosen.append(t)
            got = solve(v + 1, used | tm, skips)
            if got:
                return True
            chosen.pop()
            if got is None:
                return None
        if skips < max_skips:
            return solve(v + 1, used | 1 << v, skips + 1)
        return False

    got = solve(0, 0, 0)
    if got:
        return SearchResult(FOUND, tuple(chosen), bud.nodes)
    if got is None:
        return SearchResult(EXHAUSTED, None, bud.nodes)
    return SearchResult(ABSENT, None, bud.nodes)
