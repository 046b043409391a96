"""Short reverse-square connections between disjoint arcs of a dense digraph.

``connect`` produces a reverse-square path whose first end-arc is ``(a,b)``
and whose last end-arc is ``(c,d)``.  It tries, in order:

1. direct probes for paths of order 4, 5 and 6 (pure mask intersections),
2. exact breadth-first search when few vertices are active,
3. the cascade construction: layered reachability structures grown forwards
   from ``(a,b)`` and backwards from ``(c,d)`` (the backward one is the
   forward construction on the reversed digraph), a high-link-degree vertex
   in each, and a spliced middle section joining the two traced tails.

Cascade levels may overlap as vertex sets; instead of treating repeats as
clones, tracing backtracks over link predecessors with explicit distinctness
checks, with branching capped by ``witness_cap``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

from .digraph import Digraph, iter_bits, mask_of
from .errors import ConnectFailure
from .oracle import ABSENT, EXHAUSTED, SearchBudget, bf_connect
from .paths import first_end_arc, last_end_arc, rs_path_violation


@dataclass(frozen=True)
class ConnectParams:
    """Tunables for the cascade connector.

    ``None`` fields resolve per call from the active vertex count m:
    level_cap = ceil(1/gamma)+1, prune_threshold = sqrt(m),
    witness_threshold = m**0.25, order_cap = min(ceil(4/gamma), m).
    """

    gamma: float = 0.1
    level_cap: int | None = None
    prune_threshold: float | None = None
    witness_threshold: float | None = None
    order_cap: int | None = None
    witness_cap: int = 8
    probe: bool = True
    bf_threshold: int = 40
    bf_budget: SearchBudget = field(default_factory=lambda: SearchBudget(500_000, 20.0))
    trace_node_cap: int = 20_000

    def __post_init__(self):
        if not 0 < self.gamma <= 1 / 6:
            raise ValueError("gamma must lie in (0, 1/6]")
        if self.level_cap is not None and self.level_cap < 2:
            raise ValueError("level_cap must be >= 2")
        if self.witness_cap < 1:
            raise ValueError("witness_cap must be positive")

    def max_level(self) -> int:
        if self.level_cap is not None:
            return self.level_cap
        return math.ceil(1 / self.gamma) + 1

    def prune_at(self, m: int) -> float:
        return self.prune_threshold if self.prune_threshold is not None else math.sqrt(m)

    def witness_at(self, m: int) -> float:
        return self.witness_threshold if self.witness_threshold is not None else m ** 0.25

    def order_limit(self, m: int) -> int:
        if self.order_cap is not None:
            return self.order_cap
        return min(math.ceil(4 / self.gamma), m)


@dataclass
class Cascade:
    """Layered witness structure rooted at an arc.

    ``levels[j]`` is the bitmask of level-j vertices; ``link_in[j][y]`` is
    the bitmask of in-neighbours of ``y`` in the level-j link digraph;
    ``witnesses[j][z]`` holds up to ``witness_cap`` recorded predecessor
    pairs ``(y, x)`` from which a reverse-square path back to the root arc
    can be traced.  ``graph`` is the digraph the cascade was grown in (the
    reversed digraph for in-cascades), so tracing is orientation-free.
    """

    direction: str
    root: tuple[int, int]
    graph: Digraph
    n_active: int
    levels: list[int]
    link_in: list[dict[int, int]]
    witnesses: list[dict[int, tuple[tuple[int, int], ...]]]
    heavy: tuple[int, int] | None
    dead_end: bool

    def level_vertices(self, j: int) -> list[int]:
        return list(iter_bits(self.levels[j]))

    def depth(self) -> int:
        return len(self.levels) - 1


def _heavy_in_level(link: dict[int, int], threshold: float) -> int | None:
    best = None
    for y, m in link.items():
        if m.bit_count() >= threshold and (best is None or y < best):
            best = y
    return best


def _grow_level_two(graph: Digraph, b: int, x1: int, excl: int, prune: float,
                    wit_cap: int):
    """Level 2: vertices with an in-neighbour in X1 and an arc back to b."""
    link: dict[int, int] = {}
    wit: dict[int, tuple[tuple[int, int], ...]] = {}
    for z in iter_bits(graph.in_masks[b] & excl):
        m = graph.in_masks[z] & x1
        if m and m.bit_count() >= prune:
            link[z] = m
            wit[z] = tuple((y, b) for y in _capped(m, wit_cap))
    return link, wit


def _grow_deep_level(graph: Digraph, xj: int, linkj: dict[int, int], excl: int,
                     prune: float, wit_thr: float, wit_cap: int):
    """Levels >= 3: z qualifies via y when z has enough out-arcs into y's
    link predecessors (each such predecessor x realises the window x, y, z
    of a reverse-square path)."""
    link: dict[int, int] = {}
    wit: dict[int, tuple[tuple[int, int], ...]] = {}
    for z in iter_bits(excl):
        ym = xj & graph.in_masks[z]
        if not ym:
            continue
        pairs: list[tuple[int, int]] = []
        qualified = False
        out_z = graph.out_masks[z]
        for y in iter_bits(ym):
            xm = linkj[y] & out_z
            if xm.bit_count() >= wit_thr:
                qualified = True
                for x in _capped(xm, wit_cap - len(pairs)):
                    pairs.append((y, x))
                if len(pairs) >= wit_cap:
                    break
        if not qualified:
            continue
        lm = graph.in_masks[z] & xj
        if lm.bit_count() >= prune:
            link[z] = lm
            wit[z] = tuple(pairs)
    return link, wit


def _build_cascade(graph: Digraph, root: tuple[int, int], p: ConnectParams,
                   direction: str) -> Cascade:
    a, b = root
    if not graph.has_arc(a, b):
        raise ValueError(f"root arc {root} not present")
    m_active = graph.active_count()
    prune = p.prune_at(m_active)
    wit_thr = p.witness_at(m_active)
    heavy_thr = (1 / 3 + p.gamma) * m_active
    cap = p.max_level()
    excl = graph.full_mask & ~((1 << a) | (1 << b))

    x1 = graph.in_masks[a] & graph.out_masks[b] & excl
    levels = [1 << b, x1]
    link_in: list[dict[int, int]] = [{}, {x: 1 << b for x in iter_bits(x1)}]
    witnesses: list[dict[int, tuple[tuple[int, int], ...]]] = [{}, {}]
    casc = Cascade(direction, root, graph, m_active, levels, link_in, witnesses,
                   heavy=None, dead_end=(x1 == 0))
    if casc.dead_end:
        return casc

    heavy = _heavy_in_level(link_in[1], heavy_thr)
    if heavy is not None:
        casc.heavy = (1, heavy)
        return casc
    j = 1
    while j < cap:
        if j == 1:
            new_link, new_wit = _grow_level_two(graph, b, x1, excl, prune, p.witness_cap)
        else:
            new_link, new_wit = _grow_deep_level(graph, levels[j], link_in[j], excl,
                                                 prune, wit_thr, p.witness_cap)
        if not new_link:
            casc.dead_end = True
            return casc
        levels.append(mask_of(new_link))
        link_in.append(new_link)
        witnesses.append(new_wit)
        j += 1
        heavy = _heavy_in_level(new_link, heavy_thr)
        if heavy is not None:
            casc.heavy = (j, heavy)
            return casc
    return casc


def build_out_cascade(d: Digraph, ab: tuple[int, int], p: ConnectParams | None = None) -> Cascade:
    """Grow the forward cascade rooted at the arc ``ab``."""
    return _build_cascade(d, ab, p or ConnectParams(), "out")


def build_in_cascade(d: Digraph, cd: tuple[int, int], p: ConnectParams | None = None) -> Cascade:
    """Grow the backward cascade rooted at ``cd``: in-neighbours of c and
    out-neighbours of d, realised as the forward construction on the
    reversed digraph rooted at (d, c)."""
    c, dd = cd
    return _build_cascade(d.reverse(), (dd, c), p or ConnectParams(), "in")


def find_heavy(casc: Cascade, n: int, gamma: float) -> tuple[int, int] | None:
    """First (lowest level, then smallest id) vertex whose link in-degree
    reaches (1/3+gamma)*n.  Levels beyond the build's early stop are absent."""
    threshold = (1 / 3 + gamma) * n
    for j in range(1, len(casc.levels)):
        best = _heavy_in_level(casc.link_in[j], threshold)
        if best is not None:
            return (j, best)
    return None


def _find_heavy_avoiding(casc: Cascade, threshold: float, banned: int) -> tuple[int, int] | None:
    """Lowest-level, smallest-id heavy vertex outside ``banned`` (a pivot
    must stay distinct from the four end-arc vertices)."""
    for j in range(1, len(casc.levels)):
        best = None
        for y, m in casc.link_in[j].items():
            if banned >> y & 1:
                continue
            if m.bit_count() >= threshold and (best is None or y < best):
                best = y
        if best is not None:
            return (j, best)
    return None


class _TraceBudget:
    __slots__ = ("left",)

    def __init__(self, cap: int):
        self.left = cap

    def spend(self) -> bool:
        self.left -= 1
        return self.left > 0


def _capped(mask: int, cap: int) -> Iterator[int]:
    if cap <= 0:
        return
    k = 0
    for v in iter_bits(mask):
        yield v
        k += 1
        if k >= cap:
            return


def _trace_pair(casc: Cascade, j: int, u: int, v: int, banned: int,
                cap: int, budget: _TraceBudget) -> tuple[int, ...] | None:
    """Reverse-square path (root..., u, v) with u in X_{j-1}, v in X_j.

    ``banned`` filters candidate predecessors only; committed vertices are
    carried in the arguments.  The root pair is exempt: it enters through
    the base cases, never as a candidate.
    """
    if not budget.spend():
        return None
    tail, head = casc.root
    if j == 1:
        return (tail, head, v) if u == head else None
    if j == 2:
        # the unique level-0 predecessor is the root head
        if casc.link_in[1].get(u, 0) and casc.graph.out_masks[v] >> head & 1:
            return (tail, head, u, v)
        return None
    cands = casc.link_in[j - 1].get(u, 0) & casc.graph.out_masks[v] & ~banned
    for t in _capped(cands, cap):
        sub = _trace_pair(casc, j - 1, t, u, banned | (1 << t), cap, budget)
        if sub is not None:
            return sub + (v,)
    return None


def trace_path(casc: Cascade, level: int, z: int, banned: int = 0,
               witness_cap: int = 8, node_cap: int = 20_000) -> tuple[int, ...] | None:
    """Explicit all-distinct reverse-square path from the root arc to ``z``.

    The path is expressed in the cascade's own graph orientation; callers
    holding an in-cascade reverse it.  Returns None when backtracking cannot
    avoid ``banned``.
    """
    tail, head = casc.root
    if level == 0:
        return (tail, head) if z == head else None
    if not casc.levels[level] >> z & 1:
        return None
    if level == 1:
        return (tail, head, z)
    budget = _TraceBudget(node_cap)
    for y in _capped(casc.link_in[level].get(z, 0) & ~banned, witness_cap):
        got = _trace_pair(casc, level, y, z, banned | (1 << y) | (1 << z),
                          witness_cap, budget)
        if got is not None:
            return got
    return None


# ---------------------------------------------------------------------------
# Direct probes for orders 4..6.

def _probe_order4(d: Digraph, a, b, c, dd):
    if d.has_arc(b, c) and d.has_arc(c, a) and d.has_arc(dd, b):
        return (a, b, c, dd)
    return None


def _probe_order5(d: Digraph, a, b, c, dd, avoid: int):
    if not d.has_arc(c, b):
        return None
    wm = d.out_masks[b] & d.in_masks[c] & d.in_masks[a] & d.out_masks[dd] & ~avoid
    for w in iter_bits(wm):
        return (a, b, w, c, dd)
    return None


def _probe_order6(d: Digraph, a, b, c, dd, avoid: int):
    w1m = d.out_masks[b] & d.in_masks[a] & d.out_masks[c] & ~avoid
    for w1 in iter_bits(w1m):
        w2m = (d.out_masks[w1] & d.in_masks[c] & d.in_masks[b]
               & d.out_masks[dd] & ~avoid & ~(1 << w1))
        for w2 in iter_bits(w2m):
            return (a, b, w1, w2, c, dd)
    return None


def _probe(d: Digraph, ab, cd, cap: int):
    a, b = ab
    c, dd = cd
    avoid = (1 << a) | (1 << b) | (1 << c) | (1 << dd)
    if cap >= 4:
        got = _probe_order4(d, a, b, c, dd)
        if got:
            return got
    if cap >= 5:
        got = _probe_order5(d, a, b, c, dd, avoid)
        if got:
            return got
    if cap >= 6:
        got = _probe_order6(d, a, b, c, dd, avoid)
        if got:
            return got
    return None


# ---------------------------------------------------------------------------
# Splicing the two traced tails around the heavy vertices.

def _distinct(seq: tuple[int, ...]) -> bool:
    return len(set(seq)) == len(seq)


def _splice_same_pivot(d: Digraph, casc_out: Cascade, casc_in: Cascade,
                       pivot: int, j1: int, j2: int, base_ban: int,
                       p: ConnectParams) -> tuple[int, ...] | None:
    """Both cascades share the heavy vertex: route ...a1, pivot, a2... with
    the back arc a2 -> a1."""
    out_link = casc_out.link_in[j1].get(pivot, 0)
    if j1 > 1:
        out_link &= ~base_ban
    in_link = casc_in.link_in[j2].get(pivot, 0)
    if j2 > 1:
        in_link &= ~base_ban
    attempts = 0
    for a2 in iter_bits(in_link):
        a1m = out_link & d.out_masks[a2] & ~(1 << a2)
        for a1 in iter_bits(a1m):
            attempts += 1
            if attempts > 128:
                return None
            p1 = _trace_pair(casc_out, j1, a1, pivot,
                             base_ban | (1 << a1) | (1 << pivot) | (1 << a2),
                             p.witness_cap, _TraceBudget(p.trace_node_cap))
            if p1 is None:
                continue
            ban2 = base_ban | mask_of(p1) | (1 << a2)
            p2 = _trace_pair(casc_in, j2, a2, pivot, ban2,
                             p.witness_cap, _TraceBudget(p.trace_node_cap))
            if p2 is None:
                continue
            back = tuple(reversed(p2))          # pivot, a2, ..., c, d in D
            combined = p1 + back[1:]
            if _distinct(combined):
                return combined
    return None


def _splice_two_pivots(d: Digraph, casc_out: Cascade, casc_in: Cascade,
                       b1: int, j1: int, b2: int, j2: int, base_ban: int,
                       p: ConnectParams) -> tuple[int, ...] | None:
    """Distinct heavy vertices: middle section b1, u1, w, u2, b2 with
    w in N-(b1) & N+(b2), u2 -> u1, and back arcs into the traced tails."""
    ban = base_ban | (1 << b1) | (1 << b2)
    attempts = 0
    for w in _capped(d.in_masks[b1] & d.out_masks[b2] & ~ban, 24):
        u1m = d.out_masks[b1] & d.in_masks[w] & ~ban & ~(1 << w)
        u2m = d.out_masks[w] & d.in_masks[b2] & ~ban & ~(1 << w)
        for u2 in _capped(u2m, 12):
            for u1 in _capped(u1m & d.out_masks[u2] & ~(1 << u2), 6):
                attempts += 1
                if attempts > 256:
                    return None
                mids = (1 << w) | (1 << u1) | (1 << u2)
                x1m = casc_out.link_in[j1].get(b1, 0) & d.out_masks[u1]
                if j1 > 1:
                    x1m &= ~ban & ~mids
                for x1 in _capped(x1m, 4):
                    p1 = _trace_pair(casc_out, j1, x1, b1,
                                     ban | mids | (1 << x1) | (1 << b1),
                                     p.witness_cap, _TraceBudget(p.trace_node_cap))
                    if p1 is None:
                        continue
                    used1 = mask_of(p1)
                    x2m = casc_in.link_in[j2].get(b2, 0) & d.in_masks[u2] & ~used1
                    if j2 > 1:
                        x2m &= ~ban & ~mids
                    for x2 in _capped(x2m, 4):
                        p2 = _trace_pair(casc_in, j2, x2, b2,
                                         ban | mids | used1 | (1 << x2) | (1 << b2),
                                         p.witness_cap, _TraceBudget(p.trace_node_cap))
                        if p2 is None:
                            continue
                        back = tuple(reversed(p2))   # b2, x2, ..., c, d in D
                        combined = p1 + (u1, w, u2) + back
                        if _distinct(combined):
                            return combined
    return None


def connect(d: Digraph, ab: tuple[int, int], cd: tuple[int, int],
            p: ConnectParams | None = None) -> tuple[int, ...]:
    """Reverse-square path with first end-arc ``ab`` and last end-arc ``cd``.

    Raises ConnectFailure with stage diagnostics when no path is found
    within the order cap.  Every returned path is re-verified before it is
    handed back.
    """
    p = p or ConnectParams()
    a, b = ab
    c, dd = cd
    if not d.has_arc(a, b) or not d.has_arc(c, dd):
        raise ValueError("both end-arcs must be arcs of the digraph")
    if len({a, b, c, dd}) != 4:
        raise ValueError("end-arcs must be vertex-disjoint")
    m_active = d.active_count()
    cap = p.order_limit(m_active)

    path = _probe(d, ab, cd, cap) if p.probe else None

    if path is None and m_active <= p.bf_threshold:
        res = bf_connect(d, ab, cd, max_order=cap, budget=p.bf_budget)
        if res.status == ABSENT:
            raise ConnectFailure("exact-search", f"no path of order <= {cap} exists")
        if res.status == EXHAUSTED:
            raise ConnectFailure("exact-search", "search budget exhausted")
        path = res.witness

    if path is None:
        casc_out = build_out_cascade(d, ab, p)
        casc_in = build_in_cascade(d, cd, p)
        base_ban = (1 << a) | (1 << b) | (1 << c) | (1 << dd)
        threshold = (1 / 3 + p.gamma) * m_active
        heavy_out = _find_heavy_avoiding(casc_out, threshold, base_ban)
        heavy_in = _find_heavy_avoiding(casc_in, threshold, base_ban)
        if heavy_out is not None and heavy_in is not None:
            j1, b1 = heavy_out
            j2, b2 = heavy_in
            if b1 == b2:
                path = _splice_same_pivot(d, casc_out, casc_in, b1, j1, j2, base_ban, p)
            else:
                path = _splice_two_pivots(d, casc_out, casc_in, b1, j1, b2, j2, base_ban, p)
        if path is None:
            res = bf_connect(d, ab, cd, max_order=min(cap, 8), budget=p.bf_budget)
            if not res.found:
                raise ConnectFailure(
                    "cascade",
                    f"heavy=({heavy_out},{heavy_in}) "
                    f"dead_end=({casc_out.dead_end},{casc_in.dead_end}) "
                    f"depths=({casc_out.depth()},{casc_in.depth()}) fallback={res.status}")
            path = res.witness

    if len(path) > cap:
        raise ConnectFailure("order-cap", f"found order {len(path)} > cap {cap}")
    if not _distinct(path) or first_end_arc(path) != ab or last_end_arc(path) != cd \
            or rs_path_violation(d, path) is not None:
        raise ConnectFailure("internal", f"emitted sequence {path} failed verification")
    return path


def connect_avoiding(d: Digraph, ab: tuple[int, int], cd: tuple[int, int],
                     forbidden, p: ConnectParams | None = None) -> tuple[int, ...]:
    """As ``connect``, with all interior vertices outside ``forbidden``.

    The four end-arc vertices are exempt from ``forbidden``.
    """
    fmask = forbidden if isinstance(forbidden, int) else mask_of(forbidden)
    keep = (1 << ab[0]) | (1 << ab[1]) | (1 << cd[0]) | (1 << cd[1])
    allowed = (d.full_mask & ~fmask) | keep
    sub = d.restrict(allowed)
    return connect(sub, ab, cd, p)
