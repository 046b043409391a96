"""Reverse-square verifiers and path algebra.

A sequence ``v1..vk`` is a reverse-square path when every consecutive arc
``vi -> vi+1`` is present and, for every pair at distance two along the
sequence, the reversed arc ``vi+2 -> vi`` is present.  The cycle variant
closes both families of arcs modulo k.  A single arc counts as a
reverse-square 2-path.

Verifiers come in two layers: ``*_violation`` functions return the first
missing arc (consecutive arcs scanned first, then the distance-two back
arcs), and the boolean ``is_*`` wrappers are what the construction code
asserts against.
"""

from __future__ import annotations

from typing import Sequence

from .digraph import Digraph

VertexSeq = tuple[int, ...]
ArcPair = tuple[int, int]


def _check_seq(d: Digraph, seq: Sequence[int], min_len: int, kind: str) -> None:
    if len(seq) < min_len:
        raise ValueError(f"{kind} needs at least {min_len} vertices, got {len(seq)}")
    if len(set(seq)) != len(seq):
        raise ValueError(f"{kind} has repeated vertices: {list(seq)}")
    for v in seq:
        if not 0 <= v < d.n:
            raise ValueError(f"vertex {v} out of range for n={d.n}")


def first_end_arc(seq: Sequence[int]) -> ArcPair:
    if len(seq) < 2:
        raise ValueError("end-arcs need a path of order >= 2")
    return (seq[0], seq[1])


def last_end_arc(seq: Sequence[int]) -> ArcPair:
    if len(seq) < 2:
        raise ValueError("end-arcs need a path of order >= 2")
    return (seq[-2], seq[-1])


def rs_path_violation(d: Digraph, seq: Sequence[int]) -> ArcPair | None:
    """First missing arc of the reverse-square path condition, or None."""
    _check_seq(d, seq, 2, "path")
    k = len(seq)
    for i in range(k - 1):
        if not d.has_arc(seq[i], seq[i + 1]):
            return (seq[i], seq[i + 1])
    for i in range(k - 2):
        if not d.has_arc(seq[i + 2], seq[i]):
            return (seq[i + 2], seq[i])
    return None


def is_rs_path(d: Digraph, seq: Sequence[int]) -> bool:
    return rs_path_violation(d, seq) is None


def rs_cycle_violation(d: Digraph, seq: Sequence[int]) -> ArcPair | None:
    """First missing arc of the reverse-square cycle condition, or None."""
    _check_seq(d, seq, 3, "cycle")
    k = len(seq)
    for i in range(k):
        if not d.has_arc(seq[i], seq[(i + 1) % k]):
            return (seq[i], seq[(i + 1) % k])
    for i in range(k):
        if not d.has_arc(seq[(i + 2) % k], seq[i]):
            return (seq[(i + 2) % k], seq[i])
    return None


def is_rs_cycle(d: Digraph, seq: Sequence[int]) -> bool:
    return rs_cycle_violation(d, seq) is None


def square_cycle_violation(d: Digraph, seq: Sequence[int]) -> ArcPair | None:
    """Plain square of a cycle: arcs forward to the next two vertices."""
    _check_seq(d, seq, 3, "cycle")
    k = len(seq)
    for i in range(k):
        if not d.has_arc(seq[i], seq[(i + 1) % k]):
            return (seq[i], seq[(i + 1) % k])
    for i in range(k):
        if not d.has_arc(seq[i], seq[(i + 2) % k]):
            return (seq[i], seq[(i + 2) % k])
    return None


def is_square_cycle(d: Digraph, seq: Sequence[int]) -> bool:
    return square_cycle_violation(d, seq) is None


def absorber_arcs(t: Sequence[int], v: int) -> list[ArcPair]:
    """The ten arcs that make (a,b,c,d) an absorber of v, in check order."""
    a, b, c, d = t
    return [(a, b), (b, c), (c, d), (c, a), (d, b),
            (b, v), (v, c), (v, a), (c, b), (d, v)]


def absorber_violation(d: Digraph, t: Sequence[int], v: int) -> ArcPair | None:
    if len(t) != 4:
        raise ValueError("absorber candidates are 4-tuples")
    if len({*t, v}) != 5:
        raise ValueError(f"absorber vertices must be distinct: {list(t)} + {v}")
    for u in (*t, v):
        if not 0 <= u < d.n:
            raise ValueError(f"vertex {u} out of range for n={d.n}")
    for tail, head in absorber_arcs(t, v):
        if not d.has_arc(tail, head):
            return (tail, head)
    return None


def is_absorber(d: Digraph, t: Sequence[int], v: int) -> bool:
    """True iff abcd is a reverse-square 4-path extendable to the 5-path abvcd."""
    return absorber_violation(d, t, v) is None


def concat(p: Sequence[int], q: Sequence[int]) -> VertexSeq:
    """Concatenate two reverse-square paths that share exactly the junction arc.

    The last end-arc of ``p`` must equal the first end-arc of ``q``; the
    result is ``p`` followed by ``q`` minus its first two vertices.  The
    reverse-square property of the result follows from the two inputs.
    """
    if len(p) < 2 or len(q) < 2:
        raise ValueError("concat needs paths of order >= 2")
    if last_end_arc(p) != first_end_arc(q):
        raise ValueError(
            f"junction mismatch: last end-arc {last_end_arc(p)} != first end-arc {first_end_arc(q)}")
    shared = set(p) & set(q)
    if shared != {p[-2], p[-1]}:
        raise ValueError(
            f"paths must overlap in exactly the junction arc, got shared set {sorted(shared)}")
    return tuple(p) + tuple(q[2:])


def triangles_from_cycle(d: Digraph, cycle: Sequence[int]) -> list[tuple[int, int, int]]:
    """Slice a verified reverse-square cycle into floor(k/3) disjoint 3-cycles.

    Consecutive triples (v_i, v_i+1, v_i+2) inherit the arcs v_i->v_i+1,
    v_i+1->v_i+2 from the cycle and v_i+2->v_i from the reversed
    distance-two family, so each is a directed triangle.
    """
    violation = rs_cycle_violation(d, cycle)
    if violation is not None:
        raise ValueError(f"not a reverse-square cycle: missing arc {violation}")
    out = []
    for i in range(0, len(cycle) - len(cycle) % 3, 3):
        out.append((cycle[i], cycle[i + 1], cycle[i + 2]))
    return out


def is_directed_triangle(d: Digraph, t: Sequence[int]) -> bool:
    a, b, c = t
    return d.has_arc(a, b) and d.has_arc(b, c) and d.has_arc(c, a)
