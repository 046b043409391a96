"""Absorber enumeration, random family selection, chaining, and absorption.

An absorber of ``v`` is a reverse-square 4-path ``a,b,c,d`` that stays a
reverse-square path when ``v`` is spliced between ``b`` and ``c``.  A family
of pairwise-disjoint absorbers is chained into one absorbing path; later,
any small leftover vertex set is swallowed by splicing each vertex into its
own free absorber, leaving the end-arcs untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random

from .connecting import ConnectParams, connect_avoiding
from .digraph import Digraph, derive_seed, iter_bits, mask_of
from .errors import AbsorbFailure, ChainFailure, ConnectFailure, FamilyFailure
from .paths import (concat, first_end_arc, is_absorber, is_rs_path,
                    last_end_arc, rs_path_violation)

Member = tuple[int, int, int, int]


def enumerate_absorbers(d: Digraph, v: int, limit: int | None = None) -> list[Member]:
    """Up to ``limit`` distinct absorbers of ``v``, by constructive nesting.

    Vertices are chosen in the order b, c, a, d from the admissible
    neighbourhood intersections; with no limit this enumerates exactly the
    ordered 4-tuples for which ``is_absorber`` holds.
    """
    out, inn = d.out_masks, d.in_masks
    found: list[Member] = []
    for b in iter_bits(inn[v]):
        for c in iter_bits(inn[b] & out[b] & out[v]):
            a_mask = inn[b] & out[c] & out[v]
            d_mask = out[c] & inn[b] & inn[v]
            for a in iter_bits(a_mask):
                for dd in iter_bits(d_mask & ~(1 << a)):
                    found.append((a, b, c, dd))
                    if limit is not None and len(found) >= limit:
                        return found
    return found


def absorbed_mask(d: Digraph, t: Member) -> int:
    """Bitmask of vertices absorbed by the 4-tuple ``t``; 0 unless ``t`` has
    all six of its internal arcs."""
    a, b, c, dd = t
    if not (d.has_arc(a, b) and d.has_arc(b, c) and d.has_arc(c, dd)
            and d.has_arc(c, a) and d.has_arc(dd, b) and d.has_arc(c, b)):
        return 0
    own = mask_of(t)
    return d.out_masks[b] & d.in_masks[c] & d.in_masks[a] & d.out_masks[dd] & ~own


@dataclass(frozen=True)
class AbsorberFamily:
    """Pairwise-disjoint absorbers plus per-vertex coverage counts."""

    members: tuple[Member, ...]
    absorb_masks: tuple[int, ...]
    coverage: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.members)

    def member_mask(self) -> int:
        m = 0
        for t in self.members:
            m |= mask_of(t)
        return m


def family_coverage(d: Digraph, members: tuple[Member, ...]) -> tuple[int, ...]:
    cov = [0] * d.n
    for t in members:
        for v in iter_bits(absorbed_mask(d, t)):
            cov[v] += 1
    return tuple(cov)


def _poisson(rng: Random, lam: float) -> int:
    if lam <= 0:
        return 0
    limit = math.exp(-lam)
    k, p = 0, 1.0
    while True:
        p *= rng.random()
        if p <= limit:
            return k
        k += 1


def _random_tuple(rng: Random, n: int) -> Member:
    return tuple(rng.sample(range(n), 4))


def sample_family(d: Digraph, gamma: float, seed: int, retries: int = 12, *,
                  target_size: int | None = None,
                  size_cap: int | None = None,
                  coverage_floor: int | None = None,
                  paper_scale: bool = False,
                  draw_budget: int | None = None) -> AbsorberFamily:
    """Seeded random absorber family with verified coverage.

    In asymptotic mode each of the n(n-1)(n-2)(n-3) ordered 4-tuples is
    included independently with probability gamma^4 / n^3 (realised by a
    Poisson draw count), then every tuple that overlaps another and every
    non-absorber is discarded, and coverage of all vertices is required.

    At working sizes that filter is vacuous, so the desk mode keeps sampled
    tuples first-come-first-served while they stay disjoint and absorbing,
    up to ``target_size`` members, and requires the coverage floor only on
    vertices outside the family (the ones absorption can ever be asked to
    handle).  Each failed draw re-seeds and retries.
    """
    n = d.n
    if n < 5:
        raise ValueError("absorber families need n >= 5")
    if paper_scale:
        lam = (gamma ** 4 / n ** 3) * n * (n - 1) * (n - 2) * (n - 3)
        floor = coverage_floor if coverage_floor is not None else max(1, math.ceil(gamma ** 7 * n))
        cap = size_cap if size_cap is not None else max(1, math.ceil(2 * gamma ** 4 * n))
    else:
        target = target_size if target_size is not None else max(4, round(0.12 * n))
        floor = coverage_floor if coverage_floor is not None else 1
        cap = size_cap if size_cap is not None else target
        budget = draw_budget if draw_budget is not None else 40 * n

    worst_v, worst_cov = 0, -1
    attempts = max(1, retries)
    for attempt in range(attempts):
        rng = Random(derive_seed(seed, attempt))
        if paper_scale:
            k = min(_poisson(rng, lam), 8 * math.ceil(lam) + 16)
            drawn = [_random_tuple(rng, n) for _ in range(k)]
            counts: dict[int, int] = {}
            for t in drawn:
                for v in t:
                    counts[v] = counts.get(v, 0) + 1
            members = [t for t in drawn
                       if all(counts[v] == 1 for v in t) and absorbed_mask(d, t)]
        else:
            members = []
            used = 0
            for _ in range(budget):
                if len(members) >= target:
                    break
                t = _random_tuple(rng, n)
                tm = mask_of(t)
                if tm & used:
                    continue
                if not absorbed_mask(d, t):
                    continue
                members.append(t)
                used |= tm
        members = tuple(members)
        masks = tuple(absorbed_mask(d, t) for t in members)
        cov = [0] * n
        for m in masks:
            for v in iter_bits(m):
                cov[v] += 1
        if len(members) > cap:
            continue
        fam_mask = 0
        for t in members:
            fam_mask |= mask_of(t)
        check = range(n) if paper_scale else iter_bits(d.full_mask & ~fam_mask)
        bad = None
        for v in check:
            if cov[v] < floor:
                bad = v
                break
        if bad is None and members:
            return AbsorberFamily(members, masks, tuple(cov))
        if bad is not None and cov[bad] > worst_cov:
            worst_v, worst_cov = bad, cov[bad]
    raise FamilyFailure(worst_v, max(worst_cov, 0), floor, attempts)


@dataclass(frozen=True)
class AbsorbingPath:
    """A reverse-square path threaded through every member of a family.

    ``member_starts[i]`` is the index in ``path`` where member i's four
    vertices sit consecutively; ``used`` holds indices of members already
    consumed by absorption.
    """

    path: tuple[int, ...]
    members: tuple[Member, ...]
    member_starts: tuple[int, ...]
    absorb_masks: tuple[int, ...]
    used: frozenset[int] = frozenset()

    @property
    def order(self) -> int:
        return len(self.path)

    def vertex_mask(self) -> int:
        return mask_of(self.path)

    def free_members(self) -> list[int]:
        return [i for i in range(len(self.members)) if i not in self.used]

    def free_absorbers_of(self, v: int) -> list[int]:
        return [i for i in range(len(self.members))
                if i not in self.used and self.absorb_masks[i] >> v & 1]


def build_absorbing_path(d: Digraph, family: AbsorberFamily,
                         params: ConnectParams | None = None) -> AbsorbingPath:
    """Chain the family members, in order, into one reverse-square path.

    Consecutive members are joined by a connector found inside the vertices
    not yet touched (all chained content plus all unchained members are
    forbidden, junction arcs exempt).  Connector order is capped at
    min(ceil(8/gamma), n).
    """
    if family.size == 0:
        raise ValueError("cannot chain an empty family")
    params = params or ConnectParams()
    cap = min(math.ceil(8 / params.gamma), d.n)
    chain_params = ConnectParams(
        gamma=params.gamma, order_cap=cap, witness_cap=params.witness_cap,
        probe=params.probe, bf_threshold=params.bf_threshold,
        bf_budget=params.bf_budget, trace_node_cap=params.trace_node_cap)

    members = family.members
    path: tuple[int, ...] = members[0]
    starts = [0]
    for i, nxt in enumerate(members[1:], start=1):
        remaining = 0
        for t in members[i:]:
            remaining |= mask_of(t)
        forbidden = mask_of(path) | remaining
        try:
            q = connect_avoiding(d, last_end_arc(path), first_end_arc(nxt),
                                 forbidden, chain_params)
        except ConnectFailure as e:
            raise ChainFailure(i, str(e)) from e
        path = concat(path, q)
        path = concat(path, nxt)
        starts.append(len(path) - 4)
    apath = AbsorbingPath(path, members, tuple(starts), family.absorb_masks)
    _check_absorbing_path(d, apath)
    return apath


def _check_absorbing_path(d: Digraph, ap: AbsorbingPath) -> None:
    violation = rs_path_violation(d, ap.path)
    if violation is not None:
        raise RuntimeError(f"absorbing path broke verification: missing arc {violation}")
    for i, s in enumerate(ap.member_starts):
        if i in ap.used:
            got = (ap.path[s], ap.path[s + 1], ap.path[s + 3], ap.path[s + 4])
        else:
            got = ap.path[s:s + 4]
        if tuple(got) != ap.members[i]:
            raise RuntimeError(f"member {i} not at its recorded span: {got} != {ap.members[i]}")


def absorption_plan(d: Digraph, ap: AbsorbingPath, targets) -> dict[int, int] | None:
    """Match each target vertex to a distinct free member absorbing it.

    Returns ``{vertex: member_index}`` or None if no full matching exists.
    """
    targets = sorted(set(targets))
    free = ap.free_members()
    adj = {u: [i for i in free if ap.absorb_masks[i] >> u & 1] for u in targets}
    match_of_member: dict[int, int] = {}
    match_of_vertex: dict[int, int] = {}

    def augment(u: int, seen: set[int]) -> bool:
        for i in adj[u]:
            if i in seen:
                continue
            seen.add(i)
            if i not in match_of_member or augment(match_of_member[i], seen):
                match_of_member[i] = u
                match_of_vertex[u] = i
                return True
        return False

    for u in targets:
        if not augment(u, set()):
            return None
    return match_of_vertex


def absorb(d: Digraph, ap: AbsorbingPath, targets) -> AbsorbingPath:
    """Splice every target vertex into its own free absorber.

    The matching of targets to members is computed up front; only then are
    the splices applied, so a failure never leaves a half-spliced path.  The
    result has the same end-arcs and vertex set V(path) + targets.
    """
    targets = sorted(set(targets))
    pmask = ap.vertex_mask()
    for u in targets:
        if pmask >> u & 1:
            raise ValueError(f"vertex {u} already lies on the absorbing path")
        if not 0 <= u < d.n:
            raise ValueError(f"vertex {u} out of range")
    if not targets:
        return ap
    plan = absorption_plan(d, ap, targets)
    if plan is None:
        for u in targets:
            if not ap.free_absorbers_of(u):
                raise AbsorbFailure(u)
        raise AbsorbFailure(targets[0])

    seq = list(ap.path)
    inserts = sorted(((ap.member_starts[i], u, i) for u, i in plan.items()),
                     reverse=True)
    for start, u, i in inserts:
        a, b, c, dd = ap.members[i]
        assert seq[start:start + 4] == [a, b, c, dd]
        seq.insert(start + 2, u)
    insert_positions = sorted(start for start, _, _ in inserts)
    new_starts = []
    for s in ap.member_starts:
        shift = sum(1 for pos in insert_positions if pos < s)
        new_starts.append(s + shift)
    new = AbsorbingPath(tuple(seq), ap.members, tuple(new_starts),
                        ap.absorb_masks, ap.used | set(plan.values()))

    if first_end_arc(new.path) != first_end_arc(ap.path) or \
            last_end_arc(new.path) != last_end_arc(ap.path):
        raise RuntimeError("absorption changed the end-arcs")
    if set(new.path) != set(ap.path) | set(targets):
        raise RuntimeError("absorption changed the vertex set incorrectly")
    violation = rs_path_violation(d, new.path)
    if violation is not None:
        raise RuntimeError(f"absorption broke the path: missing arc {violation}")
    return new
