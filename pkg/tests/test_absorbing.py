from random import Random

import pytest

from rsham.absorbing import (AbsorbingPath, absorb, absorbed_mask,
                             absorption_plan, build_absorbing_path,
                             enumerate_absorbers, family_coverage,
                             sample_family, _poisson, _random_tuple)
from rsham.connecting import ConnectParams
from rsham.digraph import (Digraph, derive_seed, gen_random_semidegree,
                           iter_bits, mask_of)
from rsham.errors import AbsorbFailure, FamilyFailure
from rsham.oracle import bf_count_absorbers
from rsham.paths import first_end_arc, is_absorber, is_rs_path, last_end_arc


def test_enumerate_complete_limit():
    d = Digraph.complete(8)
    got = enumerate_absorbers(d, 0, limit=10)
    assert len(got) == 10
    assert all(is_absorber(d, t, 0) for t in got)


def test_enumerate_no_in_neighbours():
    d = Digraph.from_arcs(6, [(0, v) for v in range(1, 6)])
    assert enumerate_absorbers(d, 0) == []


def test_enumerate_matches_oracle_count():
    rng = Random(3)
    for n in (12, 18, 25):
        d = gen_random_semidegree(n, 0.75, seed=rng.randrange(10 ** 9))
        for v in range(0, n, 5):
            got = enumerate_absorbers(d, v)
            assert len(got) == bf_count_absorbers(d, v)
            assert len(set(got)) == len(got)


def test_absorbed_mask_matches_verifier():
    d = gen_random_semidegree(18, 0.75, seed=9)
    rng = Random(1)
    for _ in range(200):
        t = tuple(rng.sample(range(18), 4))
        m = absorbed_mask(d, t)
        for v in range(18):
            if v in t:
                continue
            assert bool(m >> v & 1) == is_absorber(d, t, v)


def test_sample_family_deterministic():
    d = gen_random_semidegree(50, 0.8, seed=4)
    a = sample_family(d, 0.1, seed=77)
    b = sample_family(d, 0.1, seed=77)
    assert a.members == b.members
    c = sample_family(d, 0.1, seed=78)
    assert a.members != c.members


def test_sample_family_members_disjoint_and_rechecked():
    d = gen_random_semidegree(60, 0.8, seed=5)
    fam = sample_family(d, 0.1, seed=11)
    seen = 0
    for t, m in zip(fam.members, fam.absorb_masks):
        tm = mask_of(t)
        assert not tm & seen
        seen |= tm
        assert m != 0
        for v in iter_bits(m):
            assert is_absorber(d, t, v)
    assert fam.coverage == family_coverage(d, fam.members)


def test_sample_family_complete_digraph_full_coverage():
    d = Digraph.complete(60)
    fam = sample_family(d, 0.1, seed=2)
    outside = [v for v in range(60) if not fam.member_mask() >> v & 1]
    assert min(fam.coverage[v] for v in outside) >= fam.size - 0  # every member absorbs all
    assert all(fam.coverage[v] == fam.size for v in outside)


def test_sample_family_failure_reports_worst_vertex():
    # vertex 0 has no in-arcs: it can neither join a member nor be absorbed
    arcs = [(u, v) for u in range(1, 16) for v in range(1, 16) if u != v]
    arcs += [(0, v) for v in range(1, 16)]
    d = Digraph.from_arcs(16, arcs)
    with pytest.raises(FamilyFailure) as exc:
        sample_family(d, 0.1, seed=3, retries=3, target_size=3)
    assert exc.value.worst_vertex == 0
    assert exc.value.coverage == 0


def test_sample_family_paper_mode():
    d = Digraph.complete(200)
    fam = sample_family(d, 0.35, seed=6, paper_scale=True)
    assert fam.size >= 1
    seen = 0
    for t in fam.members:
        tm = mask_of(t)
        assert not tm & seen
        seen |= tm


def test_paper_mode_intersecting_pairs_statistic():
    # sample mean of intersecting drawn pairs stays near the closed form
    # lam^2/2 * P(two 4-sets meet) and well under 17 * gamma^8 * n ~ bound
    n, gamma = 200, 0.35
    lam = (gamma ** 4 / n ** 3) * n * (n - 1) * (n - 2) * (n - 3)
    total_pairs = 0
    trials = 200
    for s in range(trials):
        rng = Random(derive_seed(s, 0))
        k = _poisson(rng, lam)
        drawn = [_random_tuple(rng, n) for _ in range(k)]
        for i in range(len(drawn)):
            for j in range(i + 1, len(drawn)):
                if set(drawn[i]) & set(drawn[j]):
                    total_pairs += 1
    mean = total_pairs / trials
    assert mean <= 16 * gamma ** 8 * n * 1.5 + 0.2


def test_build_absorbing_path_single_member():
    d = Digraph.complete(20)
    fam = sample_family(d, 0.1, seed=1, target_size=1)
    ap = build_absorbing_path(d, fam)
    assert ap.path == fam.members[0]
    assert ap.member_starts == (0,)


def test_build_absorbing_path_complete_three_members():
    d = Digraph.complete(30)
    fam = sample_family(d, 0.1, seed=5, target_size=3)
    assert fam.size == 3
    ap = build_absorbing_path(d, fam)
    assert is_rs_path(d, ap.path)
    member_vertices = {v for t in fam.members for v in t}
    assert member_vertices <= set(ap.path)
    for i, s in enumerate(ap.member_starts):
        assert ap.path[s:s + 4] == fam.members[i]


def test_absorb_empty_targets_is_identity():
    d = Digraph.complete(20)
    ap = build_absorbing_path(d, sample_family(d, 0.1, seed=1, target_size=2))
    assert absorb(d, ap, ()) is ap


def test_absorb_single_vertex_splice():
    d = Digraph.complete(5)
    ap = AbsorbingPath(path=(0, 1, 2, 3), members=((0, 1, 2, 3),),
                       member_starts=(0,), absorb_masks=(absorbed_mask(d, (0, 1, 2, 3)),))
    out = absorb(d, ap, [4])
    assert out.path == (0, 1, 4, 2, 3)
    assert out.used == {0}


def test_absorb_preserves_end_arcs_and_vertex_set():
    rng = Random(17)
    for _ in range(40):
        d = gen_random_semidegree(40, 0.82, seed=rng.randrange(10 ** 9))
        try:
            fam = sample_family(d, 0.1, seed=rng.randrange(10 ** 9), target_size=5)
            ap = build_absorbing_path(d, fam)
        except Exception:
            continue
        outside = [v for v in range(40) if not ap.vertex_mask() >> v & 1]
        targets = rng.sample(outside, min(3, len(outside)))
        try:
            out = absorb(d, ap, targets)
        except AbsorbFailure:
            continue
        assert first_end_arc(out.path) == first_end_arc(ap.path)
        assert last_end_arc(out.path) == last_end_arc(ap.path)
        assert set(out.path) == set(ap.path) | set(targets)
        assert is_rs_path(d, out.path)


def test_absorb_failure_names_vertex():
    d = Digraph.complete(10)
    full = [(u, v) for u in range(11) for v in range(11) if u != v]
    # vertex 10 receives no arcs: nothing can absorb it
    arcs = [(u, v) for u, v in full if v != 10 and u != 10]
    arcs += [(10, v) for v in range(10)]
    dd = Digraph.from_arcs(11, arcs)
    fam = sample_family(dd, 0.1, seed=1, target_size=2, coverage_floor=0)
    ap = build_absorbing_path(dd, fam)
    with pytest.raises(AbsorbFailure) as exc:
        absorb(dd, ap, [10])
    assert exc.value.vertex == 10


def test_absorb_rejects_overlapping_targets():
    d = Digraph.complete(20)
    ap = build_absorbing_path(d, sample_family(d, 0.1, seed=1, target_size=2))
    with pytest.raises(ValueError):
        absorb(d, ap, [ap.path[0]])


def test_absorption_plan_uses_distinct_members():
    d = Digraph.complete(30)
    fam = sample_family(d, 0.1, seed=9, target_size=4)
    ap = build_absorbing_path(d, fam)
    outside = [v for v in range(30) if not ap.vertex_mask() >> v & 1][:4]
    plan = absorption_plan(d, ap, outside)
    assert plan is not None
    assert len(set(plan.values())) == len(outside)
