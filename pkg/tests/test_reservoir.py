from random import Random

import pytest

from rsham.digraph import Digraph, bits_list, gen_random_semidegree, mask_of
from rsham.errors import ReservoirFailure
from rsham.paths import is_rs_path
from rsham.reservoir import (Reservoir, certificate_margin,
                             desk_certificate_threshold,
                             paper_certificate_threshold, reservoir_connect,
                             sample_reservoir)

from test_connecting import disjoint_arc_pairs


def test_paper_threshold_arithmetic():
    # (2/3 + gamma/2)(r + 4) at gamma=0.1: r=14 yields 13 <= r-1, r=12 yields 12 > r-1
    assert paper_certificate_threshold(14, 0.1) == 13
    assert paper_certificate_threshold(12, 0.1) == 12


def test_complete_digraph_certifies_at_fourteen():
    d = Digraph.complete(40)
    res = sample_reservoir(d, 0, 14, 0.1, seed=1)
    assert res.certified and res.retries_used == 0


def test_complete_digraph_cannot_certify_below_threshold():
    d = Digraph.complete(40)
    with pytest.raises(ReservoirFailure):
        sample_reservoir(d, 0, 12, 0.1, seed=1)


def test_size_one_cannot_certify():
    d = Digraph.complete(40)
    with pytest.raises(ReservoirFailure) as exc:
        sample_reservoir(d, 0, 1, 0.1, seed=1)
    assert exc.value.threshold > 1


def test_same_seed_same_reservoir():
    d = gen_random_semidegree(120, 0.8, seed=6)
    a = sample_reservoir(d, 0, 12, 0.1, seed=5, retries=30,
                         threshold=desk_certificate_threshold(12))
    b = sample_reservoir(d, 0, 12, 0.1, seed=5, retries=30,
                         threshold=desk_certificate_threshold(12))
    assert a.verts == b.verts


def test_certificate_checked_over_all_vertices():
    d = gen_random_semidegree(100, 0.8, seed=3)
    res = sample_reservoir(d, 0, 10, 0.1, seed=2, retries=40,
                           threshold=desk_certificate_threshold(10))
    _, worst = certificate_margin(d, res.verts, res.threshold)
    assert worst >= res.threshold
    for x in range(d.n):
        assert (d.out_masks[x] & res.verts).bit_count() >= res.threshold
        assert (d.in_masks[x] & res.verts).bit_count() >= res.threshold


def test_reservoir_avoids_protected_set():
    d = gen_random_semidegree(80, 0.8, seed=4)
    protected = mask_of(range(20))
    res = sample_reservoir(d, protected, 8, 0.1, seed=7, retries=40,
                           threshold=1)
    assert not res.verts & protected


def test_reservoir_size_exceeds_pool():
    d = Digraph.complete(10)
    with pytest.raises(ValueError):
        sample_reservoir(d, mask_of(range(5)), 6, 0.1, seed=0)


def test_reservoir_connect_complete_direct():
    d = Digraph.complete(30)
    res = sample_reservoir(d, 0, 14, 0.1, seed=1)
    path = reservoir_connect(d, res, (0, 1), (2, 3))
    assert path == (0, 1, 2, 3)
    assert res.used_count == 0


def test_reservoir_connect_sequential_disjoint_interiors():
    d = gen_random_semidegree(500, 0.9, seed=12)
    size = 25
    res = sample_reservoir(d, 0, size, 0.1, seed=3, retries=40,
                           threshold=desk_certificate_threshold(size))
    rng = Random(5)
    all_interiors = 0
    for ab, cd in disjoint_arc_pairs(d, rng, 100):
        path = reservoir_connect(d, res, ab, cd)
        assert is_rs_path(d, path)
        interior = mask_of(path) & ~mask_of((*ab, *cd))
        assert not interior & all_interiors
        assert interior & res.verts == interior
        all_interiors |= interior
    assert res.used == all_interiors
    assert res.used_count <= size


def test_reservoir_connect_budget_precondition():
    d = Digraph.complete(30)
    res = sample_reservoir(d, 0, 14, 0.1, seed=1)
    res.used = res.verts
    with pytest.raises(ValueError):
        reservoir_connect(d, res, (0, 1), (2, 3), forbidden_budget=5)


def test_failure_reports_worst_margin():
    d = gen_random_semidegree(60, 0.75, seed=2)
    with pytest.raises(ReservoirFailure) as exc:
        sample_reservoir(d, 0, 6, 0.1, seed=1, retries=3)
    assert exc.value.worst_degree < exc.value.threshold
    assert 0 <= exc.value.worst_vertex < 60
