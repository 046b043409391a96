import pytest

from rsham.digraph import Digraph, gen_random_semidegree, mask_of
from rsham.errors import CoverFailure
from rsham.pathcover import greedy_path_cover
from rsham.paths import is_rs_path


def test_complete_digraph_single_path():
    d = Digraph.complete(30)
    cov = greedy_path_cover(d, 2, 0, seed=5)
    assert len(cov.paths) == 1
    assert len(cov.paths[0]) == 30
    assert not cov.leftover


def test_arcless_digraph_all_leftover():
    d = Digraph(6, (0,) * 6, (0,) * 6)
    cov = greedy_path_cover(d, 3, 6, seed=1)
    assert cov.paths == ()
    assert cov.leftover == frozenset(range(6))
    with pytest.raises(CoverFailure):
        greedy_path_cover(d, 3, 5, seed=1)


def test_random_dense_meets_budgets():
    d = gen_random_semidegree(300, 0.77, seed=9)
    cov = greedy_path_cover(d, 10, 6, seed=4)
    assert len(cov.paths) <= 10
    assert len(cov.leftover) <= 6
    for p in cov.paths:
        assert len(p) >= 4
        assert is_rs_path(d, p)


def test_partition_identity_and_disjointness():
    d = gen_random_semidegree(120, 0.78, seed=2)
    cov = greedy_path_cover(d, 8, 10, seed=3)
    seen = 0
    for p in cov.paths:
        pm = mask_of(p)
        assert not pm & seen
        seen |= pm
    assert not seen & mask_of(cov.leftover)
    assert seen | mask_of(cov.leftover) == d.full_mask


def test_scoped_cover_partitions_scope():
    d = gen_random_semidegree(90, 0.8, seed=6)
    scope = mask_of(range(10, 70))
    cov = greedy_path_cover(d, 6, 8, seed=1, vertices=scope)
    covered = mask_of([v for p in cov.paths for v in p])
    assert covered | mask_of(cov.leftover) == scope
    for p in cov.paths:
        assert is_rs_path(d, p)


def test_determinism():
    d = gen_random_semidegree(150, 0.78, seed=8)
    a = greedy_path_cover(d, 8, 8, seed=42)
    b = greedy_path_cover(d, 8, 8, seed=42)
    assert a.paths == b.paths and a.leftover == b.leftover


def test_cover_failure_carries_achieved_counts():
    d = gen_random_semidegree(60, 0.75, seed=3)
    with pytest.raises(CoverFailure) as exc:
        greedy_path_cover(d, 0, 0, seed=1)
    assert exc.value.paths >= 0
    assert exc.value.path_budget == 0


def test_merging_reduces_path_count():
    # tight path budget forces merges through leftover connectors
    d = gen_random_semidegree(200, 0.8, seed=14)
    cov = greedy_path_cover(d, 1, 12, seed=7)
    assert len(cov.paths) <= 1 or len(cov.leftover) <= 12
