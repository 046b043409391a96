from itertools import permutations
from random import Random

import pytest

from rsham.digraph import Digraph, gen_extremal, gen_random_semidegree
from rsham.oracle import (ABSENT, EXHAUSTED, FOUND, SearchBudget,
                          bf_connect, bf_count_absorbers,
                          bf_disjoint_triangles, bf_rs_hamiltonian_cycle,
                          directed_triangles)
from rsham.paths import is_absorber, is_directed_triangle, is_rs_cycle, is_rs_path


def naive_absorber_count(d, v):
    """Second, independently coded quadruple loop (double-implementation check)."""
    count = 0
    for t in permutations([u for u in range(d.n) if u != v], 4):
        if is_absorber(d, t, v):
            count += 1
    return count


def test_budget_validation():
    with pytest.raises(ValueError):
        SearchBudget(max_nodes=0)
    with pytest.raises(ValueError):
        SearchBudget(time_cap=-1)


def test_ham_cyclic_triangle():
    d = Digraph.from_arcs(3, [(0, 1), (1, 2), (2, 0)])
    res = bf_rs_hamiltonian_cycle(d)
    assert res.status == FOUND
    assert is_rs_cycle(d, res.witness)


def test_ham_extremal_two_absent():
    res = bf_rs_hamiltonian_cycle(gen_extremal(2))
    assert res.status == ABSENT


def test_ham_complete_eight():
    d = Digraph.complete(8)
    res = bf_rs_hamiltonian_cycle(d)
    assert res.status == FOUND
    assert is_rs_cycle(d, res.witness)
    assert len(res.witness) == 8


def test_ham_too_small():
    with pytest.raises(ValueError):
        bf_rs_hamiltonian_cycle(Digraph.complete(2))


def test_ham_budget_exhaustion():
    d = Digraph.complete(9)
    res = bf_rs_hamiltonian_cycle(d, SearchBudget(max_nodes=2, time_cap=60))
    assert res.status == EXHAUSTED


def test_ham_absence_invariant_under_relabeling():
    rng = Random(5)
    base = gen_extremal(2)
    perm = list(range(6))
    for _ in range(5):
        rng.shuffle(perm)
        relabeled = Digraph.from_arcs(6, [(perm[u], perm[v]) for u, v in base.arcs()])
        assert bf_rs_hamiltonian_cycle(relabeled).status == ABSENT


def test_count_absorbers_complete():
    for m in (4, 5, 6):
        d = Digraph.complete(m + 1)
        assert bf_count_absorbers(d, 0) == m * (m - 1) * (m - 2) * (m - 3)


def test_count_absorbers_exact_instance():
    arcs = [(0, 1), (1, 2), (2, 3), (2, 0), (3, 1),
            (1, 4), (4, 2), (4, 0), (2, 1), (3, 4)]
    d = Digraph.from_arcs(5, arcs)
    # regression fixture: the designed absorber is the only one
    assert bf_count_absorbers(d, 4) == 1


def test_count_absorbers_double_implementation():
    rng = Random(11)
    for n in (6, 7, 8, 9):
        d = gen_random_semidegree(n, 0.7, seed=rng.randrange(10 ** 9))
        for v in range(n):
            assert bf_count_absorbers(d, v) == naive_absorber_count(d, v)


def test_connect_complete_direct():
    d = Digraph.complete(6)
    res = bf_connect(d, (0, 1), (2, 3), max_order=10)
    assert res.status == FOUND
    assert res.witness == (0, 1, 2, 3)


def test_connect_unreachable():
    # no arc leaves {0,1} except 1->0
    arcs = [(0, 1), (1, 0), (2, 3), (3, 2), (2, 0), (3, 1)]
    d = Digraph.from_arcs(4, arcs)
    res = bf_connect(d, (0, 1), (2, 3), max_order=10)
    assert res.status == ABSENT


def test_connect_random_dense_verified():
    d = gen_random_semidegree(20, 0.8, seed=3)
    rng = Random(1)
    found = 0
    while found < 10:
        a = rng.randrange(20)
        b = rng.choice([v for v in range(20) if d.has_arc(a, v)])
        c, dd = None, None
        for c_try in range(20):
            if c_try in (a, b):
                continue
            opts = [v for v in range(20) if v not in (a, b, c_try) and d.has_arc(c_try, v)]
            if opts:
                c, dd = c_try, opts[0]
                break
        res = bf_connect(d, (a, b), (c, dd), max_order=12)
        assert res.status == FOUND
        assert is_rs_path(d, res.witness)
        assert res.witness[:2] == (a, b) and res.witness[-2:] == (c, dd)
        found += 1


def test_connect_is_shortest():
    # order 4 impossible (no arc 1->2), order 5 available through 4
    arcs = [(0, 1), (2, 3), (1, 4), (4, 2), (4, 0), (2, 1), (3, 4)]
    d = Digraph.from_arcs(5, arcs)
    res = bf_connect(d, (0, 1), (2, 3), max_order=8)
    assert res.status == FOUND
    assert res.witness == (0, 1, 4, 2, 3)


def test_connect_precondition_errors():
    d = Digraph.complete(6)
    with pytest.raises(ValueError):
        bf_connect(d, (0, 1), (1, 2), max_order=8)
    e = Digraph.from_arcs(4, [(0, 1), (2, 3)])
    with pytest.raises(ValueError):
        bf_connect(e, (1, 0), (2, 3), max_order=8)


def test_disjoint_triangles_extremal():
    d = gen_extremal(2)
    assert bf_disjoint_triangles(d, 2).status == ABSENT
    one = bf_disjoint_triangles(d, 1)
    assert one.status == FOUND
    # the found triangle lies in the complete part
    assert all(v < 3 for v in one.witness[0])


def test_disjoint_triangles_complete_nine():
    res = bf_disjoint_triangles(Digraph.complete(9), 3)
    assert res.status == FOUND
    assert len(res.witness) == 3
    seen = set()
    d = Digraph.complete(9)
    for t in res.witness:
        assert is_directed_triangle(d, t) or is_directed_triangle(d, (t[0], t[2], t[1]))
        assert not seen & set(t)
        seen |= set(t)


def test_disjoint_triangles_budget():
    res = bf_disjoint_triangles(Digraph.complete(12), 4, SearchBudget(max_nodes=1))
    assert res.status == EXHAUSTED


def test_disjoint_triangles_infeasible_k():
    with pytest.raises(ValueError):
        bf_disjoint_triangles(Digraph.complete(5), 2)


def test_directed_triangles_counts():
    assert len(directed_triangles(Digraph.complete(4))) == 4
    d = Digraph.from_arcs(3, [(0, 1), (0, 2), (1, 2)])
    assert directed_triangles(d) == []
