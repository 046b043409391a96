from random import Random

import hypothesis.strategies as st
import pytest

from rsham.digraph import Digraph


@st.composite
def digraphs(draw, min_n=3, max_n=7):
    """Small digraphs drawn as arbitrary arc subsets."""
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    arcs = draw(st.sets(st.sampled_from(pairs)))
    return Digraph.from_arcs(n, sorted(arcs))


@st.composite
def dense_digraphs(draw, min_n=6, max_n=12, p_min=0.5, p_max=0.95):
    """Seeded random dense digraphs (better odds of reverse-square structure)."""
    n = draw(st.integers(min_n, max_n))
    p = draw(st.floats(p_min, p_max))
    seed = draw(st.integers(0, 2 ** 20))
    rng = Random(seed)
    arcs = [(u, v) for u in range(n) for v in range(n)
            if u != v and rng.random() < p]
    return Digraph.from_arcs(n, arcs)


def random_rs_path(d: Digraph, rng: Random, min_order=4, tries=200):
    """Grow a reverse-square path greedily from a random arc, or None."""
    for _ in range(tries):
        u = rng.randrange(d.n)
        outs = [v for v in range(d.n) if d.has_arc(u, v)]
        if not outs:
            continue
        seq = [u, rng.choice(outs)]
        used = set(seq)
        while True:
            cands = [w for w in range(d.n)
                     if w not in used and d.has_arc(seq[-1], w) and d.has_arc(w, seq[-2])]
            if not cands:
                break
            w = rng.choice(cands)
            seq.append(w)
            used.add(w)
        if len(seq) >= min_order:
            return tuple(seq)
    return None


@pytest.fixture
def rng():
    return Random(0xC0FFEE)
