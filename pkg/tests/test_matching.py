import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmedexact.matching import (
    CapacityError,
    WeightedGraph,
    brute_force_perfect_matching,
    min_weight_perfect_matching,
)


def k4(w=1):
    return WeightedGraph.from_edges(4, [(a, b, w) for a in range(4) for b in range(a + 1, 4)])


def random_graph(rng, v, p, wmax=100):
    edges = [(a, b, rng.randint(0, wmax)) for a in range(v) for b in range(a + 1, v) if rng.random() < p]
    return WeightedGraph(v, tuple(edges))


def test_k4_unit_weights():
    m = min_weight_perfect_matching(k4())
    assert m.weight == 2
    assert m.is_perfect(k4())


def test_empty_and_odd():
    assert min_weight_perfect_matching(WeightedGraph(0, ())).weight == 0
    assert min_weight_perfect_matching(WeightedGraph(3, ((0, 1, 1), (1, 2, 1)))) is None
    assert min_weight_perfect_matching(WeightedGraph(4, ((0, 1, 1), (0, 2, 1), (0, 3, 1)))) is None


def test_prefers_light_perfect_over_heavy():
    g = WeightedGraph.from_edges(4, [(0, 1, 0), (2, 3, 100), (0, 2, 1), (1, 3, 1)])
    assert min_weight_perfect_matching(g).weight == 2


def test_graph_validation():
    with pytest.raises(ValueError):
        WeightedGraph(2, ((1, 0, 1),))
    with pytest.raises(ValueError):
        WeightedGraph(2, ((0, 1, 1), (0, 1, 2)))
    with pytest.raises(ValueError):
        WeightedGraph(2, ((0, 1, -1),))
    assert WeightedGraph.from_edges(2, [(1, 0, 3)]).edges == ((0, 1, 3),)


def test_oracle_capacity():
    with pytest.raises(CapacityError):
        brute_force_perfect_matching(WeightedGraph(22, ()))


def test_oracle_equivalence_dense_and_sparse():
    rng = random.Random(7)
    for _ in range(300):
        v = rng.choice([2, 4, 6, 8, 10, 12])
        g = random_graph(rng, v, rng.choice([0.3, 0.6, 1.0]))
        a, b = min_weight_perfect_matching(g), brute_force_perfect_matching(g)
        assert (a is None) == (b is None)
        if a is not None:
            assert a.is_perfect(g)
            assert a.weight == b.weight


def test_deterministic():
    g = random_graph(random.Random(3), 10, 0.7)
    assert min_weight_perfect_matching(g) == min_weight_perfect_matching(g)


@st.composite
def graphs(draw):
    v = draw(st.sampled_from([2, 4, 6, 8]))
    edges = []
    for a in range(v):
        for b in range(a + 1, v):
            if draw(st.booleans()):
                edges.append((a, b, draw(st.integers(0, 50))))
    return WeightedGraph(v, tuple(edges))


@settings(max_examples=60, deadline=None)
@given(graphs(), st.integers(1, 5), st.integers(0, 30))
def test_scaling_and_shift(g, factor, c):
    base = min_weight_perfect_matching(g)
    scaled = min_weight_perfect_matching(WeightedGraph(g.v, tuple((a, b, w * factor) for a, b, w in g.edges)))
    shifted = min_weight_perfect_matching(WeightedGraph(g.v, tuple((a, b, w + c) for a, b, w in g.edges)))
    if base is None:
        assert scaled is None and shifted is None
    else:
        assert scaled.weight == factor * base.weight
        # every perfect matching has v/2 edges
        assert shifted.weight == base.weight + c * g.v // 2
