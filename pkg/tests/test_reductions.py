import random

import pytest

from kmedexact import generate
from kmedexact.exact import brute_force_solve
from kmedexact.facility import brute_force_fl, solve_fl
from kmedexact.metric import CapacityError, MetricInstance, Objective
from kmedexact.reductions import (
    ReductionError,
    SetSystem,
    SimpleGraph,
    brute_force_dominating_set,
    brute_force_set_cover,
    check_domset_property,
    check_setcover_property,
    domset_to_kmedian,
    kcenter_by_threshold,
    setcover_to_fl,
    threshold_graph,
)

P4 = SimpleGraph(4, ((0, 1), (1, 2), (2, 3)))


def test_p4_distances_and_cost():
    inst = domset_to_kmedian(P4)
    assert inst.dist[0] == (0, 1, 2, 3)
    assert brute_force_solve(inst, 2)[1] == 2
    assert brute_force_dominating_set(P4)[0] == 2


def test_star_has_unit_domination():
    star = SimpleGraph(5, tuple((0, i) for i in range(1, 5)))
    assert brute_force_dominating_set(star) == (1, (0,))
    assert check_domset_property(star, 1).ok


def test_disconnected_rejected():
    with pytest.raises(ReductionError):
        domset_to_kmedian(SimpleGraph(3, ((0, 1),)))


def test_domset_property_random():
    rng = random.Random(1)
    for _ in range(40):
        g = generate.connected_graph(rng.randint(1, 7), rng)
        for k in range(1, g.n + 1):
            assert check_domset_property(g, k).ok


def test_domset_check_capacity():
    with pytest.raises(CapacityError):
        check_domset_property(generate.connected_graph(10, random.Random(0)), 2)


def test_graph_normalization():
    g = SimpleGraph(3, ((2, 0), (1, 0)))
    assert g.edges == ((0, 2), (0, 1))
    with pytest.raises(ValueError):
        SimpleGraph(2, ((0, 1), (1, 0)))
    with pytest.raises(ValueError):
        SimpleGraph(2, ((0, 0),))


def test_setcover_two_singletons():
    s = SetSystem(2, ((0,), (1,)), 1)
    inst = setcover_to_fl(s)
    assert inst.dist == ((1, 3), (3, 1))
    assert solve_fl(inst).cost == 4
    assert check_setcover_property(s).ok
    assert check_setcover_property(SetSystem(2, s.sets, 2)).ok


def test_setcover_incidence_distances():
    s = SetSystem(3, ((0, 1), (1, 2)), 1)
    assert setcover_to_fl(s).dist == ((1, 3), (1, 1), (3, 1))
    assert brute_force_set_cover(s) == (0, 1)


def test_uncovered_element_rejected():
    with pytest.raises(ReductionError):
        setcover_to_fl(SetSystem(3, ((0,), (1,)), 1))


def test_setcover_property_random():
    rng = random.Random(2)
    for _ in range(40):
        n, m = rng.randint(1, 8), rng.randint(1, 5)
        s = generate.covering_system(n, m, rng.randint(1, m), rng)
        rep = check_setcover_property(s)
        assert rep.ok, rep.details
        assert brute_force_fl(setcover_to_fl(s))[1] >= n


def test_threshold_graph():
    inst = MetricInstance.from_matrix([[0, 1, 5], [1, 0, 2], [5, 2, 0]])
    assert threshold_graph(inst, 1).edges == ((0, 1),)
    assert threshold_graph(inst, 2).edges == ((0, 1), (1, 2))
    with pytest.raises(ValueError):
        threshold_graph(MetricInstance.from_matrix([[0, 1], [2, 0]], symmetric=False), 1)


def test_kcenter_equivalence_small():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(1, 7)
        inst = generate.random_instance(rng.choice(["grid-l1", "closure"]), n, rng)
        for k in range(1, n + 1):
            assert brute_force_solve(inst, k, Objective.center())[1] == kcenter_by_threshold(inst, k)
