import math
import random

import pytest

from kmedexact import generate
from kmedexact.exact import (
    InvariantViolation,
    UnsupportedObjective,
    brute_force_solve,
    build_auxiliary_graph,
    count_guesses,
    decode_matching,
    enumerate_guesses,
    guess_shapes,
    solve_exact,
)
from kmedexact.matching import min_weight_perfect_matching
from kmedexact.metric import CapacityError, MetricInstance, Objective, evaluate_cost


def test_guess_counts():
    assert count_guesses(6, 2) == 27
    assert sum(1 for _ in enumerate_guesses(6, 2)) == 27
    assert count_guesses(1, 1) == 1
    assert count_guesses(4, 4) == 1


def test_shape_pruning():
    for n in range(1, 12):
        for k in range(1, n + 1):
            for k1, k2, k3 in guess_shapes(n, k):
                s = n - k3 - 2 * k2 - k1
                assert (s == 0) if k3 == 0 else s >= 2 * k3
            assert count_guesses(n, k) == sum(math.comb(n, k3) for *_, k3 in guess_shapes(n, k))


def test_guesses_in_mask_order():
    masks = [sum(1 << c for c in g.centers) for g in enumerate_guesses(7, 1) if g.k3 == 1]
    assert masks == sorted(masks)


def test_small_examples():
    two = MetricInstance.from_matrix([[0, 5], [5, 0]])
    assert solve_exact(two, 1, Objective.means()).cost == 25
    assert solve_exact(two, 2).cost == 0
    path = MetricInstance.from_matrix([[abs(i - j) for j in range(5)] for i in range(5)])
    assert solve_exact(path, 1).cost == 6
    assert solve_exact(path, 2).cost == brute_force_solve(path, 2)[1]


def test_center_objective_rejected():
    with pytest.raises(UnsupportedObjective):
        solve_exact(MetricInstance.from_matrix([[0]]), 1, Objective.center())


def test_brute_capacity():
    inst = generate.grid_l1(17, random.Random(0))
    with pytest.raises(CapacityError):
        brute_force_solve(inst, 2)


@pytest.mark.parametrize("model", ["grid-l1", "closure"])
@pytest.mark.parametrize("obj", [Objective.median(), Objective.means(), Objective.power(3)])
def test_matches_brute_force(model, obj):
    rng = random.Random(hash((model, obj.name)) % 1000)
    for _ in range(12):
        n = rng.randint(1, 8)
        inst = generate.random_instance(model, n, rng)
        for k in range(1, n + 1):
            res = solve_exact(inst, k, obj)
            assert res.cost == brute_force_solve(inst, k, obj)[1]
            assert evaluate_cost(inst, res.clustering, obj) == res.cost
            assert res.clustering.k == k


def test_asymmetric_matches_brute_force():
    rng = random.Random(99)
    for _ in range(25):
        n = rng.randint(1, 7)
        inst = generate.asymmetric(n, rng)
        for k in range(1, n + 1):
            assert solve_exact(inst, k).cost == brute_force_solve(inst, k)[1]


def test_pruning_does_not_change_optimum():
    rng = random.Random(5)
    for _ in range(10):
        inst = generate.closure(7, rng)
        for k in range(1, 8):
            assert solve_exact(inst, k).cost == solve_exact(inst, k, prune=False).cost


def test_every_guess_decodes_to_matching_weight():
    rng = random.Random(11)
    inst = generate.grid_l1(7, rng)
    for k in range(1, 8):
        for g in enumerate_guesses(7, k):
            aux = build_auxiliary_graph(inst, g, Objective.median())
            m = min_weight_perfect_matching(aux.graph)
            assert m is not None
            cl = decode_matching(g, aux, m, inst)
            assert evaluate_cost(inst, cl, Objective.median()) == m.weight


def test_auxiliary_vertex_count():
    inst = generate.grid_l1(9, random.Random(2))
    for g in enumerate_guesses(9, 3):
        aux = build_auxiliary_graph(inst, g, Objective.median())
        expected = g.k3 * g.s + (9 - g.k3) + g.k1 + g.s * max(g.k3 - 1, 0)
        assert aux.graph.v == expected


def test_parallel_equals_serial():
    rng = random.Random(8)
    inst = generate.grid_l1(10, rng, side=20, distinct=True)
    a = solve_exact(inst, 3, workers=1, chunk_size=16)
    b = solve_exact(inst, 3, workers=3, chunk_size=16)
    assert a.cost == b.cost
    assert a.clustering == b.clustering
    assert a.stats.guesses_explored == b.stats.guesses_explored == count_guesses(10, 3)


def test_early_stop_on_zero_cost():
    inst = MetricInstance.from_matrix([[0, 0, 4], [0, 0, 4], [4, 4, 0]])
    res = solve_exact(inst, 2)
    assert res.cost == 0
    assert res.stats.guesses_explored <= count_guesses(3, 2)


def test_invariant_violation_is_runtime_error():
    assert issubclass(InvariantViolation, RuntimeError)
