import math
import random

import pytest

from waypoint_tsp.construct import nearest_neighbor
from waypoint_tsp.core import build_distance_matrix, tour_length, validate_permutation
from waypoint_tsp.data import generate_dataset
from waypoint_tsp.localsearch import (
    IMPROVE_EPS,
    AnnealSchedule,
    Neighborhood,
    _iter_moves,
    acceptance_probability,
    apply_move,
    best_improvement_move,
    guided_local_search,
    hill_climb,
    move_delta,
    simulated_annealing,
    tabu_search,
)


def seeded(n, seed):
    return build_distance_matrix(generate_dataset(n, rng_seed=seed))


def test_neighborhood_validation():
    Neighborhood("two_opt")
    Neighborhood("adjacent_swap")
    Neighborhood("or_opt")
    with pytest.raises(ValueError):
        Neighborhood("three_opt")


def test_move_delta_matches_recompute():
    m = seeded(12, 4)
    order = list(nearest_neighbor(m).order)
    base = tour_length(order, m)
    for kind in ("two_opt", "adjacent_swap", "or_opt"):
        for move in _iter_moves(kind, 12):
            changed = apply_move(order, move, kind)
            validate_permutation(changed, 12)
            delta = move_delta(order, move, m.d, kind)
            assert tour_length(changed, m) - base == pytest.approx(delta, abs=1e-6), (kind, move)


def test_two_opt_reverses_segment():
    order = [0, 1, 2, 3, 4, 5]
    assert apply_move(order, (1, 3), "two_opt") == [0, 3, 2, 1, 4, 5]
    assert order == [0, 1, 2, 3, 4, 5]  # input untouched


def test_best_improvement_move_is_exhaustive():
    m = seeded(11, 8)
    order = list(nearest_neighbor(m).order)
    for kind in ("two_opt", "adjacent_swap", "or_opt"):
        found = best_improvement_move(order, m, Neighborhood(kind))
        deltas = [move_delta(order, mv, m.d, kind) for mv in _iter_moves(kind, 11)]
        best = min(deltas)
        if best < -IMPROVE_EPS:
            assert found is not None
            assert found[0] == pytest.approx(best, abs=1e-9)
        else:
            assert found is None


def test_hill_climb_terminates_at_local_optimum():
    for seed in range(5):
        m = seeded(15, seed)
        start = nearest_neighbor(m)
        tour, trace = hill_climb(start, m, Neighborhood("two_opt"))
        assert tour.length_m <= start.length_m
        assert trace.is_monotone()
        assert best_improvement_move(list(tour.order), m, Neighborhood("two_opt")) is None


def test_hill_climb_other_neighborhoods():
    m = seeded(13, 3)
    start = nearest_neighbor(m)
    for kind in ("adjacent_swap", "or_opt"):
        tour, _ = hill_climb(start, m, Neighborhood(kind))
        validate_permutation(tour.order, 13)
        assert tour.length_m <= start.length_m


def test_acceptance_probability_formula():
    assert acceptance_probability(-5.0, 2.0) == 1.0
    assert acceptance_probability(0.0, 2.0) == 1.0
    assert acceptance_probability(3.0, 2.0) == pytest.approx(math.exp(-1.5), abs=1e-15)
    with pytest.raises(ValueError):
        acceptance_probability(1.0, 0.0)


def test_schedule_temperature_is_pow():
    sched = AnnealSchedule(t0=2.0, alpha=0.97)
    for k in (0, 1, 7, 500, 4999):
        assert sched.temperature_at(k) == 2.0 * 0.97**k


def test_schedule_validation():
    with pytest.raises(ValueError):
        AnnealSchedule(t0=0.0)
    with pytest.raises(ValueError):
        AnnealSchedule(alpha=1.5)


def test_simulated_annealing_basics():
    m = seeded(20, 1)
    start = nearest_neighbor(m)
    tour, trace = simulated_annealing(start, m, rng_seed=5, max_iters=4000)
    validate_permutation(tour.order, 20)
    assert tour.length_m <= start.length_m  # best-seen is returned
    assert trace.is_monotone()
    again, _ = simulated_annealing(start, m, rng_seed=5, max_iters=4000)
    assert again.order == tour.order
    assert again.length_m == tour.length_m


def test_simulated_annealing_two_point_input():
    m = seeded(2, 0)
    start = nearest_neighbor(m)
    tour, trace = simulated_annealing(start, m, rng_seed=0)
    assert tour.order == start.order
    assert len(trace.samples) == 1


def test_tabu_search_improves_and_repeats():
    m = seeded(18, 6)
    start = nearest_neighbor(m)
    tour, trace = tabu_search(start, m, rng_seed=2, max_iters=200)
    validate_permutation(tour.order, 18)
    assert tour.length_m <= start.length_m
    assert trace.is_monotone()
    again, _ = tabu_search(start, m, rng_seed=2, max_iters=200)
    assert again.order == tour.order


def test_tabu_tenure_validation():
    m = seeded(8, 0)
    with pytest.raises(ValueError):
        tabu_search(nearest_neighbor(m), m, tenure=0)


def test_guided_local_search_never_loses_to_plain_descent():
    for seed in range(4):
        m = seeded(16, seed)
        start = nearest_neighbor(m)
        hc_tour, _ = hill_climb(start, m, Neighborhood("two_opt"))
        gls_tour, trace = guided_local_search(start, m, rng_seed=0, max_iters=20)
        assert gls_tour.length_m <= hc_tour.length_m + 1e-9
        assert trace.is_monotone()


def test_metaheuristics_beat_diagonal_square(square):
    # From the crossed order, every method should uncross to the perimeter.
    crossed = square
    from waypoint_tsp.core import make_tour

    start = make_tour([0, 2, 1, 3], crossed)
    for run in (
        lambda: hill_climb(start, crossed, Neighborhood("two_opt"))[0],
        lambda: simulated_annealing(start, crossed, rng_seed=1)[0],
        lambda: tabu_search(start, crossed, rng_seed=1, max_iters=50)[0],
        lambda: guided_local_search(start, crossed, rng_seed=1, max_iters=10)[0],
    ):
        assert run().length_m == 4.0


def test_random_move_shapes():
    from waypoint_tsp.localsearch import _random_move

    rng = random.Random(0)
    for kind in ("two_opt", "adjacent_swap", "or_opt"):
        for _ in range(200):
            move = _random_move(kind, 6, rng)
            order = apply_move(list(range(6)), move, kind)
            validate_permutation(order, 6)
