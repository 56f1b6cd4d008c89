import math

import pytest

from waypoint_tsp.landscape import (
    GRID_MAX,
    STEP,
    WalkTrace,
    get_landscape,
    hc_walk,
    objective_multi,
    objective_single,
    sa_walk,
    snap_to_grid,
)


def test_single_peak_objective():
    assert objective_single(0.0, 0.0) == 0.0
    assert objective_single(1.0, 0.0) == -1.0
    assert objective_single(0.5, -0.5) == -0.5
    assert objective_single(1.0, 1.0) == -2.0


def test_multi_peak_objective_known_points():
    # cos(0) terms cancel the 0.2 offset exactly at the origin.
    assert objective_multi(0.0, 0.0) == 0.0
    assert objective_multi(0.5, 0.0) == -0.45000000000000007
    assert objective_multi(0.8, -0.5) == -1.2709016994374949
    assert objective_multi(0.05, 0.0) == -0.043721474770752694


def test_multi_peak_is_single_plus_ripple():
    for x1, x2 in ((0.3, -0.7), (0.05, 0.0), (-1.0, 1.0)):
        expected = -(
            0.2
            + x1 * x1
            + x2 * x2
            - 0.1 * math.cos(6.0 * math.pi * x1)
            - 0.1 * math.cos(6.0 * math.pi * x2)
        )
        assert objective_multi(x1, x2) == expected


def test_get_landscape_aliases():
    assert get_landscape("single").kind == get_landscape("single_peak").kind
    assert get_landscape("multi").kind == get_landscape("multi_peak").kind
    with pytest.raises(ValueError):
        get_landscape("plateau")


def test_snap_to_grid():
    assert snap_to_grid(0.0) == 0
    assert snap_to_grid(1.0) == 20
    assert snap_to_grid(-0.05) == -1
    with pytest.raises(ValueError):
        snap_to_grid(0.07)
    with pytest.raises(ValueError):
        snap_to_grid((GRID_MAX + 1) * STEP)


def test_hc_single_peak_walks_straight_home():
    trace = hc_walk(get_landscape("single"), (0.0, 1.0))
    assert len(trace.steps) - 1 == 20  # one grid step per move, 20 moves
    assert trace.final.objective == 0.0
    assert (trace.final.x1, trace.final.x2) == (0.0, 0.0)


def test_hc_stops_at_peak_immediately():
    trace = hc_walk(get_landscape("single"), (0.0, 0.0))
    assert len(trace.steps) == 1
    assert trace.final.objective == 0.0


def test_hc_multi_peak_gets_stuck_locally():
    trace = hc_walk(get_landscape("multi"), (0.8, -0.5))
    assert trace.final.objective == pytest.approx(-0.53649264893299, abs=1e-12)
    assert trace.final.objective < -0.05


def test_hc_rejects_off_grid_start():
    with pytest.raises(ValueError):
        hc_walk(get_landscape("single"), (0.03, 0.0))


def test_walk_positions_stay_in_bounds():
    trace = sa_walk(get_landscape("multi"), (0.8, -0.5), rng_seed=3, max_iters=3000)
    for step in trace.steps:
        assert abs(step.x1) <= GRID_MAX * STEP + 1e-12
        assert abs(step.x2) <= GRID_MAX * STEP + 1e-12


def test_sa_walk_determinism_and_schedule():
    a = sa_walk(get_landscape("single"), (0.0, 1.0), rng_seed=7, max_iters=500)
    b = sa_walk(get_landscape("single"), (0.0, 1.0), rng_seed=7, max_iters=500)
    assert a.to_csv() == b.to_csv()
    first = a.steps[0]
    assert (first.iteration, first.x1, first.x2) == (0, 0.0, 1.0)
    assert first.temperature == 1.0
    assert first.acceptance_prob == 1.0
    for k in (1, 100, 499):
        assert a.steps[k].temperature == 1.0 * 0.99**k


def test_sa_walk_records_every_iteration():
    trace = sa_walk(get_landscape("multi"), (0.0, 0.0), rng_seed=0, max_iters=250)
    assert len(trace.steps) == 251
    assert [s.iteration for s in trace.steps] == list(range(251))


def test_walk_csv_format(tmp_path):
    trace = sa_walk(get_landscape("single"), (0.0, 1.0), rng_seed=1, max_iters=5)
    text = trace.to_csv()
    lines = text.splitlines()
    assert lines[0] == "iteration,x1,x2,objective,temperature,acceptance_prob"
    assert len(lines) == 7
    path = tmp_path / "walk.csv"
    trace.save(str(path))
    assert path.read_text() == text
    # Hill-climb traces leave the SA-only columns blank.
    hc_text = hc_walk(get_landscape("single"), (0.0, 1.0)).to_csv()
    assert hc_text.splitlines()[1].endswith(",,")


def test_walk_trace_final_is_last_step():
    trace = hc_walk(get_landscape("single"), (0.0, 1.0))
    assert isinstance(trace, WalkTrace)
    assert trace.final is trace.steps[-1]
