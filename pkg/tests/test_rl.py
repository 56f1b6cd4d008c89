import random

import numpy as np
import pytest

from waypoint_tsp.core import build_distance_matrix, tour_length, validate_permutation
from waypoint_tsp.data import generate_dataset
from waypoint_tsp.rl import (
    BudgetExhaustedError,
    EpisodeLog,
    RlConfig,
    double_q_update,
    epsilon_greedy,
    new_q_table,
    q_update,
    reward,
    train_double_q,
    train_q,
)


def matrix(n, seed=0):
    return build_distance_matrix(generate_dataset(n, rng_seed=seed))


def test_reward_is_negative_distance():
    d = np.array([[0.0, 10.0], [10.0, 0.0]])
    assert reward(d, 0, 1) == -10.0
    assert reward(np.zeros((2, 2)), 0, 1) == 0.0
    d2 = np.array([[0.0, 123.4], [123.4, 0.0]])
    assert reward(d2, 0, 1) == -123.4


def test_reward_inverse_mode():
    d = np.array([[0.0, 4.0], [4.0, 0.0]])
    assert reward(d, 0, 1, mode="inverse_distance") == 0.25
    assert reward(np.zeros((2, 2)), 0, 1, mode="inverse_distance") == 1.0
    with pytest.raises(ValueError):
        reward(d, 0, 1, mode="sqrt")


def test_q_update_worked_example():
    # All-zero table, alpha 0.01, gamma 0.95, r = -100: new entry is -1.0.
    q = new_q_table(5)
    got = q_update(q, 0, 2, -100.0, 2, [1, 3, 4], alpha=0.01, gamma=0.95)
    assert got == -1.0
    assert q[0, 2] == -1.0


def test_q_update_alpha_extremes():
    q = new_q_table(4)
    q[1, 2] = -7.0
    assert q_update(q, 1, 2, -50.0, 2, [3], alpha=0.0, gamma=0.9) == -7.0
    q2 = new_q_table(4)
    q2[1, 2] = -7.0
    assert q_update(q2, 1, 2, -50.0, 2, [3], alpha=1.0, gamma=0.0) == -50.0


def test_q_update_terminal_bootstraps_return_to_start():
    q = new_q_table(3)
    q[2, 0] = -4.0  # value of the closing edge from the successor state
    q_update(q, 1, 2, -10.0, 2, [], alpha=1.0, gamma=0.5, start=0)
    assert q[1, 2] == -10.0 + 0.5 * -4.0


def test_double_q_update_cross_valuation():
    qa = new_q_table(4)
    qb = new_q_table(4)
    # qb zero everywhere: update of A reduces to qa += alpha * (r - qa).
    double_q_update(qa, qb, True, 0, 1, -10.0, 1, [2, 3], alpha=0.5, gamma=0.5)
    assert qa[0, 1] == -5.0
    assert np.all(qb == 0.0)


def test_double_q_update_worked_example():
    qa = new_q_table(4)
    qb = new_q_table(4)
    # qa all zero means its argmax over {2, 3} picks index 2; qb values it.
    qb[1, 2] = -4.0
    double_q_update(qa, qb, True, 0, 1, -10.0, 1, [2, 3], alpha=0.5, gamma=0.5)
    assert qa[0, 1] == 0.5 * (-10.0 + 0.5 * -4.0)


def test_double_q_update_alpha_zero():
    qa, qb = new_q_table(3), new_q_table(3)
    double_q_update(qa, qb, False, 0, 1, -9.0, 1, [2], alpha=0.0, gamma=1.0)
    assert np.all(qa == 0.0) and np.all(qb == 0.0)


def test_epsilon_greedy_exploit_and_forced():
    q_row = np.array([0.0, -5.0, -1.0, -3.0])
    rng = random.Random(0)
    assert epsilon_greedy(q_row, [1, 2, 3], epsilon=0.0, rng=rng) == 2
    # Ties go to the earliest list entry; with the ascending lists the
    # trainer builds that is the lowest city index.
    assert epsilon_greedy(np.zeros(4), [3, 1, 2], epsilon=0.0, rng=rng) == 3
    assert epsilon_greedy(np.zeros(4), [1, 2, 3], epsilon=0.0, rng=rng) == 1
    assert epsilon_greedy(q_row, [3], epsilon=1.0, rng=rng) == 3
    with pytest.raises(ValueError):
        epsilon_greedy(q_row, [], epsilon=0.5, rng=rng)


def test_epsilon_greedy_explores_uniformly():
    q_row = np.array([0.0, -5.0, -1.0, -3.0, -2.0])
    rng = random.Random(42)
    counts = {1: 0, 2: 0, 3: 0, 4: 0}
    draws = 10_000
    for _ in range(draws):
        counts[epsilon_greedy(q_row, [1, 2, 3, 4], epsilon=1.0, rng=rng)] += 1
    expected = draws / 4
    sigma = (draws * 0.25 * 0.75) ** 0.5
    for c in counts.values():
        assert abs(c - expected) <= 3 * sigma


def test_config_validation():
    RlConfig(alpha=0.0)
    RlConfig(alpha=1.0)
    with pytest.raises(ValueError):
        RlConfig(alpha=1.5)
    with pytest.raises(ValueError):
        RlConfig(gamma=-0.1)
    with pytest.raises(ValueError):
        RlConfig(epsilon=2.0)
    with pytest.raises(ValueError):
        RlConfig(epsilon_decay=0.0)
    with pytest.raises(ValueError):
        RlConfig(episodes=0)
    with pytest.raises(ValueError):
        RlConfig(reward_mode="bonus")
    with pytest.raises(ValueError):
        RlConfig(decay_scope="hourly")
    with pytest.raises(ValueError):
        RlConfig(eval_sweep="sometimes")


def test_train_q_determinism():
    m = matrix(9, seed=2)
    t1, log1, q1 = train_q(m, RlConfig(episodes=120), rng_seed=11)
    t2, log2, q2 = train_q(m, RlConfig(episodes=120), rng_seed=11)
    assert t1.order == t2.order
    assert t1.length_m == t2.length_m
    assert log1.to_csv() == log2.to_csv()
    assert np.array_equal(q1, q2)


def test_train_q_reward_accounting():
    m = matrix(10, seed=4)
    _, log, _ = train_q(m, RlConfig(episodes=200), rng_seed=3)
    assert len(log.episodes) == 200
    for episode, total_reward, tour_len, _ in log.episodes:
        assert total_reward == -tour_len


def test_train_q_epsilon_floor():
    m = matrix(8, seed=1)
    cfg = RlConfig(episodes=150, epsilon_min=0.25)
    _, log, _ = train_q(m, cfg, rng_seed=0)
    eps = [row[3] for row in log.episodes]
    assert all(a >= b for a, b in zip(eps, eps[1:]))
    assert min(eps) >= 0.25
    assert eps[-1] == 0.25  # long enough run pins the floor


def test_decay_scope_episode_is_slower():
    m = matrix(8, seed=1)
    _, log_step, _ = train_q(m, RlConfig(episodes=30), rng_seed=0)
    _, log_ep, _ = train_q(m, RlConfig(episodes=30, decay_scope="episode"), rng_seed=0)
    # After one episode: one decay vs n decays.
    assert log_ep.episodes[0][3] == 0.99 * 0.995
    assert log_step.episodes[0][3] == pytest.approx(0.99 * 0.995**8, abs=1e-15)
    assert log_ep.episodes[5][3] > log_step.episodes[5][3]


def test_train_q_three_cities_is_the_unique_cycle():
    m = matrix(3, seed=6)
    tour, _, _ = train_q(m, RlConfig(episodes=5), rng_seed=0)
    expected = float(m.d[0, 1]) + float(m.d[1, 2]) + float(m.d[2, 0])
    assert tour.length_m == expected


def test_train_rejects_tiny_instances():
    m = matrix(2, seed=0)
    with pytest.raises(ValueError, match="at least 3"):
        train_q(m, RlConfig(episodes=5))


def test_train_q_alpha_zero_leaves_table_untouched():
    m = matrix(7, seed=3)
    _, _, table = train_q(m, RlConfig(alpha=0.0, episodes=40), rng_seed=5)
    assert np.all(table == 0.0)


def test_train_q_budget_exhausted():
    m = matrix(30, seed=2)
    with pytest.raises(BudgetExhaustedError):
        train_q(m, RlConfig(episodes=50), rng_seed=0, time_budget_ms=1e-6)


def test_eval_sweep_never_hurts():
    m = matrix(12, seed=9)
    plain, _, _ = train_q(m, RlConfig(episodes=300, eval_sweep="none"), rng_seed=1)
    swept, _, _ = train_q(m, RlConfig(episodes=300), rng_seed=1)
    assert swept.length_m <= plain.length_m
    validate_permutation(swept.order, 12)


def test_train_double_q_runs_and_repeats():
    m = matrix(9, seed=5)
    t1, log1, table = train_double_q(m, RlConfig(episodes=150), rng_seed=8)
    t2, log2, _ = train_double_q(m, RlConfig(episodes=150), rng_seed=8)
    validate_permutation(t1.order, 9)
    assert t1.order == t2.order
    assert log1.to_csv() == log2.to_csv()
    for _, total_reward, tour_len, _ in log1.episodes:
        assert total_reward == -tour_len


def test_trace_records_are_monotone():
    from waypoint_tsp.core import SolveTrace

    m = matrix(10, seed=7)
    trace = SolveTrace()
    tour, _, _ = train_q(m, RlConfig(episodes=100), rng_seed=2, trace=trace)
    assert trace.is_monotone()
    assert trace.samples[-1][1] == tour.length_m


def test_episode_log_csv_shape(tmp_path):
    log = EpisodeLog()
    log.append(0, -12.5, 12.5, 0.99)
    log.append(1, -11.25, 11.25, 0.9801)
    text = log.to_csv()
    lines = text.splitlines()
    assert lines[0] == "episode,reward,tour_len_m,epsilon"
    assert lines[1] == "0,-12.5,12.5,0.99"
    path = tmp_path / "log.csv"
    log.save(str(path))
    assert path.read_text() == text


def test_greedy_rollout_matches_manual_argmax():
    m = matrix(6, seed=8)
    _, _, table = train_q(m, RlConfig(episodes=100), rng_seed=4)
    from waypoint_tsp.rl import _greedy_rollout

    order = _greedy_rollout(lambda c: table[c], 6, 0)
    validate_permutation(order, 6)
    # Recompute by hand.
    manual = [0]
    seen = {0}
    cur = 0
    while len(manual) < 6:
        best, best_v = None, None
        for c in range(6):
            if c in seen:
                continue
            v = table[cur, c]
            if best_v is None or v > best_v:
                best, best_v = c, v
        manual.append(best)
        seen.add(best)
        cur = best
    assert order == manual
