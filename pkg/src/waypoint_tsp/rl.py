"""Tabular Q-learning and double Q-learning for closed tours.

States are cities, actions are "move to city". An episode visits every city
once from a fixed start and then takes the forced closing edge back. Each
edge taken yields reward = -distance (meters), so an episode's summed reward
is exactly the negative of the tour length: both are accumulated edge by edge
in the same visit order, and IEEE negation distributes over addition bit for
bit.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import DistanceMatrix, SolveTrace, Tour, make_tour, tour_length
from .ioutil import atomic_write_text

REWARD_MODES = ("neg_distance", "inverse_distance")


class BudgetExhaustedError(RuntimeError):
    """Raised when the wall-clock budget ends before a single tour exists."""


DECAY_SCOPES = ("step", "episode")
EVAL_SWEEPS = ("auto", "none", "start", "cycle", "all")


@dataclass(frozen=True)
class RlConfig:
    """Training knobs.

    The learning rate is deliberately slow (0.01), so the table needs many
    visits per state-action pair before its greedy policy is worth anything.
    Epsilon decays multiplicatively per chosen edge ("step") down to
    epsilon_min; with a per-step schedule the decay bottoms out within a few
    episodes, so the floor is what actually controls exploration for the bulk
    of training. The 0.5 default keeps the policy half-explorative
    throughout, which the slow learning rate needs; lower it for a mostly
    greedy finish. decay_scope="episode" applies the decay once per episode
    instead, stretching the schedule across the whole run.

    eval_sweep controls how the greedy policy is probed while training: after
    every episode the current table's deterministic tour is measured and kept
    if it beats everything seen so far. "all" rolls out from every start
    city, "cycle" from one start rotating per episode, "start" only from the
    episode start, "none" disables the probe. "auto" picks "all" for small
    instances (n <= 20) where the sweep is cheap, "cycle" otherwise.
    """

    alpha: float = 0.01
    gamma: float = 0.95
    epsilon: float = 0.99
    epsilon_decay: float = 0.995
    epsilon_min: float = 0.5
    episodes: Optional[int] = None  # default at train time: 100 * n
    reward_mode: str = "neg_distance"
    decay_scope: str = "step"
    eval_sweep: str = "auto"

    def __post_init__(self):
        if not 0 <= self.alpha <= 1:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0 <= self.gamma <= 1:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if not 0 <= self.epsilon <= 1:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if not 0 < self.epsilon_decay <= 1:
            raise ValueError(f"epsilon_decay must be in (0, 1], got {self.epsilon_decay}")
        if not 0 <= self.epsilon_min <= 1:
            raise ValueError(f"epsilon_min must be in [0, 1], got {self.epsilon_min}")
        if self.episodes is not None and self.episodes < 1:
            raise ValueError(f"episodes must be >= 1, got {self.episodes}")
        if self.reward_mode not in REWARD_MODES:
            raise ValueError(f"unknown reward_mode {self.reward_mode!r}, expected one of {REWARD_MODES}")
        if self.decay_scope not in DECAY_SCOPES:
            raise ValueError(f"unknown decay_scope {self.decay_scope!r}, expected one of {DECAY_SCOPES}")
        if self.eval_sweep not in EVAL_SWEEPS:
            raise ValueError(f"unknown eval_sweep {self.eval_sweep!r}, expected one of {EVAL_SWEEPS}")


def new_q_table(n: int) -> np.ndarray:
    """Fresh value table, all zeros, q[state, action]."""
    if n < 2:
        raise ValueError(f"need at least 2 cities, got {n}")
    return np.zeros((n, n), dtype=np.float64)


@dataclass
class EpisodeLog:
    """Per-episode training record; serializable as CSV."""

    episodes: list[tuple[int, float, float, float]] = field(default_factory=list)

    def append(self, episode: int, reward: float, tour_len_m: float, epsilon: float) -> None:
        self.episodes.append((episode, reward, tour_len_m, epsilon))

    def to_csv(self) -> str:
        lines = ["episode,reward,tour_len_m,epsilon"]
        for episode, reward, tour_len_m, epsilon in self.episodes:
            lines.append(f"{episode},{reward!r},{tour_len_m!r},{epsilon!r}")
        return "\n".join(lines) + "\n"

    def save(self, path: str) -> None:
        atomic_write_text(path, self.to_csv())


def reward(d: np.ndarray, u: int, v: int, mode: str = "neg_distance") -> float:
    """Reward for traversing edge (u, v)."""
    if mode == "neg_distance":
        return -float(d[u, v])
    if mode == "inverse_distance":
        dist = float(d[u, v])
        return 1.0 / dist if dist > 0 else 1.0
    raise ValueError(f"unknown reward_mode {mode!r}, expected one of {REWARD_MODES}")


def _bootstrap(q: np.ndarray, s_next: int, unvisited: list[int], start: int) -> float:
    """Value of the successor state: best q over still-legal actions, or the
    value of the forced return edge once every city has been visited.

    q[start, start] is never written, so it stays 0 and cleanly terminates
    the final update of each episode.
    """
    if unvisited:
        return float(q[s_next, unvisited].max())
    return float(q[s_next, start])


def q_update(
    q: np.ndarray,
    s: int,
    a: int,
    r: float,
    s_next: int,
    unvisited: list[int],
    alpha: float,
    gamma: float,
    start: int = 0,
) -> float:
    """One Q-learning backup for taking action a (move s -> s_next); returns
    the new q[s, a]. unvisited lists the cities still open in s_next. In this
    problem s_next always equals a, but the backup is written against the
    successor state to keep the bootstrap term explicit."""
    target = r + gamma * _bootstrap(q, s_next, unvisited, start)
    q[s, a] = q[s, a] + alpha * (target - q[s, a])
    return float(q[s, a])


def double_q_update(
    qa: np.ndarray,
    qb: np.ndarray,
    update_a: bool,
    s: int,
    a: int,
    r: float,
    s_next: int,
    unvisited: list[int],
    alpha: float,
    gamma: float,
    start: int = 0,
) -> float:
    """One double-Q backup: the updating table picks the argmax action in
    s_next, the other table supplies its value. Returns the new entry."""
    upd, other = (qa, qb) if update_a else (qb, qa)
    if unvisited:
        opts = np.asarray(unvisited)
        a_star = int(opts[int(np.argmax(upd[s_next, opts]))])
        target = r + gamma * float(other[s_next, a_star])
    else:
        target = r + gamma * float(other[s_next, start])
    upd[s, a] = upd[s, a] + alpha * (target - upd[s, a])
    return float(upd[s, a])


def epsilon_greedy(
    q_row: np.ndarray,
    unvisited: list[int],
    epsilon: float,
    rng: random.Random,
) -> int:
    """Pick the next city: explore uniformly with probability epsilon, else
    exploit the best q among unvisited. Ties go to the earliest entry in the
    unvisited list; the trainer keeps that list ascending, so in training a
    tie resolves to the lowest city index. One rng.random() is always drawn,
    so trajectories at different epsilons stay comparable."""
    if not unvisited:
        raise ValueError("no unvisited cities to choose from")
    u = rng.random()
    if u < epsilon:
        return unvisited[rng.randrange(len(unvisited))]
    opts = np.asarray(unvisited)
    return int(opts[int(np.argmax(q_row[opts]))])


def _decay(epsilon: float, decay: float, floor: float) -> float:
    if epsilon <= floor:
        return epsilon
    return max(epsilon * decay, floor)


def _greedy_rollout(value_row: Callable[[int], np.ndarray], n: int, start: int) -> list[int]:
    """Tour obtained by always exploiting the learned values, no randomness."""
    order = [start]
    visited = {start}
    current = start
    while len(order) < n:
        opts = np.asarray([c for c in range(n) if c not in visited])
        current = int(opts[int(np.argmax(value_row(current)[opts]))])
        order.append(current)
        visited.add(current)
    return order


def _train(
    matrix: DistanceMatrix,
    config: RlConfig,
    rng_seed: int,
    start: int,
    time_budget_ms: Optional[float],
    double: bool,
    trace: Optional[SolveTrace],
) -> tuple[Tour, EpisodeLog, np.ndarray]:
    n = matrix.n
    d = matrix.d
    if n < 3:
        raise ValueError(f"training needs at least 3 cities, got {n}")
    if not 0 <= start < n:
        raise ValueError(f"start must be in [0, {n}), got {start}")
    episodes = config.episodes if config.episodes is not None else 100 * n
    sweep = config.eval_sweep
    if sweep == "auto":
        sweep = "all" if n <= 20 else "cycle"
    per_step = config.decay_scope == "step"
    rng = random.Random(rng_seed)
    qa = new_q_table(n)
    qb = new_q_table(n) if double else None
    if double:
        def value_row(c: int) -> np.ndarray:
            return qa[c] + qb[c]
    else:
        def value_row(c: int) -> np.ndarray:
            return qa[c]

    t_begin = time.perf_counter()
    deadline = None if time_budget_ms is None else t_begin + time_budget_ms / 1000.0
    log = EpisodeLog()
    best_order: Optional[list[int]] = None
    best_len = float("inf")
    epsilon = config.epsilon

    def consider(order: list[int]) -> None:
        nonlocal best_order, best_len
        length = tour_length(order, matrix)
        if length < best_len:
            best_len = length
            best_order = list(order)
            if trace is not None:
                trace.record((time.perf_counter() - t_begin) * 1000.0, best_len)

    for episode in range(episodes):
        if deadline is not None and time.perf_counter() >= deadline:
            if best_order is None:
                raise BudgetExhaustedError(
                    f"time budget {time_budget_ms} ms ended before the first episode finished"
                )
            break
        order = [start]
        unvisited = [c for c in range(n) if c != start]
        total_reward = 0.0
        s = start
        while unvisited:
            a = epsilon_greedy(value_row(s), unvisited, epsilon, rng)
            unvisited.remove(a)
            r = reward(d, s, a, config.reward_mode)
            if double:
                update_a = rng.random() < 0.5
                double_q_update(qa, qb, update_a, s, a, r, a, unvisited, config.alpha, config.gamma, start)
            else:
                q_update(qa, s, a, r, a, unvisited, config.alpha, config.gamma, start)
            total_reward += r
            if per_step:
                epsilon = _decay(epsilon, config.epsilon_decay, config.epsilon_min)
            order.append(a)
            s = a
        # Forced closing edge back to the start; same backup rule, and with
        # nothing left unvisited it bootstraps the always-zero q[start, start].
        r = reward(d, s, start, config.reward_mode)
        if double:
            update_a = rng.random() < 0.5
            double_q_update(qa, qb, update_a, s, start, r, start, [], config.alpha, config.gamma, start)
        else:
            q_update(qa, s, start, r, start, [], config.alpha, config.gamma, start)
        total_reward += r
        # Per-step scope: this is the closing edge's decay. Per-episode
        # scope: this is the single decay the whole episode gets.
        epsilon = _decay(epsilon, config.epsilon_decay, config.epsilon_min)

        length = tour_length(order, matrix)
        log.append(episode, total_reward, length, epsilon)
        consider(order)

        # Probe what the table has actually learned: the noisy exploration
        # episodes rarely show it, a deterministic rollout does. Any tour
        # found here competes for best-so-far exactly like an episode tour.
        if sweep == "start":
            consider(_greedy_rollout(value_row, n, start))
        elif sweep == "cycle":
            consider(_greedy_rollout(value_row, n, episode % n))
        elif sweep == "all":
            for s0 in range(n):
                consider(_greedy_rollout(value_row, n, s0))

    if best_order is None:
        raise BudgetExhaustedError("no episode completed within the budget")

    # Final deterministic rollout of the finished table, kept even when the
    # per-episode probes are disabled.
    consider(_greedy_rollout(value_row, n, start))

    table = qa if not double else qa + qb
    return make_tour(best_order, matrix), log, table


def train_q(
    matrix: DistanceMatrix,
    config: RlConfig | None = None,
    rng_seed: int = 0,
    start: int = 0,
    time_budget_ms: Optional[float] = None,
    trace: Optional[SolveTrace] = None,
) -> tuple[Tour, EpisodeLog, np.ndarray]:
    """Train a single Q table; returns (best tour found, episode log, table).

    The best tour is the shortest out of every training episode, the greedy
    probes taken along the way (see RlConfig.eval_sweep), and one final
    greedy rollout of the learned table.
    """
    if config is None:
        config = RlConfig()
    return _train(matrix, config, rng_seed, start, time_budget_ms, double=False, trace=trace)


def train_double_q(
    matrix: DistanceMatrix,
    config: RlConfig | None = None,
    rng_seed: int = 0,
    start: int = 0,
    time_budget_ms: Optional[float] = None,
    trace: Optional[SolveTrace] = None,
) -> tuple[Tour, EpisodeLog, np.ndarray]:
    """Double Q-learning: two tables, actions chosen by their sum, each backup
    updating one table (fair coin) against the other's valuation. Reduces the
    max-operator optimism of plain Q-learning. Returns (tour, log, qa + qb)."""
    if config is None:
        config = RlConfig()
    return _train(matrix, config, rng_seed, start, time_budget_ms, double=True, trace=trace)
