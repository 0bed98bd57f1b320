"""Visit/query statistics and confidence bonuses for tabular CBM agents."""
from __future__ import annotations

import math

import numpy as np

LOG_CONSTANTS = {"ucbvi": 12.0, "ulcvi": 16.0}


class RlCounts:
    """Per-(h, s, a) statistics, indexed [h, s, a] with 0-based steps.

    ``n`` counts visits (transition feedback is always observed), ``nq``
    counts reward queries; reward sums and sums of squares feed the
    empirical mean and the unbiased variance. The empirical kernel, mean,
    variance and the ``1 / (n v 1)`` factors are kept up to date entry by
    entry, so reading them costs nothing per episode.
    """

    def __init__(self, S: int, A: int, H: int):
        self.S, self.A, self.H = int(S), int(A), int(H)
        self.n = np.zeros((H, S, A), dtype=np.int64)
        self.nq = np.zeros((H, S, A), dtype=np.int64)
        self.trans = np.zeros((H, S, A, S), dtype=np.int64)
        self.rsum = np.zeros((H, S, A))
        self.rsq = np.zeros((H, S, A))
        self._p_bar = np.full((H, S, A, S), 1.0 / S)
        self._r_bar = np.zeros((H, S, A))
        self._var = np.zeros((H, S, A))
        self.inv_n = np.ones((H, S, A))
        self.inv_nq = np.ones((H, S, A))

    def p_bar(self) -> np.ndarray:
        """Empirical kernel; unvisited rows are uniform. Read-only view."""
        v = self._p_bar.view()
        v.flags.writeable = False
        return v

    def r_bar(self) -> np.ndarray:
        v = self._r_bar.view()
        v.flags.writeable = False
        return v

    def reward_variance(self) -> np.ndarray:
        v = self._var.view()
        v.flags.writeable = False
        return v

    def record_visits(self, states, actions) -> None:
        H = self.H
        states = [int(x) for x in states]
        actions = [int(x) for x in actions]
        n_arr, inv, trans, p_bar = self.n, self.inv_n, self.trans, self._p_bar
        for h in range(H):
            idx = (h, states[h], actions[h])
            n = int(n_arr[idx]) + 1
            n_arr[idx] = n
            inv[idx] = 1.0 / n
            row = trans[idx]
            if h + 1 < H:
                row[states[h + 1]] += 1
            p_bar[idx] = row / n

    def record_reward(self, h: int, s: int, a: int, reward: float) -> None:
        nq = self.nq[h, s, a] + 1
        self.nq[h, s, a] = nq
        self.rsum[h, s, a] += reward
        self.rsq[h, s, a] += reward * reward
        self.inv_nq[h, s, a] = 1.0 / nq
        self._r_bar[h, s, a] = self.rsum[h, s, a] / nq
        self._var[h, s, a] = empirical_reward_variance(nq, self.rsum[h, s, a], self.rsq[h, s, a])


def empirical_reward_variance(n, total, total_sq):
    """Unbiased sample variance from (count, sum, sum of squares); 0 when n < 2.

    The mean of ``(x_k - x_k')^2 / 2`` over ordered pairs k != k' equals
    ``(sum x^2 - (sum x)^2 / n) / (n - 1)``, which is what is computed here.
    """
    n = np.asarray(n)
    total = np.asarray(total, dtype=float)
    total_sq = np.asarray(total_sq, dtype=float)
    safe_n = np.maximum(n, 2)
    var = (total_sq - total * total / safe_n) / (safe_n - 1)
    out = np.where(n >= 2, np.maximum(var, 0.0), 0.0)
    return out if out.ndim else float(out)


def log_term(t: int, S: int, A: int, H: int, delta: float, variant: str = "ucbvi") -> float:
    """L_{t,delta} = ln(c S^2 A H t^2 (t+1) / delta), c = 12 (UCBVI) or 16 (ULCVI)."""
    if t < 1:
        raise ValueError("episode index is 1-based")
    c = LOG_CONSTANTS[variant]
    return math.log(c * S * S * A * H * t * t * (t + 1) / delta)


def rl_reward_bonus(var_hat, nq, L):
    nq = np.maximum(nq, 1)
    return np.sqrt(2.0 * var_hat * L / nq) + 5.0 * L / nq


def ucbvi_transition_bonus(n, H: int, L):
    """Hoeffding transition bonus; both denominators use n v 1."""
    n = np.maximum(n, 1)
    return np.sqrt(2.0 * H * H * L / n) + 5.0 * H * L / n


def ulcvi_transition_bonus(p_bar, n, v_up, v_low, H: int, S: int, L):
    """Variance-aware transition bonus for one step.

    ``p_bar`` is (..., S) over next states, ``v_up``/``v_low`` the next-step
    optimistic/pessimistic values.
    """
    p_bar = np.asarray(p_bar, dtype=float)
    mean = p_bar @ v_up
    var = np.maximum(p_bar @ (v_up * v_up) - mean * mean, 0.0)
    n = np.maximum(n, 1)
    gap = p_bar @ (v_up - v_low)
    return np.sqrt(2.0 * var * L / n) + 44.0 * H * H * S * L / n + gap / (16.0 * H)


def query_threshold(lr_size: int, budget: float, S: int, A: int, H: int, L: float) -> float:
    if budget < 1:
        return math.inf
    return L * (6.0 * math.sqrt(lr_size / budget)
                + 4.0 * S * A * H * (math.log(1.0 + budget) + 1.0) / budget)


def rl_should_query(ci: float, lr_size: int, budget: float, S: int, A: int, H: int,
                    L: float) -> bool:
    if budget < 1:
        return False
    return ci >= query_threshold(lr_size, budget, S, A, H, L)
