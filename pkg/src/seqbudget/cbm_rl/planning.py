"""Optimistic planners used at the start of every episode."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np



@dataclass
class ValueTables:
    """Q and V tables indexed by 0-based step; ``V_up[H]`` is the terminal zero row."""

    Q_up: np.ndarray
    V_up: np.ndarray
    policy: np.ndarray
    Q_low: Optional[np.ndarray] = None
    V_low: Optional[np.ndarray] = None


def truncated_vi(p_bar, reward) -> ValueTables:
    """Backward induction with V_h(s) = min(max_a Q_h(s, a), H - h) for 1-based h.

    ``reward`` is the bonus-augmented reward, shape (H, S, A).
    """
    p_bar = np.asarray(p_bar, dtype=float)
    reward = np.asarray(reward, dtype=float)
    H, S, A = reward.shape
    V = np.zeros((H + 1, S))
    Q = np.empty((H, S, A))
    policy = np.empty((H, S), dtype=np.int64)
    for h in range(H - 1, -1, -1):
        Q[h] = reward[h] + p_bar[h] @ V[h + 1]
        policy[h] = Q[h].argmax(axis=1)
        V[h] = np.minimum(Q[h].max(axis=1), H - 1 - h)
    return ValueTables(Q, V, policy)


def optimistic_pessimistic_vi(p_bar, r_bar, reward_bonus, visits, log_term: float) -> ValueTables:
    """Upper/lower value iteration with variance-aware transition bonuses.

    The lower value is read at the optimistic policy's action, not at its own
    argmax. Upper values are capped at H - h + 1 (1-based h), lower ones floored at 0.
    """
    p_bar = np.asarray(p_bar, dtype=float)
    r_bar = np.asarray(r_bar, dtype=float)
    H, S, A = r_bar.shape
    V_up = np.zeros((H + 1, S))
    V_low = np.zeros((H + 1, S))
    Q_up = np.empty((H, S, A))
    Q_low = np.empty((H, S, A))
    policy = np.empty((H, S), dtype=np.int64)
    idx = np.arange(S)
    n = np.maximum(visits, 1)
    # count-only parts of the bonus, for every step at once
    base = reward_bonus + 44.0 * H * H * S * log_term / n
    var_scale = 2.0 * log_term / n
    gap_scale = 1.0 / (16.0 * H)
    stack = np.empty((S, 3))
    for h in range(H - 1, -1, -1):
        up = V_up[h + 1]
        stack[:, 0] = up
        stack[:, 1] = up * up
        stack[:, 2] = V_low[h + 1]
        # one product gives E[V_up], E[V_up^2] and E[V_low]; the gap term is linear
        e = p_bar[h] @ stack
        e_up, e_low = e[..., 0], e[..., 2]
        var = np.maximum(e[..., 1] - e_up * e_up, 0.0)
        bonus = base[h] + np.sqrt(var_scale[h] * var) + (e_up - e_low) * gap_scale
        q_up = Q_up[h]
        np.add(r_bar[h] + bonus, e_up, out=q_up)
        pi = q_up.argmax(axis=1)
        policy[h] = pi
        q_low = Q_low[h]
        np.add(r_bar[h] - bonus, e_low, out=q_low)
        V_up[h] = np.minimum(q_up.max(axis=1), H - h)
        V_low[h] = np.maximum(q_low[idx, pi], 0.0)
    return ValueTables(Q_up, V_up, policy, Q_low, V_low)
