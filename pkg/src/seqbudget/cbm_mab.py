"""CBM-UCB: UCB1 indices with Hoeffding bonuses and a confidence-budget query rule.

The learner plays ``argmax_a rbar(a) + b_t(a)`` with
``b_t(a) = sqrt(3 ln(A t) / (2 (n^q(a) v 1)))`` and asks for the reward when
the interval width ``CI_t(a) = 2 b_t(a)`` is at least
``4 sqrt(6 ln(A t) sum_a c(a) / B(t))``.
"""
from __future__ import annotations

import math

import numpy as np

from .core.errors import InvalidEnvironment, RewardOutOfRange


class MabCbmState:
    """Sufficient statistics: per-arm query counts and empirical means."""

    def __init__(self, n_arms: int, costs=None):
        if n_arms < 2:
            raise InvalidEnvironment("CBM-UCB needs at least two arms")
        self.n_arms = int(n_arms)
        self.costs = np.ones(n_arms) if costs is None else np.asarray(costs, dtype=float)
        if self.costs.shape != (n_arms,) or (self.costs < 0).any():
            raise ValueError("costs must be a non-negative vector of length A")
        self.total_cost = float(self.costs.sum())
        self.counts = np.zeros(n_arms, dtype=np.int64)
        self.means = np.zeros(n_arms)
        # 1 / sqrt(n v 1), refreshed on update
        self._inv_sqrt = np.ones(n_arms)
        self.t = 0  # index of the current round once it has started

    @property
    def n_queries(self) -> int:
        return int(self.counts.sum())


def mab_bonus(state: MabCbmState, a: int, t=None) -> float:
    t = state.t if t is None else t
    n = max(int(state.counts[a]), 1)
    return math.sqrt(3.0 * math.log(state.n_arms * t) / (2.0 * n))


def mab_ci(state: MabCbmState, a: int, t=None) -> float:
    return 2.0 * mab_bonus(state, a, t)


def mab_select(state: MabCbmState, t=None) -> int:
    """UCB argmax; ``np.argmax`` breaks ties toward the lowest index."""
    t = state.t if t is None else t
    scale = math.sqrt(1.5 * math.log(state.n_arms * t))
    return int(np.argmax(state.means + scale * state._inv_sqrt))


def mab_threshold(state: MabCbmState, budget: float, t=None) -> float:
    t = state.t if t is None else t
    if budget <= 0:
        return math.inf
    return 4.0 * math.sqrt(6.0 * math.log(state.n_arms * t) * state.total_cost / budget)


def mab_should_query(state: MabCbmState, a: int, budget: float, ledger=None) -> bool:
    """CBM rule ``CI_t(a) >= threshold``, guarded by cost feasibility.

    Squaring both sides cancels the common ``6 ln(A t)`` factor, leaving the
    exact comparison ``B(t) >= 16 sum_a c(a) (n^q(a) v 1)``; evaluating that
    form avoids spurious float disagreements at equality.
    """
    if budget <= 0:
        return False
    n = max(int(state.counts[a]), 1)
    fire = budget >= 16.0 * state.total_cost * n
    if fire and ledger is not None:
        return ledger.can_afford(a, budget)
    return fire


def mab_update(state: MabCbmState, a: int, reward: float) -> MabCbmState:
    if not 0.0 <= reward <= 1.0:
        raise RewardOutOfRange(f"reward {reward} outside [0, 1]")
    n = state.counts[a] + 1
    state.counts[a] = n
    state.means[a] += (reward - state.means[a]) / n
    state._inv_sqrt[a] = 1.0 / math.sqrt(n)
    return state


class CbmUcb:
    """CBM-UCB learner for the bandit loop.

    ``query_rule="always"`` gives the unbudgeted UCB counterpart (it still
    respects the ledger, so pair it with an ample budget).
    """

    name = "cbm-ucb"

    def __init__(self, n_arms: int, costs=None, query_rule: str = "cbm"):
        if query_rule not in ("cbm", "always"):
            raise ValueError("query_rule must be 'cbm' or 'always'")
        self.state = MabCbmState(n_arms, costs)
        self.query_rule = query_rule
        if query_rule == "always":
            self.name = "ucb"

    def act(self, context, budget, ledger):
        st = self.state
        st.t += 1
        a = mab_select(st)
        if self.query_rule == "always":
            q = budget > 0 and ledger.can_afford(a, budget)
        else:
            q = mab_should_query(st, a, budget, ledger)
        return a, q

    def observe(self, context, action, reward):
        mab_update(self.state, action, reward)
