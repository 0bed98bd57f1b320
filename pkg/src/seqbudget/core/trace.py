"""Per-round run records and the filtration view handed to adversaries."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TRACE_COLUMNS = ("t", "context", "action", "query", "budget", "budget_used",
                 "regret_inst", "regret_cum")


@dataclass
class RunTrace:
    """Row ``i`` describes round (or episode) ``t = i + 1``.

    For episodic RL, ``action`` is the first-step action and ``query`` counts
    the reward queries made during the episode.
    """

    t: np.ndarray
    context: np.ndarray
    action: np.ndarray
    query: np.ndarray
    budget: np.ndarray
    budget_used: np.ndarray
    regret_inst: np.ndarray
    regret_cum: np.ndarray = field(default=None)
    meta: dict = field(default_factory=dict)

    @classmethod
    def empty(cls, T: int) -> "RunTrace":
        return cls(
            t=np.arange(1, T + 1, dtype=np.int64),
            context=np.zeros(T, dtype=np.int64),
            action=np.zeros(T, dtype=np.int64),
            query=np.zeros(T, dtype=np.int64),
            budget=np.zeros(T),
            budget_used=np.zeros(T),
            regret_inst=np.zeros(T),
            regret_cum=np.zeros(T),
        )

    def __len__(self):
        return len(self.t)

    def finalize(self) -> "RunTrace":
        self.regret_cum = np.cumsum(self.regret_inst)
        return self

    def columns(self):
        return {name: getattr(self, name) for name in TRACE_COLUMNS}

    def budget_feasible(self, tol: float = 1e-9) -> bool:
        return bool(np.all(self.budget_used <= self.budget + tol))

    def equals(self, other: "RunTrace") -> bool:
        return all(np.array_equal(getattr(self, c), getattr(other, c)) for c in TRACE_COLUMNS)


class History:
    """Read-only view of the filtration F_{t-1} plus the current context u_t.

    Exposes past contexts, actions, query decisions, observed rewards
    (``Y_k = R_k * q_k``; NaN when not queried) and past budgets. Learner
    internals are deliberately not reachable from here.
    """

    __slots__ = ("_trace", "_observed", "t", "context")

    def __init__(self, trace: RunTrace, observed: np.ndarray):
        self._trace = trace
        self._observed = observed
        self.t = 1
        self.context = None

    @property
    def contexts(self):
        return self._trace.context[: self.t - 1]

    @property
    def actions(self):
        return self._trace.action[: self.t - 1]

    @property
    def queries(self):
        return self._trace.query[: self.t - 1]

    @property
    def budgets(self):
        return self._trace.budget[: self.t - 1]

    @property
    def observed_rewards(self):
        return self._observed[: self.t - 1]
