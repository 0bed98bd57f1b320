"""Budget schedules B(t) and the query ledger B^q(t)."""
from __future__ import annotations

import math
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvariantViolation, NonMonotoneBudget

# Slack for comparing accumulated float costs against a budget.
_FEAS_TOL = 1e-9


class BudgetSchedule:
    """A non-decreasing budget stream.

    ``fn(t, history)`` produces the raw value for round ``t`` (1-based). Oblivious
    profiles ignore ``history``; adaptive ones see the filtration view handed
    over by the simulation loop. Each call to :meth:`advance` validates
    non-negativity and monotonicity against the last emitted value.
    """

    def __init__(self, fn: Callable, kind: str, params: Optional[dict] = None,
                 adaptive: bool = False):
        self._fn = fn
        self.kind = kind
        self.params = dict(params or {})
        self.adaptive = adaptive
        self.last_value = 0.0
        self._last_t = 0

    def __repr__(self):
        return f"BudgetSchedule(kind={self.kind!r}, params={self.params!r})"

    def reset(self):
        self.last_value = 0.0
        self._last_t = 0

    def advance(self, t: int, history=None) -> float:
        if t < 1:
            raise ValueError("rounds are 1-based")
        value = float(self._fn(t, history))
        if not value >= 0.0:  # also rejects NaN
            raise NonMonotoneBudget(f"budget must be non-negative, got {value} at t={t}")
        if self._last_t and value < self.last_value:
            raise NonMonotoneBudget(
                f"budget decreased from {self.last_value} to {value} at t={t}")
        self.last_value = value
        self._last_t = t
        return value

    def peek(self, t: int) -> float:
        """Value of an oblivious schedule at ``t`` without touching state."""
        if self.adaptive:
            raise TypeError("adaptive schedules depend on the realized history")
        return float(self._fn(t, None))

    def values(self, T: int) -> np.ndarray:
        return np.array([self.peek(t) for t in range(1, T + 1)])

    # ---- closed-form profiles -------------------------------------------------

    @classmethod
    def fixed(cls, b0: float) -> "BudgetSchedule":
        b0 = float(b0)
        return cls(lambda t, h: b0, "fixed", {"b0": b0})

    @classmethod
    def linear(cls, epsilon: float) -> "BudgetSchedule":
        if epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        eps = float(epsilon)
        return cls(lambda t, h: eps * t, "linear", {"epsilon": eps})

    @classmethod
    def polynomial(cls, c: float, scale: float = 1.0) -> "BudgetSchedule":
        if not 0 < c <= 1:
            raise ValueError("polynomial exponent must lie in (0, 1]")
        c, scale = float(c), float(scale)
        return cls(lambda t, h: scale * t ** c, "polynomial", {"c": c, "scale": scale})

    @classmethod
    def periodic(cls, b0: float, n: int) -> "BudgetSchedule":
        """Replenished by ``b0`` every ``n`` rounds: B(t) = b0 * (1 + floor(t / n))."""
        if n < 1:
            raise ValueError("period must be >= 1")
        b0, n = float(b0), int(n)
        return cls(lambda t, h: b0 * (1 + t // n), "periodic", {"b0": b0, "n": n})

    @classmethod
    def stepped(cls, b0: float, n: int) -> "BudgetSchedule":
        """B(t) = b0 * ceil(t / n): one grant of ``b0`` at the start of each block."""
        if n < 1:
            raise ValueError("period must be >= 1")
        b0, n = float(b0), int(n)
        return cls(lambda t, h: b0 * math.ceil(t / n), "stepped", {"b0": b0, "n": n})

    @classmethod
    def sequence(cls, values: Sequence[float]) -> "BudgetSchedule":
        vals = [float(v) for v in values]
        if not vals:
            raise ValueError("empty budget sequence")

        def fn(t, h):
            return vals[min(t, len(vals)) - 1]

        return cls(fn, "sequence", {"values": vals})

    @classmethod
    def adaptive_callback(cls, callback: Callable, name: str = "adaptive") -> "BudgetSchedule":
        return cls(callback, name, {}, adaptive=True)


def advance_budget(schedule: BudgetSchedule, history, t: int) -> float:
    return schedule.advance(t, history)


class QueryLedger:
    """Tracks B^q(t) = sum of costs of queried actions, and n^q."""

    def __init__(self, costs=None):
        self.costs = None if costs is None else np.asarray(costs, dtype=float)
        if self.costs is not None and (self.costs < 0).any():
            raise ValueError("query costs must be non-negative")
        self.used = 0.0
        self.n_q = 0

    def cost(self, action) -> float:
        if self.costs is None:
            return 1.0
        return float(self.costs[action])

    def can_afford(self, action, budget: float) -> bool:
        return self.used + self.cost(action) <= budget + _FEAS_TOL

    def charge(self, action, budget: float) -> None:
        if not self.can_afford(action, budget):
            raise InvariantViolation(
                f"query costing {self.cost(action)} exceeds budget {budget} (used {self.used})")
        self.used += self.cost(action)
        self.n_q += 1

    def check(self, budget: float) -> bool:
        return self.used <= budget + _FEAS_TOL
