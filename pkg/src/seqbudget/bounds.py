"""Closed-form regret lower bounds and budget-profile regret predictions.

These are reference curves only (worst case over instances); logs are natural.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class BoundCurve:
    label: str
    t: np.ndarray
    value: np.ndarray

    def __post_init__(self):
        self.t = np.asarray(self.t)
        self.value = np.asarray(self.value, dtype=float)
        if not np.all(np.isfinite(self.value)) or (self.value < 0).any():
            raise ValueError("bound values must be finite and non-negative")

    def endpoint(self) -> float:
        return float(self.value[-1])


def mab_lb_unit(T: float, A: int, B: float) -> float:
    """(1/140) min(T sqrt(A / B), T); B = 0 saturates at T."""
    if A < 2:
        raise ValueError("A must be >= 2")
    if B <= 0:
        return T / 140.0
    return min(T * math.sqrt(A / B), T) / 140.0


def mab_lb_costs(T: float, costs, B: float) -> float:
    """(1/140) min(T sqrt(sum c / (B (1 + ln A))), T) for arm-dependent query costs."""
    costs = np.asarray(costs, dtype=float)
    A = len(costs)
    if A < 2:
        raise ValueError("A must be >= 2")
    if (costs < 0).any():
        raise ValueError("costs must be non-negative")
    total = float(costs.sum())
    if total == 0:
        return 0.0
    if B <= 0:
        return T / 140.0
    return min(T * math.sqrt(total / (B * (1.0 + math.log(A)))), T) / 140.0


def mab_lb_varying(T: int, budgets, costs) -> float:
    """Time-varying budget bound, summed directly over t = 1..T."""
    budgets = np.asarray(budgets, dtype=float)
    costs = np.asarray(costs, dtype=float)
    if len(budgets) != T:
        raise ValueError("need one budget value per round")
    if np.any(np.diff(budgets) < 0):
        raise ValueError("budget sequence must be non-decreasing")
    A = len(costs)
    if A < 2:
        raise ValueError("A must be >= 2")
    total = float(costs.sum())
    with np.errstate(divide="ignore"):
        terms = np.where(budgets > 0,
                         np.sqrt(total / (np.maximum(budgets, 1e-300) * (1.0 + math.log(A)))),
                         1.0)
    return float(np.minimum(terms, 1.0).sum() / (140.0 * (1.0 + math.log(T))))


def lin_lb(T: float, d: int, B: float) -> float:
    """d T / (80 sqrt(B)) for the hypercube action set, 1 <= B <= T."""
    if B < 1 or B > T:
        raise ValueError("need 1 <= B <= T")
    return d * T / (80.0 * math.sqrt(B))


PROFILES = ("linear", "polynomial", "fixed", "periodic")


def predicted_profile(kind: str, params: dict, A: int, T: int) -> BoundCurve:
    """Regret order implied by a budget profile, evaluated on t = 1..T (unit constants).

    linear (epsilon): 2 sqrt(A t / epsilon); polynomial (c): sqrt(A) t^(1 - c/2);
    fixed (b0): sqrt(A) t / sqrt(b0); periodic (b0, n): sqrt(A t n / b0).
    """
    t = np.arange(1, T + 1, dtype=float)
    if kind == "linear":
        eps = float(params["epsilon"])
        if eps <= 0:
            raise ValueError("epsilon must be positive")
        val = 2.0 * np.sqrt(A * t / eps)
    elif kind == "polynomial":
        c = float(params["c"])
        if not 0 < c <= 1:
            raise ValueError("c must lie in (0, 1]")
        val = math.sqrt(A) * t ** (1.0 - c / 2.0)
    elif kind == "fixed":
        b0 = float(params["b0"])
        if b0 <= 0:
            raise ValueError("b0 must be positive")
        val = math.sqrt(A) * t / math.sqrt(b0)
    elif kind == "periodic":
        b0, n = float(params["b0"]), int(params["n"])
        if b0 <= 0 or n < 1:
            raise ValueError("need b0 > 0 and n >= 1")
        val = np.sqrt(A * t * n / b0)
    else:
        raise ValueError(f"unknown profile {kind!r}; expected one of {PROFILES}")
    label = f"{kind}(" + ", ".join(f"{k}={v}" for k, v in sorted(params.items())) + ")"
    return BoundCurve(label, t.astype(np.int64), val)


def lower_bound_curve(kind: str, params: dict, T: int) -> BoundCurve:
    """Evaluate a lower bound at every horizon t = 1..T (fixed other arguments)."""
    ts = np.arange(1, T + 1)
    if kind == "mab_lb_unit":
        vals = [mab_lb_unit(t, int(params["A"]), float(params["B"])) for t in ts]
    elif kind == "mab_lb_costs":
        vals = [mab_lb_costs(t, params["costs"], float(params["B"])) for t in ts]
    elif kind == "lin_lb":
        B = float(params["B"])
        ts = ts[ts >= B]
        vals = [lin_lb(t, int(params["d"]), B) for t in ts]
    elif kind == "mab_lb_varying":
        budgets = np.asarray(params["budgets"], dtype=float)
        vals = [mab_lb_varying(t, budgets[:t], params["costs"]) for t in ts]
    else:
        raise ValueError(f"unknown lower bound {kind!r}")
    return BoundCurve(kind, ts, np.asarray(vals))
