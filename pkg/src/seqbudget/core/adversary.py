"""Adaptive adversaries that break the greedy reduction.

Two contexts (0 and 1, i.e. "u=1" and "u=2"), unit query costs. The budget
grows by one exactly on rounds whose context is 0, so greedy only ever
learns about context 0:

* ``budget-adversary``: contexts are i.i.d. uniform and the budget adapts to them.
* ``context-adversary``: the budget grows with probability 1/2 and the
  adversary shows context 0 exactly when it grew.

Both give E[B(t)] = t/2 (up to the floor ``initial`` that keeps B(1) >= 1).
"""
from __future__ import annotations

import numpy as np

from .budget import BudgetSchedule
from .envs import CmabEnv, LinBanditEnv

MODES = ("budget-adversary", "context-adversary")

# Context 0: identical arms. Context 1: arm 1 pays 1, arm 0 pays 0, so a
# learner that never sees context-1 feedback (and breaks ties low) loses 1
# per context-1 round.
PROP42_MEANS = np.array([[0.5, 0.5], [0.0, 1.0]])


class ContextLaw:
    """Callable ``(t, history, rng) -> context``; ``stream`` names the RNG role it uses."""

    def __init__(self, fn, stream: str):
        self._fn = fn
        self.stream = stream

    def __call__(self, t, history, rng):
        return self._fn(t, history, rng)


def prop42_budget_path(contexts, initial: float = 1.0) -> np.ndarray:
    """Budget values produced by the increment rule for a realized context path."""
    counts = np.cumsum(np.asarray(contexts) == 0)
    return np.maximum(float(initial), counts.astype(float))


def prop42_contexts_from_increments(increments) -> np.ndarray:
    return np.where(np.asarray(increments) == 1, 0, 1)


def make_prop42_adversary(mode: str = "budget-adversary", initial: float = 1.0):
    """Return ``(schedule, context_law)`` for the requested adversary.

    The schedule's callback reads the current context from the history view,
    so the two objects must be used together within one run. ``initial``
    floors the budget so that the greedy reduction's B(1) >= 1 requirement holds.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    state = {"t": 0, "count": 0}

    def budget(t, history):
        if t != state["t"]:
            if t == 1:
                state["count"] = 0
            if history.context == 0:
                state["count"] += 1
            state["t"] = t
        return max(float(initial), float(state["count"]))

    schedule = BudgetSchedule.adaptive_callback(budget, name="prop42")
    schedule.params = {"mode": mode, "initial": float(initial)}

    if mode == "budget-adversary":
        def draw(t, history, rng):
            return int(rng.random() < 0.5)
        law = ContextLaw(draw, stream="ctx")
    else:
        def draw(t, history, rng):
            grew = rng.random() < 0.5
            return 0 if grew else 1
        law = ContextLaw(draw, stream="adv")
    return schedule, law


def prop42_cmab(reward_law: str = "bernoulli") -> CmabEnv:
    return CmabEnv(PROP42_MEANS, reward_law=reward_law)


def prop42_linear(sigma: float = 0.5) -> LinBanditEnv:
    return LinBanditEnv.onehot_embedding(PROP42_MEANS, sigma=sigma)
