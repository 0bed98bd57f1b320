"""Greedy reduction: query whenever the budget allows, otherwise replay a past policy.

On a round with spare budget the base anytime learner advances one
iteration, acts, and receives the reward. Without budget, an iteration
``j ~ Uniform{1..l}`` is drawn and the frozen policy of that iteration acts;
nothing is learned from such rounds.
"""
from __future__ import annotations

import math

import numpy as np

from .core.errors import NoSnapshot, RewardOutOfRange


class AnytimeUcb:
    """Per-context UCB whose bonus uses the iteration count ``l``.

    Iteration ``l`` acts with ``argmax_a rbar(u, a) + sqrt(3 ln(A l) / (2 (n(u, a) v 1)))``
    using the data of the first ``l - 1`` queried rounds.
    """

    def __init__(self, n_contexts: int, n_arms: int):
        if n_arms < 2:
            raise ValueError("need at least two arms")
        self.n_contexts, self.n_arms = int(n_contexts), int(n_arms)
        self.counts = np.zeros((n_contexts, n_arms), dtype=np.int64)
        self.means = np.zeros((n_contexts, n_arms))
        self.iteration = 0

    def stats(self):
        return self.counts, self.means

    @staticmethod
    def decide(counts, means, iteration: int, context: int, n_arms: int) -> int:
        scale = math.sqrt(1.5 * math.log(n_arms * iteration))
        n = np.maximum(counts[context], 1)
        return int(np.argmax(means[context] + scale * (1.0 / np.sqrt(n))))

    def advance(self) -> int:
        self.iteration += 1
        return self.iteration

    def act(self, context: int) -> int:
        return self.decide(self.counts, self.means, self.iteration, context, self.n_arms)

    def update(self, context: int, action: int, reward: float) -> None:
        if not 0.0 <= reward <= 1.0:
            raise RewardOutOfRange(f"reward {reward} outside [0, 1]")
        n = self.counts[context, action] + 1
        self.counts[context, action] = n
        self.means[context, action] += (reward - self.means[context, action]) / n


class SnapshotStore:
    """Append-only store of frozen base statistics, one per iteration.

    Backed by growable arrays so that long runs do not allocate one object
    per snapshot. Snapshot ``j`` (1-based) holds the statistics iteration ``j``
    acted from.
    """

    def __init__(self, shape):
        self._shape = tuple(shape)
        self._counts = np.zeros((16,) + self._shape, dtype=np.int64)
        self._means = np.zeros((16,) + self._shape)
        self.size = 0

    def push(self, counts, means) -> None:
        if self.size == len(self._counts):
            self._counts = np.concatenate([self._counts, np.zeros_like(self._counts)])
            self._means = np.concatenate([self._means, np.zeros_like(self._means)])
        self._counts[self.size] = counts
        self._means[self.size] = means
        self.size += 1

    def get(self, j: int):
        if not 1 <= j <= self.size:
            raise IndexError(j)
        counts = self._counts[j - 1]
        means = self._means[j - 1]
        counts.flags.writeable = False
        means.flags.writeable = False
        return counts, means


class GreedyReduction:
    """Greedy reduction around :class:`AnytimeUcb` for (contextual) MAB."""

    name = "greedy"

    def __init__(self, n_contexts: int, n_arms: int, rng: np.random.Generator):
        self.base = AnytimeUcb(n_contexts, n_arms)
        self.snapshots = SnapshotStore((n_contexts, n_arms))
        self.rng = rng
        self.last_replayed = None

    @property
    def l(self) -> int:
        return self.base.iteration

    def act(self, context, budget, ledger):
        return greedy_step(self, context, budget, ledger, self.rng)

    def observe(self, context, action, reward):
        self.base.update(context, action, reward)


def greedy_step(state: GreedyReduction, context: int, budget: float, ledger, rng):
    """One round of the greedy reduction; returns ``(action, query)``.

    The candidate action of iteration ``l + 1`` is formed first so that an
    action-dependent cost can be checked: query iff ``B(t) - B^q(t-1) >= c(a)``.
    """
    base = state.base
    nxt = base.iteration + 1
    candidate = base.decide(base.counts, base.means, nxt, context, base.n_arms)
    if ledger.can_afford(candidate, budget):
        base.advance()
        state.snapshots.push(base.counts, base.means)
        state.last_replayed = None
        return candidate, True
    l = base.iteration
    if l == 0:
        raise NoSnapshot("no budget and no stored policy; greedy needs B(1) >= 1")
    j = int(rng.integers(1, l + 1))
    counts, means = state.snapshots.get(j)
    state.last_replayed = j
    return base.decide(counts, means, j, context, base.n_arms), False
