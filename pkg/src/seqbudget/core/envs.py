"""Stochastic environments with known true parameters.

Each environment exposes the ground truth needed for pseudo-regret and a
sampler that draws from a caller-supplied generator.
"""
from __future__ import annotations

from bisect import bisect_right
from typing import Optional

import numpy as np

from .errors import InvalidEnvironment

_ROW_TOL = 1e-12


def _check_probs(p, name):
    p = np.asarray(p, dtype=float)
    if (p < 0).any() or abs(p.sum() - 1.0) > _ROW_TOL:
        raise InvalidEnvironment(f"{name} must be a probability vector")
    return p


class CmabEnv:
    """Contextual MAB with ``n_contexts`` independent arm-mean rows.

    Rewards are Bernoulli(r(u, a)) by default, or Gaussian noise around the
    mean clipped to [0, 1] (``reward_law="gaussian"``).
    """

    kind = "cmab"

    def __init__(self, means, context_probs=None, reward_law: str = "bernoulli",
                 sigma: float = 0.1):
        means = np.atleast_2d(np.asarray(means, dtype=float))
        if means.ndim != 2 or means.shape[1] < 2:
            raise InvalidEnvironment("need at least two arms per context")
        if (means < 0).any() or (means > 1).any():
            raise InvalidEnvironment("mean rewards must lie in [0, 1]")
        if reward_law not in ("bernoulli", "gaussian"):
            raise InvalidEnvironment(f"unknown reward law {reward_law!r}")
        self.means = means
        self.n_contexts, self.n_arms = means.shape
        if context_probs is None:
            context_probs = np.full(self.n_contexts, 1.0 / self.n_contexts)
        self.context_probs = _check_probs(context_probs, "context_probs")
        if len(self.context_probs) != self.n_contexts:
            raise InvalidEnvironment("context_probs length mismatch")
        self._context_cdf = np.cumsum(self.context_probs)
        self.reward_law = reward_law
        self.sigma = float(sigma)
        self.best = means.max(axis=1)

    def draw_context(self, rng: np.random.Generator) -> int:
        if self.n_contexts == 1:
            return 0
        u = int(np.searchsorted(self._context_cdf, rng.random(), side="right"))
        return min(u, self.n_contexts - 1)

    def sample_reward(self, context: int, action: int, rng: np.random.Generator) -> float:
        mean = self.means[context, action]
        if self.reward_law == "bernoulli":
            return 1.0 if rng.random() < mean else 0.0
        x = mean + self.sigma * rng.standard_normal()
        return min(1.0, max(0.0, x))

    def regret(self, context: int, action: int) -> float:
        return float(self.best[context] - self.means[context, action])


class MabEnv(CmabEnv):
    kind = "mab"

    def __init__(self, means, reward_law: str = "bernoulli", sigma: float = 0.1):
        means = np.asarray(means, dtype=float)
        if means.ndim != 1:
            raise InvalidEnvironment("MAB means must be a vector")
        super().__init__(means[None, :], None, reward_law, sigma)

    @property
    def arm_means(self) -> np.ndarray:
        return self.means[0]


class LinBanditEnv:
    """Linear bandit over finite action sets selected by a context index.

    ``action_sets`` has shape (K, A, d); the context drawn at round t picks
    which of the K sets is offered. Rewards are <x, theta> + sigma * N(0, 1).
    """

    kind = "linear"

    def __init__(self, theta, action_sets, sigma: float = 0.1, context_probs=None,
                 L: Optional[float] = None, D: Optional[float] = None):
        theta = np.asarray(theta, dtype=float)
        sets = np.asarray(action_sets, dtype=float)
        if sets.ndim == 2:
            sets = sets[None]
        if sets.ndim != 3 or sets.shape[2] != theta.shape[0]:
            raise InvalidEnvironment("action_sets must have shape (K, A, d)")
        self.theta = theta
        self.action_sets = sets
        self.n_contexts, self.n_arms, self.d = sets.shape
        self.sigma = float(sigma)
        norms = np.linalg.norm(sets, axis=2)
        self.L = float(norms.max()) if L is None else float(L)
        self.D = float(np.linalg.norm(theta)) if D is None else float(D)
        if norms.max() > self.L + 1e-12:
            raise InvalidEnvironment("an action exceeds the norm bound L")
        if np.linalg.norm(theta) > self.D + 1e-12:
            raise InvalidEnvironment("theta exceeds the norm bound D")
        self.values = sets @ theta
        if np.abs(self.values).max() > 1 + 1e-12:
            raise InvalidEnvironment("linear rewards <x, theta> must lie in [-1, 1]")
        if context_probs is None:
            context_probs = np.full(self.n_contexts, 1.0 / self.n_contexts)
        self.context_probs = _check_probs(context_probs, "context_probs")
        self._context_cdf = np.cumsum(self.context_probs)
        self.best = self.values.max(axis=1)

    @classmethod
    def onehot_embedding(cls, means, sigma: float = 0.1, context_probs=None) -> "LinBanditEnv":
        """Embed an S x A contextual MAB as a linear bandit with d = S * A."""
        means = np.atleast_2d(np.asarray(means, dtype=float))
        S, A = means.shape
        sets = np.zeros((S, A, S * A))
        for u in range(S):
            for a in range(A):
                sets[u, a, u * A + a] = 1.0
        return cls(means.reshape(-1), sets, sigma=sigma, context_probs=context_probs)

    def draw_context(self, rng: np.random.Generator) -> int:
        if self.n_contexts == 1:
            return 0
        u = int(np.searchsorted(self._context_cdf, rng.random(), side="right"))
        return min(u, self.n_contexts - 1)

    def sample_reward(self, context: int, action: int, rng: np.random.Generator) -> float:
        return float(self.values[context, action] + self.sigma * rng.standard_normal())

    def regret(self, context: int, action: int) -> float:
        return float(self.best[context] - self.values[context, action])


class TabularMdp:
    """Finite-horizon MDP with step-dependent kernels P[h, s, a, s'] and means r[h, s, a].

    Steps are 0-based internally (h = 0 .. H-1). Rewards are Bernoulli(r) and
    identically zero outside the support L_R.
    """

    kind = "mdp"

    def __init__(self, P, r, init=None, reward_support=None):
        P = np.asarray(P, dtype=float)
        r = np.asarray(r, dtype=float)
        if P.ndim != 4 or r.shape != P.shape[:3] or P.shape[1] != P.shape[3]:
            raise InvalidEnvironment("expected P of shape (H,S,A,S) and r of shape (H,S,A)")
        if (P < 0).any() or np.abs(P.sum(axis=3) - 1.0).max() > _ROW_TOL:
            raise InvalidEnvironment("transition rows must be distributions")
        if (r < 0).any() or (r > 1).any():
            raise InvalidEnvironment("mean rewards must lie in [0, 1]")
        self.P, self.r = P, r
        self.H, self.S, self.A = r.shape
        if init is None:
            init = np.full(self.S, 1.0 / self.S)
        self.init = _check_probs(init, "init")
        self._init_cdf = np.cumsum(self.init)
        self._cum_P = np.cumsum(P, axis=3)
        # nested lists: scalar lookups in the rollout loop are much cheaper than on arrays
        self._cum_list = self._cum_P.tolist()
        self._r_list = self.r.tolist()
        support = {(int(s), int(a), int(h)) for h, s, a in zip(*np.nonzero(r))}
        if reward_support is not None:
            given = {tuple(int(v) for v in item) for item in reward_support}
            if given != support:
                raise InvalidEnvironment("reward_support does not match the nonzero rewards")
        self.reward_support = support
        self._opt = None

    @property
    def lr_size(self) -> int:
        return len(self.reward_support)

    @property
    def n_contexts(self) -> int:
        return self.S

    def draw_initial(self, rng: np.random.Generator) -> int:
        s = int(np.searchsorted(self._init_cdf, rng.random(), side="right"))
        return min(s, self.S - 1)

    draw_context = draw_initial

    def rollout(self, policy, s1: int, rng: np.random.Generator):
        """Play the deterministic nonstationary ``policy[h, s]`` from ``s1``.

        Rewards are realized at every step (observed only if queried). Always
        consumes exactly 2H uniforms so noise stays aligned across learners.
        """
        H = self.H
        u = rng.random(2 * H).tolist()
        pol = policy.tolist() if isinstance(policy, np.ndarray) else policy
        cum, rew = self._cum_list, self._r_list
        states, actions, rewards = [0] * H, [0] * H, [0.0] * H
        s = int(s1)
        last = self.S - 1
        for h in range(H):
            a = pol[h][s]
            states[h] = s
            actions[h] = a
            rewards[h] = 1.0 if u[H + h] < rew[h][s][a] else 0.0
            nxt = bisect_right(cum[h][s][a], u[h])
            s = nxt if nxt <= last else last
        states = np.array(states, dtype=np.int64)
        actions = np.array(actions, dtype=np.int64)
        rewards = np.array(rewards)
        return states, actions, rewards

    def optimal(self):
        """Cached (V*, Q*) from exact dynamic programming."""
        if self._opt is None:
            from ..cbm_rl.oracle import exact_vi_oracle
            self._opt = exact_vi_oracle(self.P, self.r)
        return self._opt

    def policy_value(self, policy) -> np.ndarray:
        from ..cbm_rl.oracle import exact_vi_oracle
        return exact_vi_oracle(self.P, self.r, policy)[0]

    def regret(self, s1: int, policy) -> float:
        v_star = self.optimal()[0]
        return float(v_star[0, s1] - self.policy_value(policy)[0, s1])


def random_mdp(S: int, A: int, H: int, rng: np.random.Generator, *, n_rewarding=None,
               reward_range=(0.0, 1.0), terminal_reward: bool = False,
               dirichlet: float = 1.0) -> TabularMdp:
    """Draw a random tabular MDP.

    With ``terminal_reward=False`` the last step pays nothing, so the return is
    the sum over steps 1..H-1; this is the return for which the (H - h)
    truncation of optimistic value iteration is a valid upper bound.
    ``n_rewarding`` limits the reward support to that many (s, a, h) tuples.
    """
    P = rng.dirichlet(np.full(S, dirichlet), size=(H, S, A))
    P /= P.sum(axis=3, keepdims=True)
    lo, hi = reward_range
    r = rng.uniform(lo, hi, size=(H, S, A))
    if not terminal_reward:
        r[H - 1] = 0.0
    if n_rewarding is not None:
        steps = H if terminal_reward else H - 1
        cells = steps * S * A
        if not 0 <= n_rewarding <= cells:
            raise InvalidEnvironment("too many rewarding tuples requested")
        keep = rng.choice(cells, size=n_rewarding, replace=False)
        mask = np.zeros(H * S * A, dtype=bool)
        mask[keep] = True
        r = np.where(mask.reshape(H, S, A), np.maximum(r, 1e-3), 0.0)
    return TabularMdp(P, r)
