"""CBM-OFUL: optimistic linear bandit with least squares over queried rounds only.

Unqueried rounds contribute nothing to the design matrix ``V = lam I + sum x x^T``
or to the target vector, so the estimator is ordinary ridge regression on the
queried subsequence. A reward is requested when
``||x_t||_{V^{-1}} >= v_{B(t)} / sqrt(B(t))``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .core.errors import SingularDesign


class LinCbmState:
    """Design matrix, target vector and ridge estimate for CBM-OFUL."""

    def __init__(self, d: int, *, lam=None, sigma: float = 1.0, L: float = 1.0,
                 D: float = 1.0, delta: float = 0.1):
        if not 0 < delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if lam is None:
            lam = max(D ** -0.5, 1.0) if D > 0 else 1.0
        if lam <= 0:
            raise ValueError("lambda must be positive")
        self.d = int(d)
        self.lam, self.sigma, self.L = float(lam), float(sigma), float(L)
        self.D, self.delta = float(D), float(delta)
        self.V = self.lam * np.eye(d)
        self.s_vec = np.zeros(d)
        self.theta = np.zeros(d)
        self.V_inv = np.eye(d) / self.lam
        self.t = 0
        self.n_q = 0
        self.potential = 0.0  # sum over queried rounds of min(||x||^2_{V^{-1}}, 1)
        self.version = 0

    def refactor(self) -> None:
        """Fresh Cholesky solve for theta and V^{-1} from the current V."""
        try:
            factor = cho_factor(self.V, lower=True, check_finite=False)
        except np.linalg.LinAlgError as exc:
            raise SingularDesign("design matrix is not positive definite") from exc
        self.theta = cho_solve(factor, self.s_vec, check_finite=False)
        self.V_inv = cho_solve(factor, np.eye(self.d), check_finite=False)
        self.version += 1


def radius(state: LinCbmState, t: int) -> float:
    """Confidence radius l_t of the ellipsoid around theta-hat."""
    if t < 0:
        raise ValueError("t must be >= 0")
    s = state
    inner = 2.0 * s.d * math.log((1.0 + t * s.L ** 2 / s.lam) / s.delta)
    return max(1.0, s.sigma * math.sqrt(inner) + math.sqrt(s.lam) * s.D)


def potential_scale(state: LinCbmState, x: float) -> float:
    """v_x = sqrt(2 d ln(1 + x L^2 / (d lam)))."""
    s = state
    return math.sqrt(2.0 * s.d * math.log(1.0 + x * s.L ** 2 / (s.d * s.lam)))


def weighted_norm(state: LinCbmState, x) -> float:
    x = np.asarray(x, dtype=float)
    return math.sqrt(max(float(x @ state.V_inv @ x), 0.0))


def ucb_value(state: LinCbmState, x, t=None) -> float:
    """<x, theta-hat> + l_{t-1} ||x||_{V^{-1}} for the round ``t`` (default: current)."""
    t = state.t if t is None else t
    x = np.asarray(x, dtype=float)
    return float(x @ state.theta) + radius(state, max(t - 1, 0)) * weighted_norm(state, x)


def confidence_width(state: LinCbmState, x, t=None) -> float:
    """CI_t(x) = 2 l_{t-1} min(||x||_{V^{-1}}, 1); logged, not used for the decision."""
    t = state.t if t is None else t
    return 2.0 * radius(state, max(t - 1, 0)) * min(weighted_norm(state, x), 1.0)


def lin_select(state: LinCbmState, X, t=None) -> int:
    X = np.asarray(X, dtype=float)
    t = state.t if t is None else t
    sq = np.einsum("ij,jk,ik->i", X, state.V_inv, X)
    scores = X @ state.theta + radius(state, max(t - 1, 0)) * np.sqrt(np.maximum(sq, 0.0))
    return int(np.argmax(scores))


def query_threshold(state: LinCbmState, budget: float) -> float:
    if budget < 1:
        return math.inf
    return potential_scale(state, budget) / math.sqrt(budget)


def lin_should_query(state: LinCbmState, x, budget: float, ledger=None, action=None) -> bool:
    """Raw-norm rule ``||x||_{V^{-1}} >= v_{B} / sqrt(B)``; B(t) < 1 never queries."""
    if budget < 1:
        return False
    fire = weighted_norm(state, x) >= query_threshold(state, budget)
    if fire and ledger is not None:
        return ledger.can_afford(action, budget)
    return fire


def lin_update(state: LinCbmState, x, reward: float) -> LinCbmState:
    x = np.asarray(x, dtype=float)
    state.potential += min(float(x @ state.V_inv @ x), 1.0)
    state.V += np.outer(x, x)
    state.s_vec += reward * x
    state.n_q += 1
    state.refactor()
    return state


def batch_ls_oracle(X, y, lam: float) -> np.ndarray:
    """Ridge solution of (lam I + X^T X) theta = X^T y from scratch."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.size == 0:
        return np.zeros(X.shape[1] if X.ndim == 2 else 0)
    d = X.shape[1]
    return np.linalg.solve(lam * np.eye(d) + X.T @ X, X.T @ y)


def elliptical_potential_bound(state: LinCbmState) -> float:
    s = state
    return 2.0 * s.d * math.log(1.0 + s.n_q * s.L ** 2 / (s.d * s.lam))


class CbmOful:
    """CBM-OFUL learner over the finite action sets of a :class:`LinBanditEnv`.

    Per-context means and squared norms are cached and recomputed only after
    the design matrix changes; only the radius moves on unqueried rounds.
    """

    name = "cbm-oful"

    def __init__(self, action_sets, *, lam=None, sigma: float = 1.0, L: float = 1.0,
                 D: float = 1.0, delta: float = 0.1, query_rule: str = "cbm"):
        if query_rule not in ("cbm", "always"):
            raise ValueError("query_rule must be 'cbm' or 'always'")
        sets = np.asarray(action_sets, dtype=float)
        if sets.ndim == 2:
            sets = sets[None]
        self.action_sets = sets
        self.state = LinCbmState(sets.shape[2], lam=lam, sigma=sigma, L=L, D=D, delta=delta)
        self.query_rule = query_rule
        if query_rule == "always":
            self.name = "oful"
        self._cache = {}
        self._last = None

    @classmethod
    def for_env(cls, env, **kwargs):
        kwargs.setdefault("sigma", env.sigma)
        kwargs.setdefault("L", env.L)
        kwargs.setdefault("D", env.D)
        return cls(env.action_sets, **kwargs)

    def _context_stats(self, u):
        st = self.state
        hit = self._cache.get(u)
        if hit is not None and hit[0] == st.version:
            return hit[1], hit[2]
        X = self.action_sets[u]
        means = X @ st.theta
        sq = np.maximum(np.einsum("ij,jk,ik->i", X, st.V_inv, X), 0.0)
        self._cache[u] = (st.version, means, sq)
        return means, sq

    def act(self, context, budget, ledger):
        st = self.state
        st.t += 1
        means, sq = self._context_stats(context)
        l_prev = radius(st, st.t - 1)
        a = int(np.argmax(means + l_prev * np.sqrt(sq)))
        if self.query_rule == "always":
            q = budget > 0 and ledger.can_afford(a, budget)
        elif budget < 1:
            q = False
        else:
            v = potential_scale(st, budget)
            # ||x||^2 B >= v^2 is the squared form of the raw-norm rule
            q = sq[a] * budget >= v * v and ledger.can_afford(a, budget)
        return a, q

    def observe(self, context, action, reward):
        lin_update(self.state, self.action_sets[context, action], reward)

    def confidence_holds(self, theta_star) -> bool:
        """||theta-hat - theta*||_V <= l_t at the end of the current round."""
        st = self.state
        diff = st.theta - np.asarray(theta_star, dtype=float)
        return math.sqrt(float(diff @ st.V @ diff)) <= radius(st, st.t)
