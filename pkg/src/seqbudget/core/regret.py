"""Pseudo-regret increments computed from true environment parameters."""
from __future__ import annotations

from .envs import CmabEnv, LinBanditEnv, TabularMdp


def pseudo_regret_increment(env, context, action) -> float:
    """Gap between the best expected payoff in ``context`` and that of ``action``.

    For a :class:`TabularMdp` the context is the initial state and ``action``
    is the (H, S) policy played during the episode.
    """
    if isinstance(env, (CmabEnv, LinBanditEnv)):
        return env.regret(int(context), int(action))
    if isinstance(env, TabularMdp):
        return env.regret(int(context), action)
    raise TypeError(f"unsupported environment {type(env).__name__}")


def regret_cap(env) -> float:
    """Upper bound on a single pseudo-regret increment."""
    if isinstance(env, LinBanditEnv):
        return 2.0
    if isinstance(env, TabularMdp):
        return float(env.H)
    return 1.0
