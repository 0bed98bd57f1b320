"""Exact finite-horizon dynamic programming on a known MDP."""
from __future__ import annotations

import numpy as np


def exact_vi_oracle(P, r, policy=None):
    """Backward induction on the true model.

    Returns ``(V, Q)`` with ``V`` of shape (H+1, S) (``V[H] = 0``) and ``Q`` of
    shape (H, S, A). Without ``policy`` this is V*/Q*; with a deterministic
    nonstationary ``policy[h, s]`` it evaluates that policy.
    """
    P = np.asarray(P, dtype=float)
    r = np.asarray(r, dtype=float)
    H, S, A = r.shape
    V = np.zeros((H + 1, S))
    Q = np.empty((H, S, A))
    idx = np.arange(S)
    for h in range(H - 1, -1, -1):
        Q[h] = r[h] + P[h] @ V[h + 1]
        if policy is None:
            V[h] = Q[h].max(axis=1)
        else:
            V[h] = Q[h][idx, np.asarray(policy[h])]
    return V, Q
