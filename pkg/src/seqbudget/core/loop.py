"""The round-by-round interaction protocol for (contextual/linear) bandits.

Per round: the context arrives, the budget B(t) is revealed (adversaries see
only F_{t-1} and u_t), the learner acts and decides whether to query, the
environment realizes R_t (always drawn, observed only when queried) and the
ledger is charged. Budget feasibility is asserted every round.
"""
from __future__ import annotations

from typing import Protocol

import numpy as np

from .budget import BudgetSchedule, QueryLedger
from .errors import InvariantViolation
from .rng import run_streams
from .trace import History, RunTrace


class BanditLearner(Protocol):
    name: str

    def act(self, context: int, budget: float, ledger: QueryLedger) -> tuple[int, bool]:
        ...

    def observe(self, context: int, action: int, reward: float) -> None:
        ...


def run_bandit(env, learner, schedule: BudgetSchedule, T: int, *, seed: int = 0,
               replication: int = 0, context_law=None, costs=None) -> RunTrace:
    if T < 1:
        raise ValueError("horizon must be >= 1")
    streams = run_streams(seed, replication)
    env_rng = streams["env"]
    trace = RunTrace.empty(T)
    observed = np.full(T, np.nan)
    history = History(trace, observed)
    ledger = QueryLedger(costs)
    schedule.reset()
    name = getattr(learner, "name", type(learner).__name__)

    contexts, actions, queries = trace.context, trace.action, trace.query
    budgets, used, inst = trace.budget, trace.budget_used, trace.regret_inst
    law_rng = streams[context_law.stream] if context_law is not None else streams["ctx"]
    regret = env.regret

    for i in range(T):
        t = i + 1
        history.t = t
        if context_law is None:
            u = env.draw_context(law_rng)
        else:
            u = context_law(t, history, law_rng)
        history.context = u
        B = schedule.advance(t, history)
        a, q = learner.act(u, B, ledger)
        R = env.sample_reward(u, a, env_rng)
        if q:
            if not ledger.can_afford(a, B):
                raise InvariantViolation(
                    f"learner queried without budget (B={B}, used={ledger.used})",
                    round=t, algorithm=name, seed=seed, replication=replication)
            ledger.charge(a, B)
            learner.observe(u, a, R)
            observed[i] = R
        contexts[i] = u
        actions[i] = a
        queries[i] = q
        budgets[i] = B
        used[i] = ledger.used
        inst[i] = regret(u, a)

    trace.finalize()
    if not trace.budget_feasible():
        bad = int(np.argmax(trace.budget_used > trace.budget + 1e-9)) + 1
        raise InvariantViolation("B^q(t) > B(t)", round=bad, algorithm=name,
                                 seed=seed, replication=replication)
    trace.meta.update(algorithm=name, seed=seed, replication=replication,
                      queries=int(ledger.n_q))
    return trace
