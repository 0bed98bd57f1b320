"""CBM-UCBVI and CBM-ULCVI agents and the episodic interaction loop."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.budget import BudgetSchedule, QueryLedger
from ..core.errors import InvariantViolation
from ..core.rng import run_streams
from ..core.trace import History, RunTrace
from .bonuses import RlCounts, log_term, query_threshold, ucbvi_transition_bonus
from .planning import ValueTables, optimistic_pessimistic_vi, truncated_vi

VARIANTS = ("ucbvi", "ulcvi")


class CbmRlAgent:
    """Tabular optimistic agent that queries rewards by confidence-budget matching.

    ``lr_size`` is the (upper bound on the) number of rewarding (s, a, h)
    tuples; it defaults to S*A*H. ``query_rule="always"`` queries every
    visited step the ledger can pay for.
    """

    def __init__(self, S: int, A: int, H: int, variant: str = "ucbvi", delta: float = 0.1,
                 lr_size=None, query_rule: str = "cbm"):
        if variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if query_rule not in ("cbm", "always"):
            raise ValueError("query_rule must be 'cbm' or 'always'")
        if not 0 < delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        self.S, self.A, self.H = int(S), int(A), int(H)
        self.variant = variant
        self.delta = float(delta)
        self.lr_size = S * A * H if lr_size is None else int(lr_size)
        self.query_rule = query_rule
        self.counts = RlCounts(S, A, H)
        self.t = 0
        self.tables: ValueTables | None = None
        self.L = None
        self._reward_bonus = None
        prefix = "cbm-" if query_rule == "cbm" else ""
        self.name = prefix + variant

    def plan(self) -> np.ndarray:
        """Start episode t: rebuild value tables from statistics of episodes < t."""
        self.t += 1
        c = self.counts
        self.L = log_term(self.t, self.S, self.A, self.H, self.delta, self.variant)
        L = self.L
        p_bar = c.p_bar()
        r_bar = c.r_bar()
        # same value as rl_reward_bonus(var, nq, L), from the cached 1 / (nq v 1)
        b_r = np.sqrt(2.0 * L * c.reward_variance() * c.inv_nq) + 5.0 * L * c.inv_nq
        self._reward_bonus = b_r
        if self.variant == "ucbvi":
            b_p = ucbvi_transition_bonus(c.n, self.H, L)
            self.tables = truncated_vi(p_bar, r_bar + b_r + b_p)
        else:
            self.tables = optimistic_pessimistic_vi(p_bar, r_bar, b_r, c.n, L)
        return self.tables.policy

    def reward_ci(self, h: int, s: int, a: int) -> float:
        return 2.0 * float(self._reward_bonus[h, s, a])

    def decide(self, states, actions, budget: float, ledger: QueryLedger) -> np.ndarray:
        """Query decisions for the observed trajectory, in step order, one B(t) snapshot."""
        H = self.H
        q = np.zeros(H, dtype=bool)
        if self.query_rule == "always":
            thr = -np.inf if budget >= 1 else np.inf
        else:
            thr = query_threshold(self.lr_size, budget, self.S, self.A, H, self.L)
        for h in range(H):
            if self.reward_ci(h, states[h], actions[h]) >= thr and ledger.can_afford(None, budget):
                ledger.charge(None, budget)
                q[h] = True
        return q

    def update(self, states, actions, rewards, q) -> None:
        c = self.counts
        c.record_visits(states, actions)
        for h in np.flatnonzero(q):
            c.record_reward(h, states[h], actions[h], rewards[h])


@dataclass
class EpisodeResult:
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    queries: np.ndarray
    policy: np.ndarray
    budget: float


def run_episode(agent: CbmRlAgent, env, schedule: BudgetSchedule, ledger: QueryLedger,
                rng: np.random.Generator, s1: int, t: int, history=None) -> EpisodeResult:
    """Plan, roll out, observe B(t), query along the trajectory, update statistics."""
    policy = agent.plan()
    states, actions, rewards = env.rollout(policy, s1, rng)
    budget = schedule.advance(t, history)
    q = agent.decide(states, actions, budget, ledger)
    agent.update(states, actions, rewards, q)
    return EpisodeResult(states, actions, rewards, q, policy, budget)


def run_rl(env, agent: CbmRlAgent, schedule: BudgetSchedule, T: int, *, seed: int = 0,
           replication: int = 0, context_law=None, record_values: bool = False) -> RunTrace:
    """Run ``T`` episodes; pseudo-regret is V*_1(s_1) - V^{pi_t}_1(s_1) from exact DP.

    With ``record_values`` the trace meta carries per-episode V*, V^pi and the
    agent's upper (and lower) initial-state values for optimism checks.
    """
    if T < 1:
        raise ValueError("horizon must be >= 1")
    streams = run_streams(seed, replication)
    env_rng = streams["env"]
    law_rng = streams[context_law.stream] if context_law is not None else streams["ctx"]
    trace = RunTrace.empty(T)
    observed = np.full(T, np.nan)
    history = History(trace, observed)
    ledger = QueryLedger()
    schedule.reset()
    v_star = env.optimal()[0][0]
    values = {}  # policy bytes -> V^pi_1
    if record_values:
        rec = {k: np.zeros(T) for k in ("v_star", "v_pi", "v_up", "v_low")}

    for i in range(T):
        t = i + 1
        history.t = t
        s1 = env.draw_initial(law_rng) if context_law is None else context_law(t, history, law_rng)
        history.context = s1
        res = run_episode(agent, env, schedule, ledger, env_rng, s1, t, history)
        key = res.policy.tobytes()
        last_value = values.get(key)
        if last_value is None:
            last_value = values[key] = env.policy_value(res.policy)[0]
        nq = int(res.queries.sum())
        trace.context[i] = s1
        trace.action[i] = res.actions[0]
        trace.query[i] = nq
        trace.budget[i] = res.budget
        trace.budget_used[i] = ledger.used
        trace.regret_inst[i] = v_star[s1] - last_value[s1]
        if nq:
            observed[i] = float(res.rewards[res.queries].sum())
        if ledger.used > res.budget + 1e-9:
            raise InvariantViolation("B^q(t) > B(t)", round=t, algorithm=agent.name,
                                     seed=seed, replication=replication)
        if record_values:
            tab = agent.tables
            rec["v_star"][i] = v_star[s1]
            rec["v_pi"][i] = last_value[s1]
            rec["v_up"][i] = tab.V_up[0, s1]
            rec["v_low"][i] = tab.V_low[0, s1] if tab.V_low is not None else np.nan

    trace.finalize()
    trace.meta.update(algorithm=agent.name, seed=seed, replication=replication,
                      queries=int(ledger.n_q))
    if record_values:
        trace.meta["values"] = rec
    return trace
