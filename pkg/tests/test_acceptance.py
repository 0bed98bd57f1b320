"""Exit criteria. Each test prints one PASS/FAIL line and asserts the same condition."""
import json
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from seqbudget.cbm_linear import CbmOful, LinCbmState, batch_ls_oracle, lin_update
from seqbudget.cbm_mab import CbmUcb
from seqbudget.cbm_rl import (CbmRlAgent, RlCounts, empirical_reward_variance, exact_vi_oracle,
                              run_rl)
from seqbudget.core import (BudgetSchedule, InvariantViolation, MabEnv, make_prop42_adversary,
                            prop42_cmab, prop42_linear, random_mdp, rng_stream, run_bandit)
from seqbudget.greedy import GreedyReduction
from seqbudget.harness import INFINITE_BUDGET, cli


def report(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    ACCEPTANCE.append(line)
    return ok


# ---- 1. budget feasibility --------------------------------------------------

def _schedules():
    out = [(BudgetSchedule.fixed(5), None), (BudgetSchedule.linear(0.25), None),
           (BudgetSchedule.polynomial(0.5), None), (BudgetSchedule.periodic(3, 10), None)]
    out.append(make_prop42_adversary("budget-adversary"))
    return out


def _feasibility_run(alg, seed, schedule, law):
    if alg == "cbm-ucb":
        # the adversary needs two contexts; CBM-UCB ignores the context
        env = prop42_cmab() if law is not None else MabEnv(np.linspace(0.4, 0.6, 10))
        return run_bandit(env, CbmUcb(env.n_arms), schedule, 10**4, seed=seed, context_law=law)
    if alg == "cbm-oful":
        env = prop42_linear()
        return run_bandit(env, CbmOful.for_env(env), schedule, 10**4, seed=seed, context_law=law)
    env = random_mdp(4, 2, 4, np.random.default_rng(seed))
    agent = CbmRlAgent(4, 2, 4, alg.removeprefix("cbm-"))
    return run_rl(env, agent, schedule, 2000, seed=seed, context_law=law)


def test_budget_feasibility():
    start = time.perf_counter()
    runs = violations = 0
    for alg in ("cbm-ucb", "cbm-oful", "cbm-ucbvi", "cbm-ulcvi"):
        for seed in range(50):
            for schedule, law in _schedules():
                runs += 1
                try:
                    tr = _feasibility_run(alg, seed, schedule, law)
                except InvariantViolation:
                    violations += 1
                    continue
                violations += not tr.budget_feasible()
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed <= 300
    report(1, ok, f"{runs} runs, {violations} violations, {elapsed:.0f}s of 300s")
    assert violations == 0
    assert elapsed <= 300


# ---- 2. greedy failure vs CBM robustness --------------------------------------

def test_greedy_fails_cbm_robust():
    start = time.perf_counter()
    T = 2 * 10**4
    greedy, reg_T, reg_2T = [], [], []
    for seed in range(20):
        schedule, law = make_prop42_adversary("budget-adversary")
        learner = GreedyReduction(2, 2, rng_stream(seed, 0, "alg"))
        tr = run_bandit(prop42_cmab(), learner, schedule, T, seed=seed, context_law=law)
        greedy.append(tr.regret_cum[-1] / T)
        schedule, law = make_prop42_adversary("budget-adversary")
        env = prop42_linear()
        tr = run_bandit(env, CbmOful.for_env(env), schedule, 2 * T, seed=seed, context_law=law)
        reg_T.append(tr.regret_cum[T - 1])
        reg_2T.append(tr.regret_cum[-1])
    elapsed = time.perf_counter() - start
    g = float(np.mean(greedy))
    o = float(np.mean(reg_T)) / T
    growth = float(np.mean(reg_2T) / np.mean(reg_T))
    ok = g >= 0.20 and o <= 0.10 and growth <= 1.7 and elapsed <= 120
    report(2, ok, f"greedy Reg/T={g:.3f}, oful Reg/T={o:.4f}, "
                  f"Reg(2T)/Reg(T)={growth:.3f}, {elapsed:.0f}s of 120s")
    assert g >= 0.20
    assert o <= 0.10
    assert growth <= 1.7
    assert elapsed <= 120


# ---- 3. polynomial budget scaling --------------------------------------------

_POLY = {}


def _poly_slope(c):
    if c not in _POLY:
        marks = np.array([10**3, 10**4, 10**5])
        regs = []
        for seed in range(20):
            tr = run_bandit(MabEnv(np.linspace(0.4, 0.6, 10)), CbmUcb(10),
                            BudgetSchedule.polynomial(c), int(marks[-1]), seed=seed)
            regs.append(tr.regret_cum[marks - 1])
        mean = np.mean(regs, axis=0)
        _POLY[c] = (np.polyfit(np.log(marks), np.log(mean), 1)[0], mean)
    return _POLY[c]


@pytest.mark.parametrize("c", [0.5, 1.0])
def test_polynomial_scaling(c):
    slope, mean = _poly_slope(c)
    target = 1 - c / 2
    ok = abs(slope - target) <= 0.15
    report(3, ok, f"c={c}: slope {slope:.3f} vs {target:.2f} +/- 0.15, "
                  f"mean regret {np.round(mean, 1).tolist()}")
    assert abs(slope - target) <= 0.15


# ---- 4. skipping least squares vs batch oracle --------------------------------

def test_skipping_least_squares():
    rng = np.random.default_rng(2024)
    worst = 0.0
    checks = 0
    for _ in range(200):
        d = int(rng.integers(1, 6))
        T = int(rng.integers(1, 201))
        p = rng.uniform(0.05, 1.0)
        s = LinCbmState(d, lam=float(rng.uniform(0.1, 2.0)))
        X, y = [], []
        for _ in range(T):
            x = rng.normal(size=d)
            x /= max(np.linalg.norm(x), 1.0)
            r = float(rng.normal())
            if rng.random() >= p:
                continue
            lin_update(s, x, r)
            X.append(x)
            y.append(r)
            ref = batch_ls_oracle(np.array(X), np.array(y), s.lam)
            rel = np.linalg.norm(s.theta - ref) / max(np.linalg.norm(ref), 1e-300)
            worst = max(worst, rel)
            checks += 1
    ok = worst <= 1e-8
    report(4, ok, f"{checks} queried rounds, worst relative error {worst:.2e}")
    assert worst <= 1e-8


# ---- 5. variance estimator ----------------------------------------------------

def test_variance_estimator():
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 51))
        xs = rng.random(n) if rng.random() < 0.5 else rng.integers(0, 2, n).astype(float)
        ref = float(np.var(xs, ddof=1))
        direct = empirical_reward_variance(n, xs.sum(), (xs * xs).sum())
        # the same estimator through the incremental per-tuple statistics
        counts = RlCounts(1, 1, 1)
        for x in xs:
            counts.record_reward(0, 0, 0, x)
        incr = float(counts.reward_variance()[0, 0, 0])
        worst = max(worst, abs(direct - ref), abs(incr - ref))
    small = [empirical_reward_variance(0, 0.0, 0.0), empirical_reward_variance(1, 0.3, 0.09)]
    ok = worst <= 1e-12 and small == [0.0, 0.0]
    report(5, ok, f"worst abs error {worst:.2e}, sizes 0/1 -> {small}")
    assert worst <= 1e-12
    assert small == [0.0, 0.0]


# ---- 6. optimism and the sandwich ---------------------------------------------

def test_optimism_and_sandwich():
    tol = 1e-9
    ucb_ok = ulc_ok = 0
    for seed in range(50):
        env = random_mdp(4, 2, 4, np.random.default_rng(500 + seed))
        v_star = exact_vi_oracle(env.P, env.r)[0][0]
        tr = run_rl(env, CbmRlAgent(4, 2, 4, "ucbvi", delta=0.1), BudgetSchedule.linear(1.0),
                    500, seed=seed, record_values=True)
        v = tr.meta["values"]
        s1 = tr.context.astype(int)
        ucb_ok += bool(np.all(v_star[s1] <= v["v_up"] + tol))

        agent = CbmRlAgent(4, 2, 4, "ulcvi", delta=0.1)
        tr = run_rl(env, agent, BudgetSchedule.linear(1.0), 500, seed=seed, record_values=True)
        v = tr.meta["values"]
        s1 = tr.context.astype(int)
        assert np.allclose(v["v_star"], v_star[s1])
        sandwich = ((v["v_low"] <= v["v_pi"] + tol) & (v["v_pi"] <= v_star[s1] + tol)
                    & (v_star[s1] <= v["v_up"] + tol))
        ulc_ok += bool(np.all(sandwich))
    ok = ucb_ok >= 45 and ulc_ok >= 45
    report(6, ok, f"optimism {ucb_ok}/50, sandwich {ulc_ok}/50, need 45/50")
    assert ucb_ok >= 45
    assert ulc_ok >= 45


def test_sandwich_policy_values_from_oracle():
    # V^pi recorded by the loop equals the oracle's evaluation of the played policy
    env = random_mdp(4, 2, 4, np.random.default_rng(3))
    agent = CbmRlAgent(4, 2, 4, "ulcvi")
    tr = run_rl(env, agent, BudgetSchedule.linear(1.0), 5, seed=0, record_values=True)
    last = exact_vi_oracle(env.P, env.r, agent.tables.policy)[0][0]
    assert tr.meta["values"]["v_pi"][-1] == pytest.approx(last[int(tr.context[-1])])


# ---- 7. full-budget degeneracy ------------------------------------------------

def unlimited():
    return BudgetSchedule.fixed(INFINITE_BUDGET)


def _mab_pair(seed):
    A = 10
    env = MabEnv(np.linspace(0.4, 0.6, A))
    cbm = run_bandit(env, CbmUcb(A), BudgetSchedule.linear(A), 10**4, seed=seed)
    full = run_bandit(env, CbmUcb(A, query_rule="always"), unlimited(), 10**4, seed=seed)
    return cbm, full


def _mab_rule_fires_below_threshold(tr, A=10):
    # B(t) = A t and unit costs: query iff (n v 1) <= t / 16
    counts = np.zeros(A, dtype=int)
    for i in range(len(tr)):
        a = int(tr.action[i])
        if bool(tr.query[i]) != (max(counts[a], 1) * 16 <= i + 1):
            return False
        counts[a] += tr.query[i]
    return True


def test_full_budget_degeneracy():
    ratios = {}
    fires = True
    pairs = {"cbm-ucb": [], "cbm-oful": [], "cbm-ucbvi": [], "cbm-ulcvi": []}
    for seed in range(20):
        cbm, full = _mab_pair(seed)
        fires &= _mab_rule_fires_below_threshold(cbm)
        pairs["cbm-ucb"].append((cbm.regret_cum[-1], full.regret_cum[-1]))
    for seed in range(10):
        env = prop42_linear()
        runs = [run_bandit(env, CbmOful.for_env(env, query_rule=rule), unlimited(), 10**4,
                           seed=seed) for rule in ("cbm", "always")]
        fires &= bool(runs[0].query.all())
        pairs["cbm-oful"].append((runs[0].regret_cum[-1], runs[1].regret_cum[-1]))
    for variant in ("ucbvi", "ulcvi"):
        for seed in range(3):
            env = random_mdp(4, 2, 4, np.random.default_rng(seed))
            runs = [run_rl(env, CbmRlAgent(4, 2, 4, variant, query_rule=rule),
                           unlimited(), 10**4, seed=seed)
                    for rule in ("cbm", "always")]
            fires &= bool(np.all(runs[0].query == 4))
            pairs["cbm-" + variant].append((runs[0].regret_cum[-1], runs[1].regret_cum[-1]))
    for name, vals in pairs.items():
        cbm, full = np.mean(vals, axis=0)
        ratios[name] = cbm / full
    within = all(0.5 <= r <= 2.0 for r in ratios.values())
    shown = ", ".join(f"{k} {v:.3f}" for k, v in ratios.items())
    report(7, within and fires, f"regret ratio vs always-query: {shown}; rules fire: {fires}")
    assert fires
    assert within


# ---- 8. sparse rewards --------------------------------------------------------

def test_sparse_reward_query_savings():
    H, T = 4, 2000
    sparse_reg, full_reg, sparse_q, full_q, standard_q = [], [], [], [], []
    for seed in range(20):
        env = random_mdp(4, 2, H, np.random.default_rng(seed), n_rewarding=1)
        assert env.lr_size == 1
        for schedule, regs, qs in ((BudgetSchedule.stepped(4, 32), sparse_reg, sparse_q),
                                   (BudgetSchedule.linear(H), full_reg, full_q)):
            tr = run_rl(env, CbmRlAgent(4, 2, H, "ucbvi", lr_size=1), schedule, T, seed=seed)
            regs.append(tr.regret_cum[-1])
            qs.append(tr.meta["queries"])
        standard_q.append(H * T)
    reg_ratio = np.mean(sparse_reg) / np.mean(full_reg)
    q_ratio = np.sum(sparse_q) / np.sum(full_q)
    ok = 0.5 <= reg_ratio <= 2.0 and q_ratio <= 0.05
    report(8, ok, f"regret ratio {reg_ratio:.3f}, query ratio {q_ratio:.4f} vs 0.05 "
                  f"(vs H*T queries: {np.sum(sparse_q) / np.sum(standard_q):.4f})")
    assert 0.5 <= reg_ratio <= 2.0
    assert q_ratio <= 0.05


# ---- 9. determinism -----------------------------------------------------------

_DET_CONFIGS = [
    {"environment": {"kind": "mab", "means": [0.3, 0.5, 0.7]}, "algorithm": {"name": "cbm-ucb"},
     "budget": {"kind": "polynomial", "c": 0.5}, "horizon": 3000},
    {"environment": {"kind": "prop42_cmab"}, "algorithm": {"name": "greedy"},
     "budget": {"kind": "prop42"}, "horizon": 2000},
    {"environment": {"kind": "prop42_linear"}, "algorithm": {"name": "cbm-oful"},
     "budget": {"kind": "periodic", "b0": 3, "n": 10}, "horizon": 2000},
    {"environment": {"kind": "random_mdp", "S": 4, "A": 2, "H": 4, "seed": 9},
     "algorithm": {"name": "cbm-ulcvi"}, "budget": {"kind": "linear", "epsilon": 1.0},
     "horizon": 200},
]


def _tree(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*"))
            if p.is_file()}


def test_determinism(tmp_path):
    same = True
    for i, conf in enumerate(_DET_CONFIGS):
        data = dict(conf, name=f"det{i}", replications=3, seed=11,
                    output={"bounds": [{"kind": "mab_lb_unit", "params": {"A": 2, "B": 50}}]})
        path = tmp_path / f"c{i}.json"
        path.write_text(json.dumps(data))
        trees = []
        for run, workers in enumerate((1, 1, 2, 3)):
            out = tmp_path / f"out{i}_{run}"
            assert cli.main(["run", "--config", str(path), "--out", str(out),
                             "--workers", str(workers)]) == 0
            trees.append(_tree(out))
        same &= all(t == trees[0] for t in trees[1:])
    report(9, same, f"{len(_DET_CONFIGS)} configs x 4 runs at 1/1/2/3 workers")
    assert same
