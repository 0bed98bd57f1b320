import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqbudget.cbm_mab import (CbmUcb, MabCbmState, mab_bonus, mab_ci, mab_select,
                               mab_should_query, mab_threshold, mab_update)
from seqbudget.core import (BudgetSchedule, InvalidEnvironment, MabEnv, QueryLedger,
                            RewardOutOfRange, run_bandit, run_streams)


def _state(counts, means, t):
    st_ = MabCbmState(len(counts))
    for a, (n, m) in enumerate(zip(counts, means)):
        for k in range(n):
            # feed n copies of the mean; exact for 0/1 means used below
            mab_update(st_, a, m)
    st_.t = t
    return st_


def test_bonus_first_round():
    s = MabCbmState(2)
    assert mab_bonus(s, 0, t=1) == pytest.approx(math.sqrt(3 * math.log(2) / 2), rel=1e-12)
    # sqrt(1.5 * 0.693147...) = 1.019667, which the rounded figure 1.0198 approximates
    assert mab_bonus(s, 0, t=1) == pytest.approx(1.0198, abs=2e-4)


def test_bonus_scaling():
    s = _state([1, 4], [1.0, 1.0], 50)
    assert mab_bonus(s, 1) == pytest.approx(mab_bonus(s, 0) / 2)
    assert mab_ci(s, 0) == pytest.approx(math.sqrt(6 * math.log(100) / 1))
    big = _state([0, 0], [0, 0], 50)
    big.counts[:] = 10**12
    assert mab_bonus(big, 0) < 1e-5


def test_select_ties_and_dominance():
    assert mab_select(MabCbmState(3), t=1) == 0
    s = MabCbmState(2)
    s.counts[:] = [5, 5]
    s.means[:] = [0.9, 0.1]
    s._inv_sqrt[:] = 1 / math.sqrt(5)
    assert mab_select(s, t=10) == 0


def test_select_prefers_less_queried():
    s = MabCbmState(2)
    s.counts[:] = [100, 1]
    s.means[:] = [0.5, 0.5]
    s._inv_sqrt[:] = [0.1, 1.0]
    assert mab_select(s, t=200) == 1


def test_query_example():
    s = MabCbmState(2)
    s.t = 10
    ci = mab_ci(s, 0)
    thr = mab_threshold(s, 100)
    assert ci == pytest.approx(4.24, abs=0.01)
    assert thr == pytest.approx(2.40, abs=0.01)
    assert mab_should_query(s, 0, 100)
    assert not mab_should_query(s, 0, 0)


@pytest.mark.parametrize("n", range(6))
def test_rearranged_rule_enumeration(n):
    # sum c = 2, B = 64: query iff (n v 1) <= 64 / 32 = 2
    s = MabCbmState(2)
    s.counts[0] = n
    s.t = 7
    direct = mab_ci(s, 0) >= mab_threshold(s, 64)
    assert mab_should_query(s, 0, 64) == direct == (max(n, 1) <= 2)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 500), st.integers(1, 10**6), st.floats(0.5, 10**5),
       st.lists(st.floats(0.1, 3), min_size=2, max_size=6))
def test_rule_matches_ci_form(n, t, B, costs):
    s = MabCbmState(len(costs), costs)
    s.counts[0] = n
    s.t = t
    ci, thr = mab_ci(s, 0), mab_threshold(s, B)
    if abs(ci - thr) > 1e-9 * thr:
        assert mab_should_query(s, 0, B) == (ci >= thr)


def test_update_and_range():
    s = MabCbmState(2)
    mab_update(s, 0, 1.0)
    assert (s.counts[0], s.means[0]) == (1, 1.0)
    mab_update(s, 0, 0.0)
    assert (s.counts[0], s.means[0]) == (2, 0.5)
    with pytest.raises(RewardOutOfRange):
        mab_update(s, 1, 1.5)
    with pytest.raises(InvalidEnvironment):
        MabCbmState(1)


def test_unqueried_round_leaves_stats():
    learner = CbmUcb(3)
    led = QueryLedger()
    a, q = learner.act(0, 0.0, led)
    assert not q and learner.state.t == 1
    assert learner.state.counts.sum() == 0 and learner.state.means.sum() == 0


def test_means_equal_queried_rewards():
    env = MabEnv([0.3, 0.5, 0.7])
    learner = CbmUcb(3)
    tr = run_bandit(env, learner, BudgetSchedule.linear(0.5), 2000, seed=2)
    env_rng = run_streams(2, 0)["env"]
    sums, counts = np.zeros(3), np.zeros(3)
    for i in range(len(tr)):
        r = env.sample_reward(0, int(tr.action[i]), env_rng)
        if tr.query[i]:
            sums[tr.action[i]] += r
            counts[tr.action[i]] += 1
    assert np.array_equal(counts, learner.state.counts)
    assert np.allclose(sums / np.maximum(counts, 1), learner.state.means, atol=1e-12)


def test_budget_respected_with_costs():
    env = MabEnv([0.3, 0.5, 0.7])
    costs = [0.5, 2.0, 1.0]
    tr = run_bandit(env, CbmUcb(3, costs), BudgetSchedule.linear(0.4), 3000, seed=0, costs=costs)
    assert tr.budget_feasible()


def test_good_event_coverage():
    env = MabEnv(np.linspace(0.3, 0.7, 4))
    bad = total = 0
    for seed in range(50):
        learner = CbmUcb(4)
        led = QueryLedger()
        sched = BudgetSchedule.linear(0.5)
        rng = run_streams(seed, 0)["env"]
        for t in range(1, 1001):
            B = sched.advance(t)
            st_ = learner.state
            # check before the round's update: rbar_{t-1} against b_t
            tt = st_.t + 1
            for a in range(4):
                if st_.counts[a] > 0:
                    total += 1
                    bad += abs(st_.means[a] - env.arm_means[a]) > mab_bonus(st_, a, tt)
            a, q = learner.act(0, B, led)
            r = env.sample_reward(0, a, rng)
            if q:
                led.charge(a, B)
                learner.observe(0, a, r)
    assert bad / total < 0.05
