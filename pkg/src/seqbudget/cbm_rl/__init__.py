"""Tabular episodic RL with budgeted reward queries (CBM-UCBVI, CBM-ULCVI)."""
from .agents import VARIANTS, CbmRlAgent, EpisodeResult, run_episode, run_rl
from .bonuses import (RlCounts, empirical_reward_variance, log_term, query_threshold,
                      rl_reward_bonus, rl_should_query, ucbvi_transition_bonus,
                      ulcvi_transition_bonus)
from .oracle import exact_vi_oracle
from .planning import ValueTables, optimistic_pessimistic_vi, truncated_vi

__all__ = [
    "CbmRlAgent", "EpisodeResult", "run_episode", "run_rl", "VARIANTS",
    "RlCounts", "empirical_reward_variance", "log_term", "query_threshold",
    "rl_reward_bonus", "rl_should_query", "ucbvi_transition_bonus",
    "ulcvi_transition_bonus", "exact_vi_oracle", "ValueTables",
    "optimistic_pessimistic_vi", "truncated_vi",
]
