"""Interaction protocol: budgets, environments, adversaries, traces, RNG."""
from .adversary import (MODES as PROP42_MODES, PROP42_MEANS, ContextLaw, make_prop42_adversary,
                        prop42_budget_path, prop42_cmab, prop42_contexts_from_increments,
                        prop42_linear)
from .budget import BudgetSchedule, QueryLedger, advance_budget
from .envs import CmabEnv, LinBanditEnv, MabEnv, TabularMdp, random_mdp
from .errors import (ConfigError, InvalidEnvironment, InvariantViolation, NonMonotoneBudget,
                     NoSnapshot, RewardOutOfRange, SeqBudgetError, SingularDesign)
from .loop import run_bandit
from .regret import pseudo_regret_increment, regret_cap
from .rng import rng_stream, run_streams
from .trace import TRACE_COLUMNS, History, RunTrace

__all__ = [
    "BudgetSchedule", "QueryLedger", "advance_budget",
    "CmabEnv", "MabEnv", "LinBanditEnv", "TabularMdp", "random_mdp",
    "ContextLaw", "make_prop42_adversary", "prop42_budget_path",
    "prop42_contexts_from_increments", "prop42_cmab", "prop42_linear",
    "PROP42_MEANS", "PROP42_MODES",
    "run_bandit", "pseudo_regret_increment", "regret_cap",
    "rng_stream", "run_streams", "RunTrace", "History", "TRACE_COLUMNS",
    "SeqBudgetError", "NonMonotoneBudget", "NoSnapshot", "RewardOutOfRange",
    "SingularDesign", "InvalidEnvironment", "ConfigError", "InvariantViolation",
]
