"""Sequential budgeted learning: bandits and tabular RL with limited reward queries."""
from . import bounds, cbm_linear, cbm_mab, cbm_rl, core, greedy
from .cbm_linear import CbmOful
from .cbm_mab import CbmUcb
from .cbm_rl import CbmRlAgent, run_rl
from .core import BudgetSchedule, run_bandit
from .greedy import GreedyReduction

__version__ = "0.1.0"

__all__ = ["bounds", "cbm_linear", "cbm_mab", "cbm_rl", "core", "greedy", "CbmOful", "CbmUcb",
           "CbmRlAgent", "run_rl", "BudgetSchedule", "run_bandit", "GreedyReduction"]
