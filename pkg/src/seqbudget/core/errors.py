"""Exception types shared across the package."""


class SeqBudgetError(Exception):
    """Base class for all package errors."""


class NonMonotoneBudget(SeqBudgetError, ValueError):
    """A budget schedule emitted a value smaller than its previous one."""


class NoSnapshot(SeqBudgetError, RuntimeError):
    """Greedy reduction hit a no-budget round before any policy was stored."""


class RewardOutOfRange(SeqBudgetError, ValueError):
    pass


class SingularDesign(SeqBudgetError, ArithmeticError):
    """The regularized design matrix could not be factorized."""


class InvalidEnvironment(SeqBudgetError, ValueError):
    pass


class ConfigError(SeqBudgetError, ValueError):
    pass


class InvariantViolation(SeqBudgetError, RuntimeError):
    """A run broke a hard invariant (budget feasibility, regret bounds, ...).

    Carries enough context to reproduce the failure.
    """

    def __init__(self, message, *, round=None, algorithm=None, seed=None, replication=None):
        self.round = round
        self.algorithm = algorithm
        self.seed = seed
        self.replication = replication
        where = []
        if algorithm is not None:
            where.append(f"algorithm={algorithm}")
        if seed is not None:
            where.append(f"seed={seed}")
        if replication is not None:
            where.append(f"replication={replication}")
        if round is not None:
            where.append(f"round={round}")
        suffix = f" [{', '.join(where)}]" if where else ""
        super().__init__(message + suffix)
