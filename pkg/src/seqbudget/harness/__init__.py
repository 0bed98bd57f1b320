"""Experiment harness: JSON configs, seeded replications, CSV/SVG output, CLI."""
from .config import (ALGORITHMS, BUDGETS, ENVIRONMENTS, INFINITE_BUDGET, ExperimentConfig,
                     build_environment, build_learner, build_schedule, expand_sweep, from_dict,
                     load_config)
from .io import atomic_write, emit_outputs, summary_csv, trace_csv
from .runner import (SUMMARY_COLUMNS, SummaryTable, checkpoints, run_experiment,
                     run_replication, run_replications, summarize)

__all__ = [
    "ALGORITHMS", "BUDGETS", "ENVIRONMENTS", "INFINITE_BUDGET", "ExperimentConfig",
    "build_environment", "build_learner", "build_schedule", "expand_sweep", "from_dict",
    "load_config", "atomic_write", "emit_outputs", "summary_csv", "trace_csv",
    "SUMMARY_COLUMNS", "SummaryTable", "checkpoints", "run_experiment", "run_replication",
    "run_replications", "summarize",
]
