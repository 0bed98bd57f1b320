"""Seeded replications, run serially or in worker processes, and their summary."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..cbm_rl import run_rl
from ..core import InvariantViolation, RunTrace, rng_stream, run_bandit
from .config import ExperimentConfig, build_environment, build_learner, build_schedule, from_dict

SUMMARY_COLUMNS = ("t", "regret_mean", "regret_std", "regret_min", "regret_max",
                   "budget_used_mean")


def run_replication(cfg: ExperimentConfig, replication: int) -> RunTrace:
    """One replication; everything random derives from (seed, replication, role)."""
    env = build_environment(cfg.environment, cfg.seed)
    schedule, law = build_schedule(cfg.budget)
    learner = build_learner(cfg.algorithm, env, rng_stream(cfg.seed, replication, "alg"))
    if cfg.is_episodic:
        trace = run_rl(env, learner, schedule, cfg.horizon, seed=cfg.seed,
                       replication=replication, context_law=law)
    else:
        trace = run_bandit(env, learner, schedule, cfg.horizon, seed=cfg.seed,
                           replication=replication, context_law=law,
                           costs=cfg.algorithm.get("costs"))
    if not trace.budget_feasible():
        bad = int(np.argmax(trace.budget_used > trace.budget + 1e-9)) + 1
        raise InvariantViolation("B^q(t) > B(t)", round=bad, algorithm=trace.meta["algorithm"],
                                 seed=cfg.seed, replication=replication)
    return trace


def _worker(args):
    data, replication = args
    return run_replication(from_dict(data), replication)


def checkpoints(T: int, n: int = 60) -> np.ndarray:
    """Log-spaced integer checkpoints in [1, T], always including T."""
    pts = np.unique(np.round(np.logspace(0.0, np.log10(T), n)).astype(np.int64))
    pts = pts[(pts >= 1) & (pts <= T)]
    return np.union1d(pts, [T])


@dataclass
class SummaryTable:
    t: np.ndarray
    regret_mean: np.ndarray
    regret_std: np.ndarray
    regret_min: np.ndarray
    regret_max: np.ndarray
    budget_used_mean: np.ndarray
    budget_used_std: np.ndarray
    budget_used_min: np.ndarray
    budget_used_max: np.ndarray
    replications: int

    def rows(self):
        for i in range(len(self.t)):
            yield tuple(getattr(self, c)[i] for c in SUMMARY_COLUMNS)


def summarize(traces, T: int) -> SummaryTable:
    """Statistics across replications at the checkpoints; std is the population std."""
    if not traces:
        raise ValueError("need at least one trace")
    pts = checkpoints(T)
    idx = pts - 1
    reg = np.stack([tr.regret_cum[idx] for tr in traces])
    used = np.stack([tr.budget_used[idx] for tr in traces])
    return SummaryTable(
        t=pts, regret_mean=reg.mean(axis=0), regret_std=reg.std(axis=0),
        regret_min=reg.min(axis=0), regret_max=reg.max(axis=0),
        budget_used_mean=used.mean(axis=0), budget_used_std=used.std(axis=0),
        budget_used_min=used.min(axis=0), budget_used_max=used.max(axis=0),
        replications=len(traces),
    )


def run_replications(cfg: ExperimentConfig, workers=None):
    """All replications in replication order, whatever the worker count."""
    workers = cfg.workers if workers is None else int(workers)
    reps = range(cfg.replications)
    if workers <= 1 or cfg.replications == 1:
        return [run_replication(cfg, r) for r in reps]
    data = cfg.to_dict()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order, so the merge is by replication index
        return list(pool.map(_worker, [(data, r) for r in reps]))


def run_experiment(cfg: ExperimentConfig, workers=None):
    """Run every replication and return ``(traces, summary)``."""
    traces = run_replications(cfg, workers)
    return traces, summarize(traces, cfg.horizon)
