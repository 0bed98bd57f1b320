"""JSON experiment configuration and the factories that turn it into objects."""
from __future__ import annotations

import copy
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..cbm_linear import CbmOful
from ..cbm_mab import CbmUcb
from ..cbm_rl import CbmRlAgent
from ..core import (BudgetSchedule, CmabEnv, ConfigError, LinBanditEnv, MabEnv, TabularMdp,
                    make_prop42_adversary, prop42_cmab, prop42_linear, random_mdp, rng_stream)
from ..greedy import GreedyReduction

ALGORITHMS = ("greedy", "cbm-ucb", "cbm-oful", "cbm-ucbvi", "cbm-ulcvi")
ENVIRONMENTS = ("mab", "cmab", "linear", "mdp", "random_mdp", "prop42_cmab", "prop42_linear")
BUDGETS = ("fixed", "linear", "polynomial", "periodic", "stepped", "sequence", "infinite", "prop42")

# "infinite" budgets are a large finite constant so every threshold stays finite
INFINITE_BUDGET = 1e12

_ENV_FOR_ALG = {
    "greedy": ("mab", "cmab", "prop42_cmab"),
    "cbm-ucb": ("mab", "cmab", "prop42_cmab"),
    "cbm-oful": ("linear", "prop42_linear"),
    "cbm-ucbvi": ("mdp", "random_mdp"),
    "cbm-ulcvi": ("mdp", "random_mdp"),
}


@dataclass
class ExperimentConfig:
    environment: dict
    algorithm: dict
    budget: dict
    horizon: int
    replications: int = 1
    seed: int = 0
    name: str = "experiment"
    workers: int = 1
    output: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)

    def __post_init__(self):
        validate(self)

    @property
    def is_episodic(self) -> bool:
        return self.algorithm["name"] in ("cbm-ucbvi", "cbm-ulcvi")

    def to_dict(self) -> dict:
        return {
            "name": self.name, "environment": self.environment, "algorithm": self.algorithm,
            "budget": self.budget, "horizon": self.horizon, "replications": self.replications,
            "seed": self.seed, "workers": self.workers, "output": self.output, "sweep": self.sweep,
        }


def _need(spec: dict, key: str, where: str):
    if key not in spec:
        raise ConfigError(f"{where}: missing required key {key!r}")
    return spec[key]


def validate(cfg: ExperimentConfig) -> None:
    for part in ("environment", "algorithm", "budget"):
        if not isinstance(getattr(cfg, part), dict):
            raise ConfigError(f"{part} must be a JSON object")
    env_kind = _need(cfg.environment, "kind", "environment")
    if env_kind not in ENVIRONMENTS:
        raise ConfigError(f"unknown environment kind {env_kind!r}; expected one of {ENVIRONMENTS}")
    alg = _need(cfg.algorithm, "name", "algorithm")
    if alg not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {alg!r}; expected one of {ALGORITHMS}")
    if env_kind not in _ENV_FOR_ALG[alg]:
        raise ConfigError(f"algorithm {alg!r} cannot run on environment {env_kind!r}")
    b_kind = _need(cfg.budget, "kind", "budget")
    if b_kind not in BUDGETS:
        raise ConfigError(f"unknown budget kind {b_kind!r}; expected one of {BUDGETS}")
    if b_kind == "prop42" and env_kind not in ("prop42_cmab", "prop42_linear", "mdp", "random_mdp"):
        raise ConfigError("the prop42 adversary needs a two-context environment")
    if not isinstance(cfg.horizon, int) or isinstance(cfg.horizon, bool) or cfg.horizon < 1:
        raise ConfigError("horizon must be an integer >= 1")
    if not isinstance(cfg.replications, int) or cfg.replications < 1:
        raise ConfigError("replications must be an integer >= 1")
    if not isinstance(cfg.seed, int) or cfg.seed < 0:
        raise ConfigError("seed must be a non-negative integer")
    if not isinstance(cfg.workers, int) or cfg.workers < 1:
        raise ConfigError("workers must be an integer >= 1")
    for path in cfg.sweep:
        if not isinstance(cfg.sweep[path], list) or not cfg.sweep[path]:
            raise ConfigError(f"sweep values for {path!r} must be a non-empty list")
    # resolve everything once so broken specs fail before any run starts
    try:
        env = build_environment(cfg.environment, cfg.seed)
        schedule, _ = build_schedule(cfg.budget)
        if alg == "greedy" and not schedule.adaptive and schedule.peek(1) < 1:
            raise ConfigError("greedy reduction needs an initial budget B(1) >= 1")
        build_learner(cfg.algorithm, env, rng_stream(cfg.seed, 0, "alg"))
    except ConfigError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    known = {"name", "environment", "algorithm", "budget", "horizon", "replications", "seed",
             "workers", "output", "sweep"}
    extra = set(data) - known
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    for key in ("environment", "algorithm", "budget", "horizon"):
        _need(data, key, "config")
    return ExperimentConfig(**copy.deepcopy(data))


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return from_dict(data)


# ---- factories -----------------------------------------------------------------

def build_environment(spec: dict, master_seed: int = 0):
    kind = spec["kind"]
    if kind == "mab":
        return MabEnv(_need(spec, "means", "mab"), reward_law=spec.get("reward_law", "bernoulli"),
                      sigma=spec.get("sigma", 0.1))
    if kind == "cmab":
        return CmabEnv(_need(spec, "means", "cmab"), spec.get("context_probs"),
                       reward_law=spec.get("reward_law", "bernoulli"), sigma=spec.get("sigma", 0.1))
    if kind == "linear":
        return LinBanditEnv(_need(spec, "theta", "linear"), _need(spec, "action_sets", "linear"),
                            sigma=spec.get("sigma", 0.1), context_probs=spec.get("context_probs"),
                            L=spec.get("L"), D=spec.get("D"))
    if kind == "mdp":
        return TabularMdp(np.asarray(_need(spec, "P", "mdp")), np.asarray(_need(spec, "r", "mdp")),
                          spec.get("init"))
    if kind == "random_mdp":
        # the instance is part of the config: it is drawn from its own seed, not per replication
        rng = np.random.default_rng(spec.get("seed", master_seed))
        return random_mdp(int(_need(spec, "S", "random_mdp")), int(_need(spec, "A", "random_mdp")),
                          int(_need(spec, "H", "random_mdp")), rng,
                          n_rewarding=spec.get("n_rewarding"),
                          terminal_reward=bool(spec.get("terminal_reward", False)))
    if kind == "prop42_cmab":
        return prop42_cmab(spec.get("reward_law", "bernoulli"))
    if kind == "prop42_linear":
        return prop42_linear(spec.get("sigma", 0.5))
    raise ConfigError(f"unknown environment kind {kind!r}")


def build_schedule(spec: dict):
    """Return ``(schedule, context_law)``; the law is None except for the adversary."""
    kind = spec["kind"]
    if kind == "fixed":
        return BudgetSchedule.fixed(_need(spec, "b0", "fixed budget")), None
    if kind == "linear":
        return BudgetSchedule.linear(_need(spec, "epsilon", "linear budget")), None
    if kind == "polynomial":
        return BudgetSchedule.polynomial(_need(spec, "c", "polynomial budget"),
                                         spec.get("scale", 1.0)), None
    if kind == "periodic":
        return BudgetSchedule.periodic(_need(spec, "b0", "periodic budget"),
                                       _need(spec, "n", "periodic budget")), None
    if kind == "stepped":
        return BudgetSchedule.stepped(_need(spec, "b0", "stepped budget"),
                                      _need(spec, "n", "stepped budget")), None
    if kind == "sequence":
        return BudgetSchedule.sequence(_need(spec, "values", "sequence budget")), None
    if kind == "infinite":
        sched = BudgetSchedule.fixed(INFINITE_BUDGET)
        sched.kind = "infinite"
        return sched, None
    if kind == "prop42":
        return make_prop42_adversary(spec.get("mode", "budget-adversary"), spec.get("initial", 1.0))
    raise ConfigError(f"unknown budget kind {kind!r}")


def build_learner(spec: dict, env, alg_rng: np.random.Generator):
    name = spec["name"]
    rule = spec.get("query_rule", "cbm")
    if name == "greedy":
        return GreedyReduction(env.n_contexts, env.n_arms, alg_rng)
    if name == "cbm-ucb":
        return CbmUcb(env.n_arms, spec.get("costs"), query_rule=rule)
    if name == "cbm-oful":
        kw = {k: spec[k] for k in ("lam", "sigma", "L", "D", "delta") if k in spec}
        return CbmOful.for_env(env, query_rule=rule, **kw)
    variant = name.split("-", 1)[1]
    lr_size = spec.get("lr_size", env.lr_size)
    return CbmRlAgent(env.S, env.A, env.H, variant=variant, delta=spec.get("delta", 0.1),
                      lr_size=lr_size, query_rule=rule)


# ---- sweeps --------------------------------------------------------------------

def _set_path(data: dict, path: str, value: Any) -> None:
    keys = path.split(".")
    node = data
    for k in keys[:-1]:
        if not isinstance(node.get(k), dict):
            raise ConfigError(f"sweep path {path!r} does not name a config field")
        node = node[k]
    node[keys[-1]] = value


def expand_sweep(cfg: ExperimentConfig):
    """Cartesian product over ``sweep`` entries, as ``(assignment, config)`` pairs.

    Paths are dotted (``"budget.epsilon"``); order follows sorted path names so
    point numbering is stable.
    """
    if not cfg.sweep:
        return [({}, cfg)]
    paths = sorted(cfg.sweep)
    points = []
    for values in itertools.product(*(cfg.sweep[p] for p in paths)):
        data = copy.deepcopy(cfg.to_dict())
        data["sweep"] = {}
        assignment = dict(zip(paths, values))
        for p, v in assignment.items():
            _set_path(data, p, v)
        points.append((assignment, from_dict(data)))
    return points


