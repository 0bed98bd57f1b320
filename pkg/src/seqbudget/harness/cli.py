"""Command line entry point: ``run``, ``sweep`` and ``bounds`` subcommands.

Exit codes: 0 on success, 2 when a run breaks an invariant, 1 on any other error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..bounds import PROFILES, lower_bound_curve, predicted_profile
from ..core import ConfigError, InvariantViolation
from .config import expand_sweep, load_config
from .io import atomic_write, curve_csv, emit_outputs, fmt
from .runner import run_experiment

log = logging.getLogger("seqbudget")

LOWER_BOUNDS = ("mab_lb_unit", "mab_lb_costs", "mab_lb_varying", "lin_lb")


def build_curves(specs, T: int):
    """Bound curves from ``[{"kind": ..., "params": {...}}]``.

    ``kind`` is a lower bound name or ``profile``; profiles also need ``profile``
    (linear, polynomial, fixed, periodic) and ``A``.
    """
    curves = []
    for spec in specs:
        kind = spec.get("kind")
        params = spec.get("params", {})
        try:
            if kind == "profile":
                curves.append(predicted_profile(spec["profile"], params, int(spec["A"]), T))
            elif kind in LOWER_BOUNDS:
                curves.append(lower_bound_curve(kind, params, T))
            else:
                raise ConfigError(f"unknown bound kind {kind!r}; expected 'profile' "
                                  f"({', '.join(PROFILES)}) or one of {LOWER_BOUNDS}")
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad bound spec {spec!r}: {exc}") from exc
    return curves


def _run_one(cfg, out: Path, workers):
    traces, summary = run_experiment(cfg, workers)
    opts = cfg.output
    curves = build_curves(opts.get("bounds", []), cfg.horizon)
    emit_outputs(out, traces, summary, curves, svg=bool(opts.get("svg", True)),
                 write_traces=bool(opts.get("traces", True)), title=cfg.name,
                 config=cfg.to_dict())
    final = summary.regret_mean[-1]
    log.info("%s: %d replications, final mean regret %.6g", cfg.name, cfg.replications, final)
    return summary


def cmd_run(args) -> None:
    cfg = load_config(args.config)
    _run_one(cfg, Path(args.out), args.workers)


def cmd_sweep(args) -> None:
    cfg = load_config(args.config)
    out = Path(args.out)
    index = ["point,assignment,final_regret_mean,final_budget_used_mean"]
    for i, (assignment, point) in enumerate(expand_sweep(cfg)):
        summary = _run_one(point, out / f"point_{i:03d}", args.workers)
        label = json.dumps(assignment, sort_keys=True).replace('"', "'")
        final = (fmt(summary.regret_mean[-1]), fmt(summary.budget_used_mean[-1]))
        index.append(f'{i},"{label}",{final[0]},{final[1]}')
    atomic_write(out / "sweep.csv", "\n".join(index) + "\n")


def cmd_bounds(args) -> None:
    try:
        data = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load bounds config: {exc}") from exc
    T = data.get("horizon")
    if not isinstance(T, int) or T < 1:
        raise ConfigError("bounds config needs an integer horizon >= 1")
    curves = build_curves(data.get("curves", []), T)
    out = Path(args.out)
    lines = ["index,label,final_value"]
    for i, curve in enumerate(curves):
        atomic_write(out / f"bound_{i:02d}.csv", curve_csv(curve))
        lines.append(f'{i},"{curve.label}",{fmt(curve.endpoint())}')
    atomic_write(out / "bounds.csv", "\n".join(lines) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seqbudget",
                                     description="Budgeted-query bandit and RL experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, helptext in (("run", cmd_run, "run one experiment config"),
                               ("sweep", cmd_sweep, "run the cartesian product of a sweep"),
                               ("bounds", cmd_bounds, "write reference bound curves")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True)
        if name != "bounds":
            p.add_argument("--workers", type=int, default=None,
                           help="worker processes (default: the config's value)")
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # anything else is a usage or environment error
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
