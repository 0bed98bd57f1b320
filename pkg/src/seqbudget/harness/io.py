"""CSV and chart output. Every file is written to a temp name and renamed into place."""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from ..core import TRACE_COLUMNS, InvariantViolation
from .runner import SUMMARY_COLUMNS

_INT_COLUMNS = {"t", "context", "action", "query"}


def fmt(x) -> str:
    """17 significant digits: enough for floats to round-trip exactly."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def atomic_write(path, data) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = data.encode() if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def trace_csv(trace) -> str:
    cols = trace.columns()
    lines = [",".join(TRACE_COLUMNS)]
    for i in range(len(trace)):
        lines.append(",".join(
            str(int(cols[c][i])) if c in _INT_COLUMNS else fmt(float(cols[c][i]))
            for c in TRACE_COLUMNS))
    return "\n".join(lines) + "\n"


def summary_csv(summary) -> str:
    lines = [",".join(SUMMARY_COLUMNS)]
    for row in summary.rows():
        lines.append(",".join([str(int(row[0]))] + [fmt(float(v)) for v in row[1:]]))
    return "\n".join(lines) + "\n"


def curve_csv(curve) -> str:
    lines = ["t,value"]
    lines += [f"{int(t)},{fmt(float(v))}" for t, v in zip(curve.t, curve.value)]
    return "\n".join(lines) + "\n"


def check_trace(trace, replication: int) -> None:
    """Row-by-row B^q(t) <= B(t), re-checked just before a trace is written."""
    over = trace.budget_used > trace.budget + 1e-9
    if over.any():
        raise InvariantViolation("B^q(t) > B(t) in emitted trace", round=int(np.argmax(over)) + 1,
                                 algorithm=trace.meta.get("algorithm"),
                                 seed=trace.meta.get("seed"), replication=replication)


def emit_outputs(out_dir, traces, summary=None, bounds=(), *, svg: bool = True,
                 write_traces: bool = True, title: str = "", config=None) -> list:
    """Write trace CSVs, the summary CSV and (optionally) the SVG chart; returns the paths."""
    out = Path(out_dir)
    written = []
    for rep, trace in enumerate(traces):
        check_trace(trace, rep)
    if write_traces:
        for rep, trace in enumerate(traces):
            written.append(atomic_write(out / "traces" / f"rep_{rep:04d}.csv", trace_csv(trace)))
    if summary is not None:
        written.append(atomic_write(out / "summary.csv", summary_csv(summary)))
    for i, curve in enumerate(bounds):
        written.append(atomic_write(out / "bounds" / f"bound_{i:02d}.csv", curve_csv(curve)))
    if config is not None:
        text = json.dumps(config, indent=2, sort_keys=True) + "\n"
        written.append(atomic_write(out / "config.json", text))
    if svg:
        from .plotting import render_svg
        written.append(atomic_write(out / "regret.svg", render_svg(summary, bounds, title=title)))
    return written
