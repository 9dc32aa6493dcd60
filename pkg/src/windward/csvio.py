"""Delimited output for trajectories, phase portraits and continuity sweeps.

One fixed dialect: comma separator, "\n" line endings, "." decimal point,
floats as scientific notation with a nine-digit mantissa (so a parsed file
reproduces the in-memory values to better than 1e-9 relative). Files are
written atomically (temp file in the target directory, then rename).
"""

from __future__ import annotations

import math
import os
import tempfile
from pathlib import Path

from .sim import PortraitTrace, TrajectoryLog

FLOAT_FMT = "%.9e"


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    return FLOAT_FMT % v


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_trajectory(log: TrajectoryLog, path: str | Path) -> None:
    lines = [",".join(TrajectoryLog.columns)]
    for row in log.rows:
        lines.append(",".join(_fmt(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_trajectory(path: str | Path) -> TrajectoryLog:
    """Parse a trajectory CSV back into a log (metadata fields are inferred
    or left zero; regimes stay strings, everything else becomes float)."""
    text = Path(path).read_text()
    lines = text.strip().split("\n")
    header = tuple(lines[0].split(","))
    if header != TrajectoryLog.columns:
        raise ValueError(f"unexpected trajectory header: {header}")
    regime_col = TrajectoryLog.columns.index("regime")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        rows.append(tuple(p if i == regime_col else float(p)
                          for i, p in enumerate(parts)))
    dt = rows[1][0] - rows[0][0] if len(rows) > 1 else 0.0
    return TrajectoryLog(rows=rows, dt=dt)


def write_portrait(traces: list[PortraitTrace], path: str | Path) -> None:
    lines = ["trace_id,t,eta,e_star"]
    for i, tr in enumerate(traces):
        for t, eta, estar in zip(tr.t, tr.eta, tr.e_star):
            lines.append(f"{i},{_fmt(t)},{_fmt(eta)},{_fmt(estar)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_continuity(rows: list[tuple], path: str | Path) -> None:
    lines = ["w_star,nu,y,regime"]
    for w_star, nu, y, regime in rows:
        lines.append(f"{_fmt(w_star)},{_fmt(nu)},{_fmt(y)},{regime}")
    atomic_write_text(path, "\n".join(lines) + "\n")
