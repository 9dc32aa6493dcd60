"""Figure rendering for the CLI report path.

Each writer produces a PNG next to the corresponding CSV. Matplotlib is
imported lazily with the Agg backend so library users never pay for it and
headless runs never touch a display.
"""

from __future__ import annotations

import math
from pathlib import Path

from .paths import ArcChain, Circle, Line, PathModel, SinglePoint
from .sim import PortraitTrace, TrajectoryLog

REGIME_COLORS = {"slow": "tab:blue", "fast1": "magenta", "fast2": "red"}


def _plt():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _path_xy(path: PathModel, xs: list[float], ys: list[float]):
    """Sample the path for drawing, sized to the trajectory's extent."""
    if isinstance(path, Circle):
        ang = [2.0 * math.pi * i / 256 for i in range(257)]
        return ([path.center.x + path.radius * math.cos(a) for a in ang],
                [path.center.y + path.radius * math.sin(a) for a in ang])
    if isinstance(path, Line):
        if path.length is not None:
            lo, hi = 0.0, path.length
        else:
            span = max(max(xs) - min(xs), max(ys) - min(ys), 100.0)
            mid = ((min(xs) + max(xs)) / 2 - path.anchor.x) * path.direction.x + \
                  ((min(ys) + max(ys)) / 2 - path.anchor.y) * path.direction.y
            lo, hi = mid - span, mid + span
        p0 = path.anchor + lo * path.direction
        p1 = path.anchor + hi * path.direction
        return [p0.x, p1.x], [p0.y, p1.y]
    if isinstance(path, ArcChain):
        n = 512
        pts = [path.frame_at(path.total_length * i / n).point for i in range(n + 1)]
        return [p.x for p in pts], [p.y for p in pts]
    if isinstance(path, SinglePoint):
        return [path.point.x], [path.point.y]
    return [], []


def render_trajectory(log: TrajectoryLog, path: PathModel, out: str | Path) -> None:
    plt = _plt()
    xs = log.column("x")
    ys = log.column("y")
    regimes = log.column("regime")
    fig, ax = plt.subplots(figsize=(7, 7))
    px, py = _path_xy(path, xs, ys)
    if len(px) > 1:
        ax.plot(px, py, "k--", lw=1, label="desired path")
    elif px:
        ax.plot(px, py, "k*", ms=12, label="desired path")
    start = 0
    seen = set()
    for i in range(1, len(xs) + 1):
        if i == len(xs) or regimes[i] != regimes[start]:
            lab = regimes[start]
            ax.plot(xs[start:i + 1], ys[start:i + 1], color=REGIME_COLORS[lab],
                    lw=1.6, label=None if lab in seen else lab)
            seen.add(lab)
            start = i
    ax.plot(xs[0], ys[0], "ko", ms=6)
    wx, wy = log.rows[0][7], log.rows[0][8]
    if math.hypot(wx, wy) > 1e-9:
        span = max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
        scale = 0.12 * span / math.hypot(wx, wy)
        ax.annotate("wind", xy=(xs[0] + wx * scale, ys[0] + wy * scale),
                    xytext=(xs[0], ys[0]),
                    arrowprops=dict(arrowstyle="->", color="gray"), color="gray")
    ax.set_aspect("equal")
    ax.grid(True, alpha=0.3)
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.legend(loc="best", fontsize=9)
    fig.savefig(out, dpi=130, bbox_inches="tight")
    plt.close(fig)


def render_portrait(traces: list[PortraitTrace], out: str | Path,
                    title: str = "") -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(7, 5))
    for tr in traces:
        ax.plot(tr.e_star, tr.eta, lw=0.7, alpha=0.75)
        ax.plot(tr.e_star[0], tr.eta[0], "k.", ms=3)
    ax.set_xlabel("cross-track error e* [m]")
    ax.set_ylabel("course error eta [rad]")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.savefig(out, dpi=130, bbox_inches="tight")
    plt.close(fig)


def render_continuity(rows: list[tuple], out: str | Path) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(7, 5))
    by_nu: dict[float, list[tuple]] = {}
    for row in rows:
        by_nu.setdefault(row[1], []).append(row)
    for nu, sub in sorted(by_nu.items()):
        for regime, color in REGIME_COLORS.items():
            pts = [(w, y) for w, _, y, r in sub if r == regime]
            if pts:
                color = "black" if regime == "slow" else color
                ax.plot([p[0] for p in pts], [p[1] for p in pts], ".",
                        color=color, ms=2)
        ax.annotate(f"nu={nu:.2f}", xy=(sub[-1][0], sub[-1][2]), fontsize=8,
                    xytext=(3, 0), textcoords="offset points")
    ax.set_xlabel("wind speed w* [m/s]")
    ax.set_ylabel("command angle from anti-wind y [rad]")
    ax.grid(True, alpha=0.3)
    fig.savefig(out, dpi=130, bbox_inches="tight")
    plt.close(fig)
