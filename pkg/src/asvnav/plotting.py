"""SVG export for trajectories and learning curves.

Output bytes are pinned: fixed SVG hash salt, no embedded creation date, text
rendered as paths.  Rendering the same inputs twice must produce identical
files; the golden-file tests rely on it.  Every writer refuses empty input.
"""

from __future__ import annotations

import math

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {"svg.hashsalt": "asvnav", "svg.fonttype": "path"}


def _save(fig, path: str) -> None:
    with plt.rc_context(_RC):
        fig.savefig(path, format="svg", metadata={"Date": None},
                    bbox_inches="tight")
    plt.close(fig)


def load_metrics(path: str) -> dict[str, np.ndarray]:
    """Read one metrics.csv into named columns."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    data = np.atleast_2d(np.genfromtxt(path, delimiter=",", skip_header=1))
    if data.size == 0 or data.shape[1] != len(header):
        raise ValueError(f"{path} has no metric rows")
    return {name: data[:, i] for i, name in enumerate(header)}


def curve_band(paths: list[str], column: str = "success_rate"
               ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cross-seed mean and standard error of one metric column.

    All runs must share the evaluation step grid.
    """
    if not paths:
        raise ValueError("no metrics files given")
    runs = [load_metrics(p) for p in paths]
    steps = runs[0]["step"]
    for r in runs[1:]:
        if not np.array_equal(r["step"], steps):
            raise ValueError("evaluation step grids differ between runs")
    vals = np.stack([r[column] for r in runs])
    mean = vals.mean(axis=0)
    if len(runs) > 1:
        stderr = vals.std(axis=0, ddof=1) / math.sqrt(len(runs))
    else:
        stderr = np.zeros_like(mean)
    return steps, mean, stderr


def plot_learning_curves(groups: dict[str, list[str]], out_path: str,
                         column: str = "success_rate") -> None:
    """One curve per group with a mean +- standard-error band."""
    if not groups:
        raise ValueError("no curve groups given")
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, paths in groups.items():
        steps, mean, err = curve_band(paths, column)
        line, = ax.plot(steps, mean, label=label, lw=1.5)
        ax.fill_between(steps, mean - err, mean + err,
                        color=line.get_color(), alpha=0.25, lw=0)
    ax.set_xlabel("environment steps")
    ax.set_ylabel(column.replace("_", " "))
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    _save(fig, out_path)


def read_trajectory_log(path: str) -> list[np.ndarray]:
    """Parse a harness .traj file back into per-vehicle arrays.

    Rows are (t, x, y, yaw, u, v, r, T_left, T_right), grouped by the vehicle
    id column of the log.
    """
    per: dict[int, list[list[float]]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            parts = line.split()
            vid = int(parts[1])
            per.setdefault(vid, []).append(
                [float(parts[0])] + [float(x) for x in parts[2:]])
    if not per:
        raise ValueError(f"{path} holds no trajectory rows")
    return [np.array(per[v]) for v in sorted(per)]


def plot_trajectories(trajectories: list[np.ndarray],
                      goals: list[tuple[float, float]], out_path: str,
                      buoys: list[tuple[float, float, float]] = (),
                      arrow_every: int = 8) -> None:
    """Path panel: one polyline per vehicle, start dot, goal star, buoys,
    timestamped pose icons with world-frame velocity arrows."""
    if not trajectories:
        raise ValueError("no trajectories given")
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for bx, by, br in buoys:
        ax.add_patch(plt.Circle((bx, by), br, color="0.55", zorder=1))
    for i, traj in enumerate(trajectories):
        traj = np.asarray(traj)
        c = colors[i % len(colors)]
        ax.plot(traj[:, 1], traj[:, 2], color=c, lw=1.2, zorder=2)
        ax.plot(traj[0, 1], traj[0, 2], "o", color=c, ms=6, zorder=3)
        if i < len(goals):
            ax.plot(goals[i][0], goals[i][1], "*", color=c, ms=13, zorder=3)
        for row in traj[::max(1, arrow_every)]:
            t, x, y, yaw, u, v = row[0], row[1], row[2], row[3], row[4], row[5]
            wx = u * math.cos(yaw) - v * math.sin(yaw)
            wy = u * math.sin(yaw) + v * math.cos(yaw)
            ax.annotate("", xy=(x + wx, y + wy), xytext=(x, y), zorder=4,
                        arrowprops=dict(arrowstyle="->", color=c, lw=0.8))
            ax.text(x, y, f" {t:.0f}", fontsize=6, color=c, zorder=4)
    ax.set_aspect("equal")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.grid(True, alpha=0.3)
    _save(fig, out_path)
