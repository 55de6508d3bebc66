"""Six-set evaluation grid with seeded, reproducible metrics.

Every vehicle in an episode runs the same controller.  Episode scenarios are
seeded as seed_base + episode index, observation noise from a stream derived
from the same seed, and stochastic controllers are reseeded per episode, so a
fixed configuration always reproduces the same summary bytes.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .agents import AGENT_KINDS, make_agent
from .baselines import BASELINE_KINDS, make_baseline
from .config import Config, config_hash
from .episode import EpisodeResult, run_episode
from .world import CurriculumStage, EventKind, generate_scenario


@dataclass
class ExperimentSet:
    """One evaluation condition: fixed traffic density, seeded episodes."""

    label: str                 # e.g. "3 rob 0 obs"
    num_robots: int
    num_buoys: int
    episodes: int
    seed_base: int


@dataclass
class MetricsSummary:
    """Aggregate over one set; travel time averages goal-reachers only."""

    label: str
    episodes: int
    success_rate: float
    avg_travel_time: float     # nan when no vehicle reached a goal
    collision_rate: float
    timeout_rate: float


def experiment_sets(cfg: Config) -> list[ExperimentSet]:
    h = cfg.harness
    sets = []
    for i, (r, b) in enumerate(zip(h.set_robots, h.set_buoys)):
        sets.append(ExperimentSet(
            label=f"{r} rob {b} obs",
            num_robots=r,
            num_buoys=b,
            episodes=h.episodes_per_set,
            seed_base=h.seed_base + 1000 * i,
        ))
    return sets


def set_stage(cfg: Config, set_index: int,
              eset: ExperimentSet) -> CurriculumStage:
    """Scenario geometry for one set; reuses the stage spacing tables."""
    w = cfg.world
    j = min(set_index, len(w.stage_min_start_goal) - 1)
    return CurriculumStage(index=j + 1, num_robots=eset.num_robots,
                           num_buoys=eset.num_buoys,
                           min_start_goal=w.stage_min_start_goal[j],
                           duration=0, side=w.stage_side[j])


class AgentController:
    """Checkpointed (or fresh) model driving every vehicle greedily."""

    def __init__(self, agent):
        self.agent = agent
        self.kind = agent.kind

    def reseed(self, seed: int) -> None:
        # stochastic policies (random) draw from here; greedy ones ignore it
        self.agent.rng = np.random.default_rng([seed, 77])

    def act(self, vid, obs):
        return self.agent.act(obs, explore=False)


def make_controller(kind: str, cfg: Config, checkpoint: str | None = None):
    """Controller factory; checkpoint/kind mismatch fails before any episode."""
    if kind in BASELINE_KINDS:
        return make_baseline(kind, cfg)
    if kind not in AGENT_KINDS:
        raise ValueError(f"unknown controller {kind!r}; expected one of "
                         f"{sorted(AGENT_KINDS) + sorted(BASELINE_KINDS)}")
    rng = np.random.default_rng(0)
    if checkpoint is not None:
        agent = AGENT_KINDS[kind].load(checkpoint, cfg, rng)
    else:
        agent = make_agent(kind, cfg, rng)
    return AgentController(agent)


def summarize(label: str, results: list[EpisodeResult]) -> MetricsSummary:
    if not results:
        raise ValueError("no episodes to summarize")
    times = [t for r in results for t in r.travel_times if t is not None]
    timeouts = sum(any(ev is not None and ev.kind is EventKind.TIMEOUT
                       for ev in r.terminal) for r in results)
    n = len(results)
    return MetricsSummary(
        label=label,
        episodes=n,
        success_rate=sum(r.success for r in results) / n,
        avg_travel_time=float(np.mean(times)) if times else math.nan,
        collision_rate=sum(r.collided for r in results) / n,
        timeout_rate=timeouts / n,
    )


def _write_trajectories(path: str, res: EpisodeResult) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# t vid x y yaw u v r T_left T_right\n")
        for vid, traj in enumerate(res.trajectories):
            for row in traj:
                fh.write(f"{row[0]:.4f} {vid} " +
                         " ".join(f"{x:.6f}" for x in row[1:]) + "\n")


def run_set(eset: ExperimentSet, controller, cfg: Config, set_index: int = 0,
            record_dir: str | None = None
            ) -> tuple[MetricsSummary, list[dict]]:
    """Run one set sequentially; returns the summary and per-episode rows."""
    stage = set_stage(cfg, set_index, eset)
    if record_dir is not None:
        os.makedirs(record_dir, exist_ok=True)
    reseed = getattr(controller, "reseed", None)
    results = []
    rows = []
    for e in range(eset.episodes):
        seed = eset.seed_base + e
        if reseed is not None:
            reseed(seed)
        sc = generate_scenario(stage, seed, cfg)
        rng = np.random.default_rng([seed, 3])
        res = run_episode(sc, cfg, controller.act, rng,
                          record=record_dir is not None)
        if record_dir is not None:
            _write_trajectories(os.path.join(record_dir, f"ep{e:03d}.traj"),
                                res)
        results.append(res)
        rows.append({
            "episode": e,
            "seed": seed,
            "success": res.success,
            "collided": res.collided,
            "steps": res.steps,
            "travel_times": res.travel_times,
            "rewards": [round(r, 6) for r in res.rewards],
        })
    return summarize(eset.label, results), rows


def format_table(results: dict[str, dict[str, MetricsSummary]]) -> str:
    """Fixed-width text table: rows are controllers, columns are sets.

    Each cell shows success rate and the mean travel time of goal-reaching
    vehicles.
    """
    if not results:
        raise ValueError("nothing to tabulate")
    labels = list(next(iter(results.values())))
    name_w = max(len("controller"), *(len(k) for k in results))
    cell_w = max(12, *(len(s) for s in labels))
    header = ("controller".ljust(name_w) + " | "
              + " | ".join(s.rjust(cell_w) for s in labels))
    sep = "-" * len(header)
    lines = [header, sep]
    for kind, per in results.items():
        cells = []
        for label in labels:
            s = per[label]
            cells.append(f"{s.success_rate:4.0%} {s.avg_travel_time:6.1f}s"
                         .rjust(cell_w))
        lines.append(kind.ljust(name_w) + " | " + " | ".join(cells))
    return "\n".join(lines) + "\n"


def run_grid(kinds: list[str], cfg: Config,
             checkpoints: dict[str, str] | None = None,
             out_dir: str | None = None,
             record: bool = False) -> dict[str, dict[str, MetricsSummary]]:
    """Run every controller over every set; optionally write all artifacts."""
    sets = experiment_sets(cfg)
    results: dict[str, dict[str, MetricsSummary]] = {}
    for kind in kinds:
        controller = make_controller(kind, cfg, (checkpoints or {}).get(kind))
        per: dict[str, MetricsSummary] = {}
        for i, eset in enumerate(sets):
            rec = (os.path.join(out_dir, "trajectories", kind,
                                eset.label.replace(" ", "_"))
                   if (record and out_dir) else None)
            summary, rows = run_set(eset, controller, cfg, set_index=i,
                                    record_dir=rec)
            per[eset.label] = summary
            if out_dir is not None:
                ep_dir = os.path.join(out_dir, "episodes", kind)
                os.makedirs(ep_dir, exist_ok=True)
                fname = eset.label.replace(" ", "_") + ".jsonl"
                with open(os.path.join(ep_dir, fname), "w",
                          encoding="utf-8") as fh:
                    for row in rows:
                        fh.write(json.dumps(row, sort_keys=True) + "\n")
        results[kind] = per

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        payload = {k: {lbl: asdict(s) for lbl, s in per.items()}
                   for k, per in results.items()}
        with open(os.path.join(out_dir, "summary.json"), "w",
                  encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
        with open(os.path.join(out_dir, "table.txt"), "w",
                  encoding="utf-8") as fh:
            fh.write(format_table(results))
        with open(os.path.join(out_dir, "manifest.json"), "w",
                  encoding="utf-8") as fh:
            json.dump({
                "version": __version__,
                "config_hash": config_hash(cfg),
                "seed_base": cfg.harness.seed_base,
                "episodes_per_set": cfg.harness.episodes_per_set,
                "sets": [s.label for s in sets],
                "controllers": list(kinds),
                "checkpoints": checkpoints or {},
            }, fh, indent=1, sort_keys=True)
            fh.write("\n")
    return results
