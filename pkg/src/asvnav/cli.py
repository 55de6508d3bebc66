"""Command-line front end: train, eval, rollout, segment, plot-export.

Exit codes: 0 success, 1 usage error, 2 runtime error, 3 training divergence.
Configuration layers as defaults < --config file < --set overrides.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .agents import AGENT_KINDS
from .baselines import BASELINE_KINDS
from .config import Config, load_config, output_root
from .episode import run_episode
from .harness import _write_trajectories, format_table, make_controller, run_grid
from .nn import DivergenceError
from .perception import Scan, segment
from .plotting import plot_learning_curves, plot_trajectories, read_trajectory_log
from .training import train
from .world import generate_scenario, make_stage, scenario_to_dict

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_DIVERGED = 3

_CONTROLLERS = sorted(AGENT_KINDS) + sorted(BASELINE_KINDS)
_OUT_OF_SCOPE = {
    "sac": "agent 'sac' is out of scope; available: " + ", ".join(_CONTROLLERS),
    "ppo": "agent 'ppo' is out of scope; available: " + ", ".join(_CONTROLLERS),
}


def _controller_arg(value: str) -> str:
    if value in _OUT_OF_SCOPE:
        raise argparse.ArgumentTypeError(_OUT_OF_SCOPE[value])
    if value not in _CONTROLLERS:
        raise argparse.ArgumentTypeError(
            f"unknown agent {value!r}; choose from {', '.join(_CONTROLLERS)}")
    return value


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="YAML config file")
    sub.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="KEY=VALUE",
                     help="config override, e.g. agent.lr=3e-4 (repeatable)")
    sub.add_argument("--out", help="output directory (default under the "
                                   "output root)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="asvnav", description=__doc__)
    subs = p.add_subparsers(dest="command", required=True)

    t = subs.add_parser("train", help="train one agent over the curriculum")
    _add_common(t)
    t.add_argument("--agent", type=_controller_arg, required=True)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--steps", type=int, help="override total environment steps")
    t.set_defaults(func=cmd_train)

    e = subs.add_parser("eval", help="run the experiment grid for one "
                                     "controller")
    _add_common(e)
    e.add_argument("--agent", type=_controller_arg, required=True)
    e.add_argument("--checkpoint", help="trained model to load")
    e.add_argument("--episodes", type=int, help="episodes per set override")
    e.add_argument("--seed", type=int,
                   help="override the per-set episode seed base")
    e.add_argument("--record", action="store_true",
                   help="write per-episode trajectory logs")
    e.set_defaults(func=cmd_eval)

    r = subs.add_parser("rollout", help="run and record a single episode")
    _add_common(r)
    r.add_argument("--agent", type=_controller_arg, required=True)
    r.add_argument("--checkpoint")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--stage", type=int, default=1)
    r.set_defaults(func=cmd_rollout)

    s = subs.add_parser("segment", help="cluster one range scan")
    _add_common(s)
    s.add_argument("--scan", required=True,
                   help="JSON file with 'ranges' (null = no return) and "
                        "optional 'max_range'")
    s.add_argument("--theta-deg", type=float,
                   help="merge threshold override, degrees")
    s.set_defaults(func=cmd_segment)

    x = subs.add_parser("plot-export", help="render metrics or trajectories "
                                            "to SVG")
    _add_common(x)
    x.add_argument("--metrics", nargs="+", help="metrics.csv files (one "
                                                "curve, banded over files)")
    x.add_argument("--traj", help="trajectory log to draw")
    x.add_argument("--column", default="success_rate")
    x.add_argument("--label", default="run")
    x.add_argument("--goals", nargs="*", default=[], metavar="X,Y",
                   help="goal markers for trajectory panels")
    x.set_defaults(func=cmd_plot_export)
    return p


def _out_dir(args, default_name: str) -> str:
    out = args.out or os.path.join(output_root(), default_name)
    os.makedirs(out, exist_ok=True)
    return out


def cmd_train(args, cfg: Config) -> int:
    if args.agent in BASELINE_KINDS:
        print(f"error: {args.agent} has nothing to train; use 'eval'",
              file=sys.stderr)
        return EXIT_USAGE
    out = _out_dir(args, f"train-{args.agent}-s{args.seed}")
    summary = train(args.agent, cfg, args.seed, out, total_steps=args.steps)
    print(f"trained {summary['kind']} for {summary['steps']} steps "
          f"({summary['episodes']} episodes); final success "
          f"{summary['final_eval']['success_rate']:.2f}; artifacts in {out}")
    return EXIT_OK


def cmd_eval(args, cfg: Config) -> int:
    if args.episodes is not None:
        cfg.harness.episodes_per_set = args.episodes
    if args.seed is not None:
        cfg.harness.seed_base = args.seed
    out = _out_dir(args, f"eval-{args.agent}")
    checkpoints = ({args.agent: args.checkpoint}
                   if args.checkpoint is not None else None)
    results = run_grid([args.agent], cfg, checkpoints, out_dir=out,
                       record=args.record)
    sys.stdout.write(format_table(results))
    print(f"artifacts in {out}")
    return EXIT_OK


def cmd_rollout(args, cfg: Config) -> int:
    stage = make_stage(cfg, args.stage)
    sc = generate_scenario(stage, args.seed, cfg)
    controller = make_controller(args.agent, cfg, args.checkpoint)
    reseed = getattr(controller, "reseed", None)
    if reseed is not None:
        reseed(args.seed)
    res = run_episode(sc, cfg, controller.act,
                      np.random.default_rng([args.seed, 3]), record=True)
    out = _out_dir(args, f"rollout-{args.agent}-s{args.seed}")
    _write_trajectories(os.path.join(out, "episode.traj"), res)
    with open(os.path.join(out, "scenario.json"), "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(sc), fh, indent=1, sort_keys=True)
    with open(os.path.join(out, "result.json"), "w", encoding="utf-8") as fh:
        json.dump({
            "success": res.success,
            "collided": res.collided,
            "steps": res.steps,
            "travel_times": res.travel_times,
            "rewards": [round(r, 6) for r in res.rewards],
        }, fh, indent=1, sort_keys=True)
    plot_trajectories(res.trajectories, sc.goals,
                      os.path.join(out, "episode.svg"),
                      buoys=[(b.position[0], b.position[1], b.radius)
                             for b in sc.buoys])
    print(f"success={res.success} steps={res.steps} "
          f"travel_times={res.travel_times}; artifacts in {out}")
    return EXIT_OK


def cmd_segment(args, cfg: Config) -> int:
    with open(args.scan, encoding="utf-8") as fh:
        data = json.load(fh)
    ranges = np.array([math.inf if v is None else float(v)
                       for v in data["ranges"]])
    scan = Scan(ranges=ranges,
                max_range=float(data.get("max_range",
                                         cfg.perception.max_range)))
    theta = args.theta_deg if args.theta_deg is not None \
        else cfg.perception.merge_angle_deg
    clusters = segment(scan, math.radians(theta))
    payload = {
        "num_beams": scan.num_beams,
        "theta_deg": theta,
        "clusters": [{
            "members": list(map(int, c.members)),
            "centroid": [c.centroid[0], c.centroid[1]],
            "radius": c.radius,
        } for c in clusters],
    }
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "clusters.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
        print(f"wrote {path} ({len(clusters)} clusters)")
    else:
        json.dump(payload, sys.stdout, indent=1, sort_keys=True)
        print()
    return EXIT_OK


def cmd_plot_export(args, cfg: Config) -> int:
    if bool(args.metrics) == bool(args.traj):
        print("error: give exactly one of --metrics or --traj",
              file=sys.stderr)
        return EXIT_USAGE
    out = _out_dir(args, "plots")
    if args.metrics:
        path = os.path.join(out, f"{args.column}.svg")
        plot_learning_curves({args.label: args.metrics}, path,
                             column=args.column)
    else:
        path = os.path.join(out, "trajectories.svg")
        goals = []
        for pair in args.goals:
            gx, _, gy = pair.partition(",")
            goals.append((float(gx), float(gy)))
        plot_trajectories(read_trajectory_log(args.traj), goals, path)
    print(f"wrote {path}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles --help and usage errors
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        cfg = load_config(args.config, args.overrides)
    except (OSError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args, cfg)
    except DivergenceError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except Exception as exc:  # CLI boundary: report, don't traceback
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
