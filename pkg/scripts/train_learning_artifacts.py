"""Produce the committed learning artifacts.

Trains AC-IQN and DQN on the first curriculum stage for each seed, scores
each run's validation-selected checkpoint and a random policy on the fixed
held-out bank, and copies the small text artifacts (metrics.csv,
eval_summary.json, manifest.json plus an aggregate summary) into
artifacts/learning/.  Heavy run directories stay under runs/ and are not
tracked.

Rerun from the repository root:

    python3 scripts/train_learning_artifacts.py --steps 100000 --seeds 101 102 103
"""

import argparse
import json
import logging
import os
import shutil
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from asvnav.agents import load_agent, make_agent  # noqa: E402
from asvnav.config import load_config  # noqa: E402
from asvnav.training import evaluate, greedy_policy, train  # noqa: E402

log = logging.getLogger("train_artifacts")

ARTIFACT_FILES = ("metrics.csv", "eval_summary.json", "manifest.json",
                  "summary.json")


def random_policy(cfg, seed):
    agent = make_agent("random", cfg, np.random.default_rng([seed, 9]))
    return lambda vid, obs: agent.act(obs, explore=True)


def write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=100000)
    ap.add_argument("--seeds", type=int, nargs="+", default=[101, 102, 103])
    ap.add_argument("--kinds", nargs="+", default=["ac-iqn", "dqn"])
    ap.add_argument("--stage", type=int, default=1)
    ap.add_argument("--episodes", type=int, default=100,
                    help="held-out evaluation episodes per run")
    ap.add_argument("--out", default="runs/learning")
    ap.add_argument("--artifacts", default="artifacts/learning")
    args = ap.parse_args(argv)

    logging.basicConfig(level=logging.INFO,
                        format="%(asctime)s %(name)s %(message)s")
    cfg = load_config()
    os.makedirs(args.out, exist_ok=True)
    success = {}

    for kind in args.kinds:
        for seed in args.seeds:
            name = f"{kind}-s{seed}"
            run_dir = os.path.join(args.out, name)
            t0 = time.time()
            log.info("training %s", name)
            train(kind, cfg, seed, run_dir, total_steps=args.steps)
            ckpt = os.path.join(run_dir, "best.ckpt")
            if not os.path.exists(ckpt):
                ckpt = os.path.join(run_dir, "final.ckpt")
            agent = load_agent(ckpt, cfg, np.random.default_rng([seed, 8]))
            ev = evaluate(greedy_policy(agent), cfg, args.stage, args.episodes)
            ev["checkpoint"] = os.path.basename(ckpt)
            ev["wall_seconds"] = round(time.time() - t0, 1)
            write_json(os.path.join(run_dir, "eval_summary.json"), ev)
            success[name] = ev["success_rate"]
            log.info("%s held-out success %.2f (%.0f s)", name,
                     ev["success_rate"], ev["wall_seconds"])

    for seed in args.seeds:
        name = f"random-s{seed}"
        run_dir = os.path.join(args.out, name)
        os.makedirs(run_dir, exist_ok=True)
        ev = evaluate(random_policy(cfg, seed), cfg, args.stage, args.episodes)
        write_json(os.path.join(run_dir, "eval_summary.json"), ev)
        success[name] = ev["success_rate"]
        log.info("%s held-out success %.2f", name, ev["success_rate"])

    write_json(os.path.join(args.out, "summary.json"), {
        "stage": args.stage,
        "steps": args.steps,
        "episodes": args.episodes,
        "seeds": args.seeds,
        "kinds": args.kinds + ["random"],
        "success": success,
    })

    for name in sorted(os.listdir(args.out)):
        src = os.path.join(args.out, name)
        if not os.path.isdir(src):
            continue
        dst = os.path.join(args.artifacts, name)
        os.makedirs(dst, exist_ok=True)
        for fname in ARTIFACT_FILES:
            if os.path.exists(os.path.join(src, fname)):
                shutil.copy2(os.path.join(src, fname),
                             os.path.join(dst, fname))
    shutil.copy2(os.path.join(args.out, "summary.json"),
                 os.path.join(args.artifacts, "summary.json"))
    log.info("artifacts copied to %s", args.artifacts)


if __name__ == "__main__":
    main()
