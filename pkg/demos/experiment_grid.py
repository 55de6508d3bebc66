"""
Seeded evaluation grid
======================

Runs two controllers over a shrunken version of the evaluation protocol
(fewer sets, fewer episodes) and prints the success/travel-time table.  The
full protocol is six sets from "3 rob 0 obs" to "5 rob 4 obs" at 100
episodes each; set sizes and counts live in the harness config.  Episode
seeds are fixed, so rerunning reproduces the table byte for byte.
"""

import os

from asvnav.config import Config, output_root
from asvnav.harness import experiment_sets, format_table, run_grid

cfg = Config()
full = experiment_sets(cfg)
print("full protocol:", ", ".join(s.label for s in full),
      f"at {full[0].episodes} episodes per set")

cfg.harness.set_robots = [2, 3]
cfg.harness.set_buoys = [0, 2]
cfg.harness.episodes_per_set = 5

out = os.path.join(output_root(), "demos", "experiment_grid")
results = run_grid(["random", "apf"], cfg, out_dir=out)
print(f"\nshrunken grid, {cfg.harness.episodes_per_set} episodes per set "
      f"(success rate, mean travel time of finishers):\n")
print(format_table(results))
print(f"per-episode records and summary.json under {out}")
print("trained controllers join via run_grid(['ac-iqn', ...], cfg, "
      "checkpoints={'ac-iqn': path})")
