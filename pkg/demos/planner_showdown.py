"""
Potential field vs. model predictive control on the same water
==============================================================

One vessel, a goal 40 m away, two buoys straddling the straight line.  The
scene is the classic trap for reactive fields: summed repulsion from both
buoys balances the attraction short of the gate, so the vessel oscillates
and never gets through.  The predictive planner only pays for commands whose
5-step rollout actually overlaps a hull, so it threads the gap.
"""

import os

import numpy as np

from asvnav.baselines import make_baseline
from asvnav.config import Config, output_root
from asvnav.dynamics import Pose2D
from asvnav.episode import run_episode
from asvnav.plotting import plot_trajectories
from asvnav.world import Buoy, Scenario

cfg = Config()
out = os.path.join(output_root(), "demos", "planner_showdown")
os.makedirs(out, exist_ok=True)

sc = Scenario(
    starts=[Pose2D(0.0, 0.0, 0.0)],
    goals=[(40.0, 0.0)],
    buoys=[Buoy((16.0, 1.5), 2.0), Buoy((27.0, -2.5), 2.0)],
    bounds=(-10.0, -25.0, 50.0, 25.0),
)

for kind in ("apf", "mpc"):
    planner = make_baseline(kind, cfg)
    res = run_episode(sc, cfg, planner.act, np.random.default_rng(7),
                      record=True)
    traj = res.trajectories[0]
    gap = min(np.hypot(traj[:, 1] - b.position[0],
                       traj[:, 2] - b.position[1]).min()
              for b in sc.buoys)
    if res.success:
        print(f"{kind:3s}: reached the goal in {res.travel_times[0]:.1f} s, "
              f"closest buoy pass {gap:.1f} m center to center")
    else:
        print(f"{kind:3s}: timed out, furthest progress x = "
              f"{traj[:, 1].max():.1f} m (repulsion gate sits near x = 16)")
    path = os.path.join(out, f"{kind}.svg")
    plot_trajectories(res.trajectories, sc.goals, path,
                      buoys=[(b.position[0], b.position[1], b.radius)
                             for b in sc.buoys])
    print(f"     wrote {path}")

print("\nan obstacle-free run for contrast:")
clear = Scenario(starts=sc.starts, goals=sc.goals, buoys=[],
                 bounds=sc.bounds)
for kind in ("apf", "mpc"):
    res = run_episode(clear, cfg, make_baseline(kind, cfg).act,
                      np.random.default_rng(7))
    print(f"{kind:3s}: success={res.success}, {res.travel_times[0]:.1f} s")
