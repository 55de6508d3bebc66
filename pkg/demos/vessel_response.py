"""
Differential-thrust vessel: step responses and turning
======================================================

Drives the 3-DoF hull model open loop: settle to terminal speed ahead and
astern, then hold asymmetric thrust to trace a turning circle.
"""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from asvnav.config import DEFAULT_VESSEL, output_root
from asvnav.dynamics import (
    BodyVelocity, Pose2D, ThrustPair, VesselState,
    step_dynamics, terminal_speed, thrust_to_force,
)

out = os.path.join(output_root(), "demos", "vessel_response")
os.makedirs(out, exist_ok=True)
dt = 0.05

# settle from rest under constant symmetric thrust, ahead and astern
for label, pair in (("ahead", ThrustPair(1000.0, 1000.0)),
                    ("astern", ThrustPair(-500.0, -500.0))):
    settled = terminal_speed(DEFAULT_VESSEL, pair)
    print(f"terminal surge speed {label:6s} at ({pair.left:6.0f}, "
          f"{pair.right:6.0f}) N: {settled:+.3f} m/s")

# full-ahead step response, 40 s
state = VesselState(Pose2D(0.0, 0.0, 0.0), BodyVelocity(0.0, 0.0, 0.0),
                    ThrustPair(1000.0, 1000.0))
force = thrust_to_force(state.thrusts, DEFAULT_VESSEL)
ts, us = [], []
for k in range(int(40.0 / dt)):
    state = step_dynamics(state, force, dt, DEFAULT_VESSEL)
    ts.append((k + 1) * dt)
    us.append(state.vel.u)
print(f"surge after 5 s: {us[int(5 / dt) - 1]:.3f} m/s, "
      f"after 40 s: {us[-1]:.3f} m/s")

# asymmetric thrust walks the hull around a circle; drag caps the yaw rate
state = VesselState(Pose2D(0.0, 0.0, 0.0), BodyVelocity(0.0, 0.0, 0.0),
                    ThrustPair(1000.0, -500.0))
force = thrust_to_force(state.thrusts, DEFAULT_VESSEL)
xs, ys = [], []
for _ in range(int(120.0 / dt)):
    state = step_dynamics(state, force, dt, DEFAULT_VESSEL)
    xs.append(state.pose.x)
    ys.append(state.pose.y)
print(f"steady yaw rate under (1000, -500) N: {state.vel.r:+.4f} rad/s "
      f"({np.degrees(state.vel.r):+.2f} deg/s)")

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
ax1.plot(ts, us)
ax1.set_xlabel("time [s]")
ax1.set_ylabel("surge u [m/s]")
ax1.set_title("full-ahead step response")
ax2.plot(xs, ys)
ax2.set_aspect("equal")
ax2.set_xlabel("x [m]")
ax2.set_ylabel("y [m]")
ax2.set_title("turning circle, (1000, -500) N")
fig.tight_layout()
fig.savefig(os.path.join(out, "response.svg"))
plt.close(fig)
print(f"wrote {os.path.join(out, 'response.svg')}")
