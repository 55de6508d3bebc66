"""Planar 3-DoF vessel dynamics: surge, sway and yaw of a twin-thruster boat.

Rigid-body equations with diagonal added mass and linear-plus-quadratic drag,

    (M_RB + M_A) dv/dt = tau + tau_dist - C_RB(v) v - N(v) v,

integrated with semi-implicit Euler (velocity update first, then pose).
World frame is x-east / y-north with yaw measured CCW from +x; body frame is
x-forward / y-port, so sway velocity is positive to port and yaw rate positive
counter-clockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

# Thruster envelope, shared by both propellers.  Reverse thrust is weaker than
# forward thrust, which is what makes the two terminal speeds asymmetric.
THRUST_MIN = -500.0   # N
THRUST_MAX = 1000.0   # N
THRUST_RATE_LIMIT = 1000.0  # N/s, magnitude bound on commanded thrust change


def wrap_angle(a: float) -> float:
    """Wrap an angle to [-pi, pi)."""
    return (a + math.pi) % (2.0 * math.pi) - math.pi


@dataclass
class Pose2D:
    """Planar pose in the world frame. yaw in radians, wrapped to [-pi, pi)."""

    x: float
    y: float
    yaw: float


@dataclass
class BodyVelocity:
    """Body-frame velocity: surge u (forward), sway v (port), yaw rate r (CCW)."""

    u: float
    v: float
    r: float


@dataclass
class ThrustPair:
    """Left and right propeller thrusts in newtons."""

    left: float
    right: float


@dataclass
class GeneralizedForce:
    """Body-frame force/moment triple (X, Y, N_m).

    X is surge force (forward positive), Y sway force (port positive).  N_m is
    the yaw moment with the differential-thrust sign convention: positive N_m
    turns the bow toward starboard, i.e. it is a clockwise (negative-yaw)
    moment.  The integrator flips the sign exactly once when assembling the
    CCW-positive yaw acceleration.  Disturbance forces passed to
    ``step_dynamics`` use the same convention.
    """

    X: float
    Y: float
    N_m: float


@dataclass
class VesselState:
    """Full kinematic/actuator state of one vessel."""

    pose: Pose2D
    vel: BodyVelocity
    thrusts: ThrustPair


@dataclass
class VesselParams:
    """Mass, drag and geometry parameters.

    Damping per axis is ``d1 * w + d2 * |w| * w`` so drag is symmetric in the
    direction of motion.  ``thruster_offset`` is the lateral lever arm of each
    propeller from the centerline; ``hull_radius`` is the bounding circle used
    for collisions.
    """

    mass: float
    inertia_z: float
    added_mass_xu: float
    added_mass_yv: float
    added_mass_nr: float
    damping_u: float
    damping_u2: float
    damping_v: float
    damping_v2: float
    damping_r: float
    damping_r2: float
    thruster_offset: float
    hull_radius: float


def thrust_to_force(thrusts: ThrustPair, params: VesselParams) -> GeneralizedForce:
    """Map propeller thrusts to the body-frame generalized force.

    X = T_l + T_r, Y = 0, N_m = (T_l - T_r) * b.  With the clockwise-positive
    N_m convention above, more thrust on the left pushes the bow to starboard.
    """
    return GeneralizedForce(
        X=thrusts.left + thrusts.right,
        Y=0.0,
        N_m=(thrusts.left - thrusts.right) * params.thruster_offset,
    )


def apply_thrust_delta(thrusts: ThrustPair, delta: tuple[float, float],
                       dt: float) -> ThrustPair:
    """Integrate a commanded thrust-rate pair over dt and clip to the envelope.

    Rates are clipped to +-THRUST_RATE_LIMIT first, the resulting thrusts to
    [THRUST_MIN, THRUST_MAX] after.
    """
    dl = min(max(delta[0], -THRUST_RATE_LIMIT), THRUST_RATE_LIMIT)
    dr = min(max(delta[1], -THRUST_RATE_LIMIT), THRUST_RATE_LIMIT)
    return ThrustPair(
        left=min(max(thrusts.left + dl * dt, THRUST_MIN), THRUST_MAX),
        right=min(max(thrusts.right + dr * dt, THRUST_MIN), THRUST_MAX),
    )


def step_dynamics(state: VesselState, force: GeneralizedForce, dt: float,
                  params: VesselParams,
                  disturbance: GeneralizedForce | None = None) -> VesselState:
    """Advance the state by one physics step of length dt.

    Semi-implicit Euler: accelerations are evaluated at the current velocity,
    the pose is then advanced with the updated velocity.  state.thrusts is
    carried through untouched; the caller converts thrusts to ``force``.

    Raises ValueError if the result is non-finite (integration blow-up).
    """
    u, v, r = state.vel.u, state.vel.v, state.vel.r
    m = params.mass

    X = force.X
    Y = force.Y
    n_ccw = -force.N_m
    if disturbance is not None:
        X += disturbance.X
        Y += disturbance.Y
        n_ccw -= disturbance.N_m

    # Coriolis/centripetal contribution of the rigid body, C_RB(v) v.
    cor_u = -m * v * r
    cor_v = m * u * r

    drag_u = params.damping_u * u + params.damping_u2 * abs(u) * u
    drag_v = params.damping_v * v + params.damping_v2 * abs(v) * v
    drag_r = params.damping_r * r + params.damping_r2 * abs(r) * r

    du = (X - cor_u - drag_u) / (m + params.added_mass_xu)
    dv = (Y - cor_v - drag_v) / (m + params.added_mass_yv)
    dr = (n_ccw - drag_r) / (params.inertia_z + params.added_mass_nr)

    u2 = u + dt * du
    v2 = v + dt * dv
    r2 = r + dt * dr

    cy = math.cos(state.pose.yaw)
    sy = math.sin(state.pose.yaw)
    x2 = state.pose.x + dt * (u2 * cy - v2 * sy)
    y2 = state.pose.y + dt * (u2 * sy + v2 * cy)
    yaw2 = wrap_angle(state.pose.yaw + dt * r2)

    if not all(map(math.isfinite, (u2, v2, r2, x2, y2, yaw2))):
        raise ValueError("non-finite vessel state after integration step")

    return VesselState(
        pose=Pose2D(x=x2, y=y2, yaw=yaw2),
        vel=BodyVelocity(u=u2, v=v2, r=r2),
        thrusts=replace(state.thrusts),
    )


def terminal_speed(params: VesselParams, thrusts: ThrustPair,
                   dt: float = 0.05, settle_tol: float = 1e-5,
                   max_time: float = 600.0) -> float:
    """Settled straight-line surge speed under constant symmetric thrust.

    Runs the integrator from rest until the speed change over a 1 s window
    drops below settle_tol.  Requires left == right thrust (no net moment).

    Raises ValueError if the thrusts are asymmetric or the speed has not
    settled within max_time simulated seconds.
    """
    if abs(thrusts.left - thrusts.right) > 1e-9:
        raise ValueError("terminal_speed needs symmetric thrust")
    force = thrust_to_force(thrusts, params)
    state = VesselState(Pose2D(0.0, 0.0, 0.0), BodyVelocity(0.0, 0.0, 0.0),
                        ThrustPair(thrusts.left, thrusts.right))
    window = max(1, round(1.0 / dt))
    steps = round(max_time / dt)
    prev = state.vel.u
    for k in range(1, steps + 1):
        state = step_dynamics(state, force, dt, params)
        if k % window == 0:
            if abs(state.vel.u - prev) < settle_tol:
                return state.vel.u
            prev = state.vel.u
    raise ValueError("terminal speed did not settle within max_time")


def speed_over_ground(vel: BodyVelocity) -> float:
    """Magnitude of the planar velocity, frame independent."""
    return math.hypot(vel.u, vel.v)


def body_to_world(pose: Pose2D, vec: tuple[float, float]) -> tuple[float, float]:
    """Rotate a body-frame vector into world axes."""
    c, s = math.cos(pose.yaw), math.sin(pose.yaw)
    return (vec[0] * c - vec[1] * s, vec[0] * s + vec[1] * c)


def world_to_body(pose: Pose2D, vec: tuple[float, float]) -> tuple[float, float]:
    """Rotate a world-frame vector into body axes."""
    c, s = math.cos(pose.yaw), math.sin(pose.yaw)
    return (vec[0] * c + vec[1] * s, -vec[0] * s + vec[1] * c)


def world_velocity(state: VesselState) -> tuple[float, float]:
    """World-frame velocity vector of a vessel."""
    return body_to_world(state.pose, (state.vel.u, state.vel.v))
