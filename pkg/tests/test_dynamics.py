"""Vessel dynamics: thrust mapping, integration, calibration, invariants."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asvnav.config import DEFAULT_VESSEL
from asvnav.dynamics import (
    THRUST_MAX,
    THRUST_MIN,
    BodyVelocity,
    GeneralizedForce,
    Pose2D,
    ThrustPair,
    VesselState,
    apply_thrust_delta,
    speed_over_ground,
    step_dynamics,
    terminal_speed,
    thrust_to_force,
    wrap_angle,
)

P = DEFAULT_VESSEL


def make_state(u=0.0, v=0.0, r=0.0, x=0.0, y=0.0, yaw=0.0,
               tl=0.0, tr=0.0) -> VesselState:
    return VesselState(Pose2D(x, y, yaw), BodyVelocity(u, v, r),
                       ThrustPair(tl, tr))


def test_thrust_to_force_components():
    f = thrust_to_force(ThrustPair(300.0, 100.0), P)
    assert f.X == 400.0
    assert f.Y == 0.0
    assert f.N_m == 200.0 * P.thruster_offset


def test_equal_thrust_zero_moment():
    f = thrust_to_force(ThrustPair(650.0, 650.0), P)
    assert f.N_m == 0.0


def test_thrust_delta_caps_at_max():
    t = apply_thrust_delta(ThrustPair(800.0, 800.0), (1000.0, 1000.0), 0.5)
    assert t.left == THRUST_MAX
    assert t.right == THRUST_MAX


def test_thrust_delta_caps_at_min():
    t = apply_thrust_delta(ThrustPair(-300.0, -300.0), (-1000.0, -1000.0), 0.5)
    assert t.left == THRUST_MIN
    assert t.right == THRUST_MIN


def test_thrust_delta_plain_integration():
    t = apply_thrust_delta(ThrustPair(100.0, -100.0), (400.0, -200.0), 0.5)
    assert t.left == pytest.approx(300.0)
    assert t.right == pytest.approx(-200.0)


def test_thrust_delta_rate_limited():
    # rates beyond the limit behave like the limit
    t = apply_thrust_delta(ThrustPair(0.0, 0.0), (5000.0, -5000.0), 0.1)
    assert t.left == pytest.approx(100.0)
    assert t.right == pytest.approx(-100.0)


def test_terminal_speed_forward():
    u = terminal_speed(P, ThrustPair(1000.0, 1000.0))
    assert abs(u - 3.3) < 0.2


def test_terminal_speed_reverse():
    u = terminal_speed(P, ThrustPair(-500.0, -500.0))
    assert abs(u + 2.3) < 0.2


def test_terminal_speed_rejects_asymmetric():
    with pytest.raises(ValueError):
        terminal_speed(P, ThrustPair(1000.0, 999.0))


def test_differential_thrust_turns_starboard():
    # more thrust on the left pushes the bow clockwise (negative yaw rate)
    state = make_state()
    force = thrust_to_force(ThrustPair(1000.0, -500.0), P)
    for _ in range(40):
        state = step_dynamics(state, force, 0.05, P)
    assert state.vel.r < 0.0
    assert state.pose.yaw < 0.0


def test_differential_thrust_turns_port():
    state = make_state()
    force = thrust_to_force(ThrustPair(-500.0, 1000.0), P)
    for _ in range(40):
        state = step_dynamics(state, force, 0.05, P)
    assert state.vel.r > 0.0
    assert state.pose.yaw > 0.0


def test_steady_turn_rate_matches_moment_balance():
    # constant differential: settled |r| solves dr*r + dr2*r^2 = |N_m|
    force = thrust_to_force(ThrustPair(1000.0, -500.0), P)
    state = make_state()
    for _ in range(2000):
        state = step_dynamics(state, force, 0.05, P)
    n = abs(force.N_m)
    r = abs(state.vel.r)
    assert P.damping_r * r + P.damping_r2 * r * r == pytest.approx(n, rel=1e-3)


def test_straight_line_is_exact():
    # pure surge with symmetric thrust never leaves the x axis
    state = make_state()
    force = thrust_to_force(ThrustPair(700.0, 700.0), P)
    for _ in range(200):
        state = step_dynamics(state, force, 0.05, P)
    assert state.pose.y == 0.0
    assert state.pose.yaw == 0.0
    assert state.vel.v == 0.0
    assert state.vel.r == 0.0
    assert state.pose.x > 0.0


def test_disturbance_adds_to_thrust_force():
    # disturbance convention matches GeneralizedForce (N_m clockwise-positive)
    s_base = make_state()
    f = thrust_to_force(ThrustPair(500.0, 500.0), P)
    push = GeneralizedForce(X=100.0, Y=50.0, N_m=200.0)
    s1 = step_dynamics(s_base, f, 0.05, P, disturbance=push)
    f2 = GeneralizedForce(f.X + 100.0, f.Y + 50.0, f.N_m + 200.0)
    s2 = step_dynamics(s_base, f2, 0.05, P)
    assert s1.vel.u == pytest.approx(s2.vel.u)
    assert s1.vel.v == pytest.approx(s2.vel.v)
    assert s1.vel.r == pytest.approx(s2.vel.r)
    # positive N_m is a starboard moment: yaw rate goes negative
    assert s1.vel.r < 0.0


def test_nonfinite_state_rejected():
    state = make_state(u=float("nan"))
    with pytest.raises(ValueError):
        step_dynamics(state, GeneralizedForce(0.0, 0.0, 0.0), 0.05, P)


def test_wrap_angle_range():
    for a in np.linspace(-20.0, 20.0, 401):
        w = wrap_angle(float(a))
        assert -math.pi <= w < math.pi


def test_speed_over_ground():
    assert speed_over_ground(BodyVelocity(3.0, 4.0, 1.0)) == pytest.approx(5.0)


thrusts_st = st.floats(min_value=THRUST_MIN, max_value=THRUST_MAX)
rates_st = st.floats(min_value=-1000.0, max_value=1000.0)


@given(tl=thrusts_st, tr=thrusts_st, dl=rates_st, dr=rates_st,
       dt=st.floats(min_value=0.01, max_value=1.0))
def test_prop_thrust_delta_stays_in_envelope(tl, tr, dl, dr, dt):
    t = apply_thrust_delta(ThrustPair(tl, tr), (dl, dr), dt)
    assert THRUST_MIN <= t.left <= THRUST_MAX
    assert THRUST_MIN <= t.right <= THRUST_MAX


vel_st = st.floats(min_value=-4.0, max_value=4.0)
sway_st = st.floats(min_value=-2.0, max_value=2.0)
rate_st = st.floats(min_value=-1.5, max_value=1.5)
yaw_st = st.floats(min_value=-math.pi, max_value=math.pi - 1e-9)


def kinetic_energy(vel: BodyVelocity) -> float:
    return 0.5 * ((P.mass + P.added_mass_xu) * vel.u ** 2 +
                  (P.mass + P.added_mass_yv) * vel.v ** 2 +
                  (P.inertia_z + P.added_mass_nr) * vel.r ** 2)


@settings(max_examples=200)
@given(u=vel_st, v=sway_st, r=rate_st, yaw=yaw_st)
def test_prop_unforced_motion_dissipates(u, v, r, yaw):
    # with no thrust the drag can only remove energy at operational speeds
    state = make_state(u=u, v=v, r=r, yaw=yaw)
    e0 = kinetic_energy(state.vel)
    nxt = step_dynamics(state, GeneralizedForce(0.0, 0.0, 0.0), 0.05, P)
    assert kinetic_energy(nxt.vel) <= e0 + 1e-12


@settings(max_examples=100)
@given(u=vel_st, v=sway_st, r=rate_st, yaw=yaw_st)
def test_prop_yaw_stays_wrapped(u, v, r, yaw):
    state = make_state(u=u, v=v, r=r, yaw=yaw)
    force = GeneralizedForce(500.0, 0.0, 800.0)
    for _ in range(10):
        state = step_dynamics(state, force, 0.05, P)
        assert -math.pi <= state.pose.yaw < math.pi


@settings(max_examples=20, deadline=None)
@given(u=st.floats(min_value=0.0, max_value=3.0),
       r=st.floats(min_value=-0.5, max_value=0.5))
def test_prop_halving_dt_converges(u, r):
    # first-order integrator: halving dt should at least halve-ish the drift
    force = thrust_to_force(ThrustPair(800.0, 300.0), P)

    def run(dt, steps):
        s = make_state(u=u, r=r)
        for _ in range(steps):
            s = step_dynamics(s, force, dt, P)
        return np.array([s.pose.x, s.pose.y, s.pose.yaw])

    ref = run(0.00125, 1600)
    err_a = np.linalg.norm(run(0.05, 40) - ref)
    err_b = np.linalg.norm(run(0.025, 80) - ref)
    assert err_b <= err_a / 1.8 + 1e-9
