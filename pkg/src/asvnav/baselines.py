"""Potential-field and receding-horizon planners on the shared interfaces.

Both planners consume exactly the Observation the learned agents see and emit
thrust-rate pairs from the same 25-command table, so they drop into episodes
and the experiment harness unchanged.  All geometry is in the ego frame: the
vessel sits at the origin heading +x.
"""

from __future__ import annotations

import math

import numpy as np

from .agents import DiscreteActionTable
from .colregs import EncounterClass, classify
from .config import ApfConfig, Config, RewardConfig
from .dynamics import (
    THRUST_MAX,
    BodyVelocity,
    Pose2D,
    ThrustPair,
    VesselState,
    apply_thrust_delta,
    step_dynamics,
    terminal_speed,
    thrust_to_force,
    world_velocity,
)
from .perception import Observation

Vec = tuple[float, float]


def apf_potential(pos: Vec, goal: Vec, obstacles: list[Vec],
                  acfg: ApfConfig) -> float:
    """Attractive plus repulsive potential at pos.

    Repulsion from each obstacle activates inside the cutoff d0 and carries
    the squared goal distance as a factor, so it fades out near the goal
    instead of trapping the vessel at a local minimum short of it.
    """
    dg2 = (pos[0] - goal[0]) ** 2 + (pos[1] - goal[1]) ** 2
    u = 0.5 * acfg.k_att * dg2
    for o in obstacles:
        d = math.dist(pos, o)
        if d < 1e-9:
            raise ValueError("position coincides with an obstacle")
        if d <= acfg.d0:
            u += 0.5 * acfg.k_rep * (1.0 / d - 1.0 / acfg.d0) ** 2 * dg2
    return u


def apf_force(pos: Vec, goal: Vec, obstacles: list[Vec],
              acfg: ApfConfig) -> np.ndarray:
    """Analytic negative gradient of apf_potential.

    The goal-distance factor inside the repulsive term contributes a second
    component along the goal direction; dropping it is the classic sign error
    the finite-difference check guards against.
    """
    p = np.asarray(pos, dtype=float)
    g = np.asarray(goal, dtype=float)
    to_goal = p - g
    f = -acfg.k_att * to_goal
    dg2 = float(to_goal @ to_goal)
    for o in obstacles:
        dv = p - np.asarray(o, dtype=float)
        d = float(math.hypot(dv[0], dv[1]))
        if d < 1e-9:
            raise ValueError("position coincides with an obstacle")
        if d > acfg.d0:
            continue
        a = 1.0 / d - 1.0 / acfg.d0
        f = f + acfg.k_rep * a * dg2 * dv / d ** 3
        f = f - acfg.k_rep * a * a * to_goal
    return f


def rule_ghost(position: Vec, velocity: Vec, enc: EncounterClass,
               offset: float) -> Vec:
    """Point obstacle blocking the non-compliant side of one vehicle.

    Head-on: the ghost sits on the vehicle's starboard side, closing the lane
    a rule-breaking ego would take and leaving the port-to-port passage open.
    Crossing give-way: the ghost sits ahead of the stand-on vessel, forcing
    the ego to pass astern.
    """
    if enc is EncounterClass.NONE:
        raise ValueError("no ghost for a non-encounter")
    n = math.hypot(velocity[0], velocity[1])
    if n == 0.0:
        raise ValueError("vehicle without a course cannot be classified")
    hx, hy = velocity[0] / n, velocity[1] / n
    if enc is EncounterClass.HEAD_ON:
        return (position[0] + offset * hy, position[1] - offset * hx)
    return (position[0] + offset * hx, position[1] + offset * hy)


def virtual_obstacles(obs: Observation, rcfg: RewardConfig, acfg: ApfConfig,
                      min_speed: float = 0.5) -> list[Vec]:
    """Rule ghosts for every perceived vehicle in an active encounter."""
    ghosts = []
    for ob in obs.objects:
        if not ob.is_vehicle or ob.speed() < min_speed:
            continue
        enc = classify((0.0, 0.0), obs.ego.velocity, ob.position, ob.velocity,
                       rcfg)
        if enc is EncounterClass.NONE:
            continue
        ghosts.append(rule_ghost(ob.position, ob.velocity, enc,
                                 ob.radius + acfg.virtual_offset_margin))
    return ghosts


def _initial_state(obs: Observation) -> VesselState:
    # ego frame == body frame at decision time, so the pose starts at zero
    return VesselState(
        pose=Pose2D(0.0, 0.0, 0.0),
        vel=BodyVelocity(u=obs.ego.velocity[0], v=obs.ego.velocity[1],
                         r=obs.ego.yaw_rate),
        thrusts=ThrustPair(obs.ego.thrusts.left, obs.ego.thrusts.right),
    )


def _advance(state: VesselState, action: Vec,
             cfg: Config) -> tuple[VesselState, float]:
    """One control step under a held command; returns the new state and the
    total applied thrust change (after saturation)."""
    thr = apply_thrust_delta(state.thrusts, action, cfg.sim.dt_control)
    dthr = (abs(thr.left - state.thrusts.left)
            + abs(thr.right - state.thrusts.right))
    force = thrust_to_force(thr, cfg.vessel)
    st = VesselState(pose=state.pose, vel=state.vel, thrusts=thr)
    for _ in range(max(1, round(cfg.sim.dt_control / cfg.sim.dt_phys))):
        st = step_dynamics(st, force, cfg.sim.dt_phys, cfg.vessel)
    return st, dthr


def apf_action(obs: Observation, cfg: Config,
               u_max: float | None = None) -> Vec:
    """Joint command whose one-step velocity best matches the field force.

    The force is rescaled to the speed envelope (direction preserved,
    magnitude min(|F|/k_att, u_max)) before matching, since raw potential
    gradients are not commensurate with m/s.  Ties break to the lowest
    command index.
    """
    acfg = cfg.apf
    if u_max is None:
        u_max = terminal_speed(cfg.vessel, ThrustPair(THRUST_MAX, THRUST_MAX))
    obstacles = [ob.position for ob in obs.objects]
    obstacles += virtual_obstacles(obs, cfg.reward, acfg,
                                   cfg.perception.vehicle_speed_min)
    f = apf_force((0.0, 0.0), obs.ego.goal, obstacles, acfg)
    mag = float(math.hypot(f[0], f[1]))
    if mag == 0.0:
        target = (0.0, 0.0)
    else:
        scale = min(mag / acfg.k_att, u_max) / mag
        target = (f[0] * scale, f[1] * scale)

    table = DiscreteActionTable()
    start = _initial_state(obs)
    best_err, best_idx = math.inf, 0
    for idx in range(table.n):
        st, _ = _advance(start, table.pair(idx), cfg)
        v = world_velocity(st)
        err = (v[0] - target[0]) ** 2 + (v[1] - target[1]) ** 2
        if err < best_err:
            best_err, best_idx = err, idx
    return table.pair(best_idx)


def mpc_costs(obs: Observation, cfg: Config) -> np.ndarray:
    """Horizon cost of holding each of the 25 joint commands.

    The ego follows the full dynamics; perceived objects extrapolate at
    constant velocity.  The hazard part is the worst single (object, step)
    term: collision indicator, rule-side violation (simulated ego inside the
    encounter ghost disk) and encounter-class flips.  Thrust effort and goal
    progress are accumulated separately on top.
    """
    mcfg, rcfg, acfg = cfg.mpc, cfg.reward, cfg.apf
    min_speed = cfg.perception.vehicle_speed_min
    hull = cfg.vessel.hull_radius
    dt = cfg.sim.dt_control
    goal = obs.ego.goal
    d_start = math.hypot(goal[0], goal[1])
    objs = obs.objects
    init_cls = [
        classify((0.0, 0.0), obs.ego.velocity, ob.position, ob.velocity, rcfg)
        if ob.is_vehicle and ob.speed() >= min_speed else EncounterClass.NONE
        for ob in objs
    ]

    table = DiscreteActionTable()
    start = _initial_state(obs)
    costs = np.empty(table.n)
    for idx in range(table.n):
        action = table.pair(idx)
        st = start
        peak = 0.0
        effort = 0.0
        prev = list(init_cls)
        for t in range(1, mcfg.horizon + 1):
            st, dthr = _advance(st, action, cfg)
            effort += mcfg.thrust_effort_weight * dthr / 2000.0
            ep = (st.pose.x, st.pose.y)
            ev = world_velocity(st)
            for i, ob in enumerate(objs):
                op = (ob.position[0] + t * dt * ob.velocity[0],
                      ob.position[1] + t * dt * ob.velocity[1])
                hit = 1.0 if (math.dist(ep, op)
                              < hull + ob.radius + mcfg.safety_margin) else 0.0
                rule = 0.0
                cls = EncounterClass.NONE
                if ob.is_vehicle and ob.speed() >= min_speed:
                    cls = classify(ep, ev, op, ob.velocity, rcfg)
                    if cls is not EncounterClass.NONE:
                        off = ob.radius + acfg.virtual_offset_margin
                        if math.dist(ep, rule_ghost(op, ob.velocity, cls,
                                                    off)) < off:
                            rule = mcfg.rule_cost
                flip = 1.0 if cls is not prev[i] else 0.0
                prev[i] = cls
                peak = max(peak, mcfg.collision_weight * hit
                           + mcfg.rule_weight * rule
                           + mcfg.transition_cost * flip)
        progress = d_start - math.dist((st.pose.x, st.pose.y), goal)
        costs[idx] = peak + effort - mcfg.progress_weight * progress
    return costs


def mpc_action(obs: Observation, cfg: Config) -> Vec:
    """Lowest-cost held command; ties break to the lowest index."""
    return DiscreteActionTable().pair(int(np.argmin(mpc_costs(obs, cfg))))


class ApfPlanner:
    """Per-decision potential-field controller."""

    kind = "apf"

    def __init__(self, cfg: Config):
        self.cfg = cfg
        # calibrated flat-out speed, computed once; used to scale F
        self.u_max = terminal_speed(cfg.vessel,
                                    ThrustPair(THRUST_MAX, THRUST_MAX))

    def act(self, vid: int, obs: Observation) -> Vec:
        return apf_action(obs, self.cfg, self.u_max)


class MpcPlanner:
    """Sampling-based receding-horizon controller."""

    kind = "mpc"

    def __init__(self, cfg: Config):
        self.cfg = cfg

    def act(self, vid: int, obs: Observation) -> Vec:
        return mpc_action(obs, self.cfg)


BASELINE_KINDS = {"apf": ApfPlanner, "mpc": MpcPlanner}


def make_baseline(kind: str, cfg: Config):
    if kind not in BASELINE_KINDS:
        raise ValueError(f"unknown baseline {kind!r}; "
                         f"expected one of {sorted(BASELINE_KINDS)}")
    return BASELINE_KINDS[kind](cfg)
