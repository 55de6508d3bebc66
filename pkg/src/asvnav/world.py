"""Multi-vessel world: curriculum scenario sampling, lockstep simulation,
collision/goal/timeout bookkeeping, and ground-truth queries for perception.

All vehicles advance simultaneously: the controller computes every action from
the same pre-step snapshot, then the world integrates all hulls in lockstep
physics substeps.  A vehicle that collides, reaches its goal, or times out is
frozen in place (zero velocity, zero thrust) and stays visible as an obstacle.
"""

from __future__ import annotations

import enum
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .config import Config
from .dynamics import (
    BodyVelocity,
    Pose2D,
    ThrustPair,
    VesselState,
    apply_thrust_delta,
    speed_over_ground,
    step_dynamics,
    thrust_to_force,
    world_velocity,
)


@dataclass
class Buoy:
    """Static circular obstacle."""

    position: tuple[float, float]
    radius: float


@dataclass
class Scenario:
    """One sampled episode layout."""

    starts: list[Pose2D]
    goals: list[tuple[float, float]]
    buoys: list[Buoy]
    bounds: tuple[float, float, float, float]  # xmin, ymin, xmax, ymax


@dataclass
class CurriculumStage:
    """One difficulty rung of the training schedule."""

    index: int                      # 1-based
    num_robots: int
    num_buoys: int
    min_start_goal: float           # m
    duration: int                   # environment steps spent on this stage
    side: float                     # m, world square side


class EventKind(enum.Enum):
    COLLISION = "collision"
    GOAL = "goal"
    TIMEOUT = "timeout"


@dataclass
class WorldEvent:
    """Terminal event for one vehicle."""

    kind: EventKind
    vehicle: int
    time: float


def make_stage(cfg: Config, index: int) -> CurriculumStage:
    """Stage row from config; index is 1-based."""
    w = cfg.world
    if not 1 <= index <= len(w.stage_robots):
        raise ValueError(f"stage index must be 1..{len(w.stage_robots)}")
    i = index - 1
    return CurriculumStage(
        index=index,
        num_robots=w.stage_robots[i],
        num_buoys=w.stage_buoys[i],
        min_start_goal=w.stage_min_start_goal[i],
        duration=cfg.train.steps_per_stage[i],
        side=w.stage_side[i],
    )


def check_collision(a, b, hull_radius: float) -> bool:
    """Strict circle overlap between vessels and/or buoys.

    Touching circles (distance exactly equal to the radius sum) do not count.
    """
    pa, ra = _circle_of(a, hull_radius)
    pb, rb = _circle_of(b, hull_radius)
    return math.hypot(pa[0] - pb[0], pa[1] - pb[1]) < ra + rb


def _circle_of(entity, hull_radius: float) -> tuple[tuple[float, float], float]:
    if isinstance(entity, Buoy):
        return entity.position, entity.radius
    if isinstance(entity, VesselState):
        return (entity.pose.x, entity.pose.y), hull_radius
    raise TypeError(f"not a world entity: {type(entity).__name__}")


def generate_scenario(stage: CurriculumStage, seed: int, cfg: Config) -> Scenario:
    """Rejection-sample a scenario layout for the given stage.

    Deterministic for a fixed seed.  Starts, goals and buoys are mutually
    separated by the configured clearance on top of the touching distance, and
    each vehicle's start-goal distance meets the stage minimum.
    """
    rng = np.random.default_rng(seed)
    w = cfg.world
    hull = cfg.vessel.hull_radius
    half = stage.side / 2.0
    bounds = (-half, -half, half, half)

    def sample_point(margin: float) -> tuple[float, float]:
        return (float(rng.uniform(-half + margin, half - margin)),
                float(rng.uniform(-half + margin, half - margin)))

    def clear_of(p: tuple[float, float], r: float,
                 others: list[tuple[tuple[float, float], float]]) -> bool:
        return all(math.hypot(p[0] - q[0], p[1] - q[1]) > r + qr + w.clearance
                   for q, qr in others)

    # keep-out circles accumulated as placements succeed
    placed: list[tuple[tuple[float, float], float]] = []
    starts: list[Pose2D] = []
    goals: list[tuple[float, float]] = []
    for _ in range(stage.num_robots):
        for attempt in range(w.max_sample_tries):
            s = sample_point(hull)
            g = sample_point(hull)
            if math.hypot(s[0] - g[0], s[1] - g[1]) < stage.min_start_goal:
                continue
            if clear_of(s, hull, placed) and clear_of(g, hull, placed + [(s, hull)]):
                break
        else:
            raise ValueError("scenario sampling failed: bounds too tight for stage")
        yaw = float(rng.uniform(-math.pi, math.pi))
        starts.append(Pose2D(s[0], s[1], yaw))
        goals.append(g)
        placed.append((s, hull))
        placed.append((g, hull))

    buoys: list[Buoy] = []
    for _ in range(stage.num_buoys):
        for attempt in range(w.max_sample_tries):
            p = sample_point(w.buoy_radius)
            if clear_of(p, w.buoy_radius, placed):
                break
        else:
            raise ValueError("scenario sampling failed: bounds too tight for stage")
        buoys.append(Buoy(p, w.buoy_radius))
        placed.append((p, w.buoy_radius))

    return Scenario(starts=starts, goals=goals, buoys=buoys, bounds=bounds)


def scenario_to_dict(sc: Scenario) -> dict:
    return {
        "starts": [[p.x, p.y, p.yaw] for p in sc.starts],
        "goals": [list(g) for g in sc.goals],
        "buoys": [{"position": list(b.position), "radius": b.radius}
                  for b in sc.buoys],
        "bounds": list(sc.bounds),
    }


def scenario_from_dict(data: dict) -> Scenario:
    return Scenario(
        starts=[Pose2D(*row) for row in data["starts"]],
        goals=[tuple(g) for g in data["goals"]],
        buoys=[Buoy(tuple(b["position"]), b["radius"]) for b in data["buoys"]],
        bounds=tuple(data["bounds"]),
    )


def save_scenarios(path: str, scenarios: list[Scenario]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([scenario_to_dict(s) for s in scenarios], fh, indent=1)


def load_scenarios(path: str) -> list[Scenario]:
    with open(path, "r", encoding="utf-8") as fh:
        return [scenario_from_dict(d) for d in json.load(fh)]


@dataclass
class GroundTruthObject:
    """Exact state of one non-ego entity, for perception simulation."""

    position: tuple[float, float]
    velocity: tuple[float, float]   # world frame
    radius: float
    is_vehicle: bool


class World:
    """Simulation state for one episode."""

    def __init__(self, scenario: Scenario, cfg: Config):
        self.cfg = cfg
        self.scenario = scenario
        self.goals = list(scenario.goals)
        self.buoys = list(scenario.buoys)
        self.vessels: list[VesselState] = [
            VesselState(Pose2D(p.x, p.y, p.yaw), BodyVelocity(0.0, 0.0, 0.0),
                        ThrustPair(0.0, 0.0))
            for p in scenario.starts
        ]
        self.active = [True] * len(self.vessels)
        self.events: list[WorldEvent] = []
        self.terminal: list[WorldEvent | None] = [None] * len(self.vessels)
        self.time = 0.0
        # optional bounded-disturbance hook: f(vehicle_id, time) -> GeneralizedForce
        self.disturbance_fn = None

    @property
    def num_vehicles(self) -> int:
        return len(self.vessels)

    def done(self) -> bool:
        return not any(self.active)

    def step(self, actions: dict[int, tuple[float, float]]) -> list[WorldEvent]:
        """Advance all vehicles one control step; returns new terminal events.

        actions maps vehicle id to a thrust-rate pair.  Every active vehicle
        needs an action; actions addressed to frozen vehicles are ignored with
        a warning.
        """
        cfg = self.cfg
        for vid in actions:
            if not (0 <= vid < self.num_vehicles):
                raise KeyError(f"unknown vehicle id {vid}")
            if not self.active[vid]:
                warnings.warn(f"action for inactive vehicle {vid} ignored")
        for vid in range(self.num_vehicles):
            if self.active[vid] and vid not in actions:
                raise ValueError(f"missing action for active vehicle {vid}")

        # commit thrust commands first; thrust held constant over the substeps
        forces = {}
        for vid in range(self.num_vehicles):
            if not self.active[vid]:
                continue
            v = self.vessels[vid]
            v.thrusts = apply_thrust_delta(v.thrusts, actions[vid], cfg.sim.dt_control)
            forces[vid] = thrust_to_force(v.thrusts, cfg.vessel)

        new_events: list[WorldEvent] = []
        substeps = max(1, round(cfg.sim.dt_control / cfg.sim.dt_phys))
        hull = cfg.vessel.hull_radius
        for k in range(substeps):
            t_sub = self.time + (k + 1) * cfg.sim.dt_phys
            for vid in range(self.num_vehicles):
                if not self.active[vid]:
                    continue
                dist = (self.disturbance_fn(vid, self.time + k * cfg.sim.dt_phys)
                        if self.disturbance_fn else None)
                self.vessels[vid] = step_dynamics(
                    self.vessels[vid], forces[vid], cfg.sim.dt_phys,
                    cfg.vessel, disturbance=dist)
            # collisions settle before goal checks: a crash at the goal line fails
            collided = set()
            for vid in range(self.num_vehicles):
                if not self.active[vid]:
                    continue
                me = self.vessels[vid]
                for other in range(self.num_vehicles):
                    if other != vid and check_collision(me, self.vessels[other], hull):
                        collided.add(vid)
                        if self.active[other]:
                            collided.add(other)
                for b in self.buoys:
                    if check_collision(me, b, hull):
                        collided.add(vid)
            for vid in sorted(collided):
                if self.active[vid]:
                    new_events.append(self._freeze(vid, EventKind.COLLISION, t_sub))
            for vid in range(self.num_vehicles):
                if not self.active[vid]:
                    continue
                gx, gy = self.goals[vid]
                me = self.vessels[vid]
                if math.hypot(me.pose.x - gx, me.pose.y - gy) < cfg.world.goal_radius:
                    new_events.append(self._freeze(vid, EventKind.GOAL, t_sub))

        self.time += cfg.sim.dt_control
        if self.time >= cfg.world.timeout:
            for vid in range(self.num_vehicles):
                if self.active[vid]:
                    new_events.append(self._freeze(vid, EventKind.TIMEOUT, self.time))
        self.events.extend(new_events)
        return new_events

    def _freeze(self, vid: int, kind: EventKind, t: float) -> WorldEvent:
        ev = WorldEvent(kind, vid, t)
        self.active[vid] = False
        self.terminal[vid] = ev
        v = self.vessels[vid]
        v.vel = BodyVelocity(0.0, 0.0, 0.0)
        v.thrusts = ThrustPair(0.0, 0.0)
        return ev

    def ground_truth_objects(self, ego: int) -> list[GroundTruthObject]:
        """Every entity except the ego, with exact world-frame states."""
        cfg = self.cfg
        out = []
        for vid, v in enumerate(self.vessels):
            if vid == ego:
                continue
            vel = world_velocity(v)
            speed = speed_over_ground(v.vel)
            out.append(GroundTruthObject(
                position=(v.pose.x, v.pose.y), velocity=vel,
                radius=cfg.vessel.hull_radius,
                is_vehicle=speed >= cfg.perception.vehicle_speed_min))
        for b in self.buoys:
            out.append(GroundTruthObject(
                position=b.position, velocity=(0.0, 0.0),
                radius=b.radius, is_vehicle=False))
        return out
