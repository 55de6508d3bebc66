"""Encounter classification and rule-aware reward shaping.

Two-vessel geometry follows the navigation-rule conventions: angles measured
clockwise-positive (a starboard turn is a positive course change), so with the
world frame z-up every signed angle here is the negated CCW angle.  Only
head-on and crossing give-way situations are classified; overtaking is left to
the plain collision penalty.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

from .config import RewardConfig
from .perception import Observation, TrackedObject
from .world import EventKind, WorldEvent

Vec = tuple[float, float]


class EncounterClass(enum.Enum):
    HEAD_ON = "head_on"
    CROSSING_GIVE_WAY = "crossing_give_way"
    NONE = "none"


def angle_cw(a: Vec, b: Vec) -> float:
    """Clockwise-positive signed angle from vector a to vector b, in [-pi, pi)."""
    ccw = math.atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1])
    return -ccw


def _norm(v: Vec) -> float:
    return math.hypot(v[0], v[1])


def _unit(v: Vec) -> Vec:
    n = _norm(v)
    if n == 0.0:
        raise ValueError("zero vector has no direction")
    return (v[0] / n, v[1] / n)


def classify(ego_pos: Vec, ego_vel: Vec, rob_pos: Vec, rob_vel: Vec,
             cfg: RewardConfig) -> EncounterClass:
    """Classify the encounter of ego against one nearby vehicle (rob).

    Zones are anchored on rob: ego must sit inside rob's head-on sector
    (within the half-angle of rob's heading) or rob's port-forward crossing
    sector, at most the rule range away.  On top of the zone test the heading
    difference decides: head-on needs the velocities nearly opposed (clockwise
    angle magnitude beyond 3 pi / 4), crossing give-way needs the clockwise
    angle from rob's velocity to ego's inside [pi/4, 3 pi/4].
    """
    if _norm(ego_vel) == 0.0 or _norm(rob_vel) == 0.0:
        return EncounterClass.NONE
    rel = (ego_pos[0] - rob_pos[0], ego_pos[1] - rob_pos[1])
    dist = _norm(rel)
    if dist == 0.0 or dist > cfg.colregs_range:
        return EncounterClass.NONE

    bearing = angle_cw(rob_vel, rel)   # ego's bearing in rob's frame, starboard positive
    course = angle_cw(rob_vel, ego_vel)

    head_on_half = math.radians(cfg.head_on_half_angle_deg)
    crossing_limit = math.radians(cfg.crossing_limit_deg)
    if abs(bearing) <= head_on_half and abs(course) > 3.0 * math.pi / 4.0:
        return EncounterClass.HEAD_ON
    if (-crossing_limit < bearing < -head_on_half
            and math.pi / 4.0 <= course <= 3.0 * math.pi / 4.0):
        return EncounterClass.CROSSING_GIVE_WAY
    return EncounterClass.NONE


def compliant_velocity(ego_pos: Vec, rob_pos: Vec, rob_vel: Vec,
                       encounter: EncounterClass, d_clear: float) -> Vec:
    """Unit direction the rules ask ego to steer toward.

    Head-on: aim at a waypoint offset to rob's port side so the vessels pass
    port to port.  Crossing give-way: aim astern of rob, crossing behind the
    stand-on vessel.  d_clear sets the waypoint offset from rob's center.
    """
    if encounter is EncounterClass.NONE:
        raise ValueError("no compliant direction for a non-encounter")
    hdg = _unit(rob_vel)
    if encounter is EncounterClass.HEAD_ON:
        port = (-hdg[1], hdg[0])
        wp = (rob_pos[0] + d_clear * port[0], rob_pos[1] + d_clear * port[1])
    else:
        wp = (rob_pos[0] - d_clear * hdg[0], rob_pos[1] - d_clear * hdg[1])
    return _unit((wp[0] - ego_pos[0], wp[1] - ego_pos[1]))


def colregs_penalty(ego_vel: Vec, compliant: Vec, scale: float = 0.1) -> float:
    """Penalty for still pointing clockwise-short of the compliant course.

    delta is the clockwise angle from ego's velocity to the compliant
    direction; only positive delta (a starboard turn still owed) is penalized.
    """
    if _norm(ego_vel) == 0.0 or _norm(compliant) == 0.0:
        raise ValueError("velocity directions must be nonzero")
    delta = angle_cw(ego_vel, compliant)
    return -scale * max(delta, 0.0)


@dataclass
class RewardBreakdown:
    """Per-term reward decomposition; total is the exact sum."""

    step: float
    forward: float
    colregs: float
    collision: float
    goal: float

    @property
    def total(self) -> float:
        return self.step + self.forward + self.colregs + self.collision + self.goal


def nearest_vehicle(obs: Observation, cfg: RewardConfig) -> TrackedObject | None:
    """Closest perceived vehicle inside the rule range, if any."""
    best = None
    for ob in obs.objects:
        if not ob.is_vehicle or ob.distance() > cfg.colregs_range:
            continue
        if best is None or ob.distance() < best.distance():
            best = ob
    return best


def encounter_penalty(obs: Observation, cfg: RewardConfig, ego_radius: float,
                      min_speed: float = 0.5) -> float:
    """COLREGs shaping term for one vehicle's current observation.

    Works entirely in the ego frame: ego sits at the origin with its perceived
    velocity, the nearest perceived vehicle provides the other ship.  The
    compliant waypoint clears twice the summed radii, so it is collision-free
    by construction.  Zero when no qualifying encounter exists or ego is too
    slow to have a course.
    """
    ego_vel = obs.ego.velocity
    if _norm(ego_vel) < min_speed:
        return 0.0
    rob = nearest_vehicle(obs, cfg)
    if rob is None or rob.speed() < min_speed:
        return 0.0
    enc = classify((0.0, 0.0), ego_vel, rob.position, rob.velocity, cfg)
    if enc is EncounterClass.NONE:
        return 0.0
    d_clear = 2.0 * (ego_radius + rob.radius)
    direction = compliant_velocity((0.0, 0.0), rob.position, rob.velocity,
                                   enc, d_clear)
    return colregs_penalty(ego_vel, direction, cfg.colregs_scale)


def reward(prev_obs: Observation, new_obs: Observation,
           events: Iterable[WorldEvent], cfg: RewardConfig,
           ego_radius: float, min_speed: float = 0.5) -> RewardBreakdown:
    """Full shaped reward for one vehicle over one control step.

    events must already be filtered to this vehicle.  Forward progress is the
    drop in perceived goal distance between consecutive observations.
    """
    kinds = {ev.kind for ev in events}
    return RewardBreakdown(
        step=cfg.step_penalty,
        forward=prev_obs.goal_distance() - new_obs.goal_distance(),
        colregs=encounter_penalty(new_obs, cfg, ego_radius, min_speed),
        collision=cfg.collision_penalty if EventKind.COLLISION in kinds else 0.0,
        goal=cfg.goal_reward if EventKind.GOAL in kinds else 0.0,
    )
