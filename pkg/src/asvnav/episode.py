"""Episode execution: observation assembly and closed-loop rollouts.

Two observation paths exist.  The agent-facing one follows the configured
perception mode ("truth" adds the observation noise model to exact states;
"lidar" runs the scan/segment/track pipeline).  The reward always uses the
exact simulator state, so shaping terms are not corrupted by perception
noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .colregs import reward
from .config import Config
from .perception import (
    ClusterTracker,
    NoiseModel,
    Observation,
    build_observation,
    inject_noise,
    objects_to_ego,
    segment,
    simulate_scan,
)
from .world import EventKind, Scenario, World, WorldEvent


def true_observation(world: World, vid: int, cfg: Config) -> Observation:
    """Exact, noise-free observation; the reward side of the loop."""
    state = world.vessels[vid]
    tracked = objects_to_ego(world.ground_truth_objects(vid), state.pose)
    return build_observation(state, world.goals[vid], tracked)


class Perceiver:
    """Agent-facing observation factory for one episode."""

    def __init__(self, cfg: Config, num_vehicles: int,
                 rng: np.random.Generator, noisy: bool = True):
        pc = cfg.perception
        if pc.mode not in ("truth", "lidar"):
            raise ValueError(f"unknown perception mode {pc.mode!r}")
        self.cfg = cfg
        self.rng = rng
        self.noise = NoiseModel.from_config(pc) if (noisy and
                                                    pc.mode == "truth") else None
        self.trackers = ([ClusterTracker(pc.track_gate, pc.vehicle_speed_min)
                          for _ in range(num_vehicles)]
                         if pc.mode == "lidar" else None)

    def observe(self, world: World, vid: int) -> Observation:
        cfg = self.cfg
        pc = cfg.perception
        state = world.vessels[vid]
        if pc.mode == "truth":
            tracked = objects_to_ego(world.ground_truth_objects(vid),
                                     state.pose)
            if self.noise is not None:
                tracked = inject_noise(tracked, self.noise, self.rng,
                                       pc.vehicle_speed_min)
        else:
            scan = simulate_scan(world, vid, pc.num_beams, pc.range_noise_std,
                                 self.rng)
            clusters = segment(scan, np.deg2rad(pc.merge_angle_deg))
            tracked = self.trackers[vid].update(clusters, state.pose,
                                                cfg.sim.dt_control)
        return build_observation(state, world.goals[vid], tracked)


@dataclass
class EpisodeResult:
    """Outcome of one closed-loop episode."""

    terminal: list[WorldEvent | None]
    rewards: list[float]                  # cumulative shaped reward, per vehicle
    travel_times: list[float | None]      # goal time for vehicles that arrived
    steps: int
    # per vehicle, rows (t, x, y, yaw, u, v, r, T_left, T_right) per control step
    trajectories: list[np.ndarray] = field(default_factory=list)

    @property
    def success(self) -> bool:
        """All vehicles at their goals, nobody collided or timed out."""
        return all(ev is not None and ev.kind == EventKind.GOAL
                   for ev in self.terminal)

    @property
    def collided(self) -> bool:
        return any(ev is not None and ev.kind == EventKind.COLLISION
                   for ev in self.terminal)


def run_episode(scenario: Scenario, cfg: Config, act_fn,
                rng: np.random.Generator, noisy: bool = True,
                record: bool = False) -> EpisodeResult:
    """Roll one episode to completion under act_fn(vid, obs) -> thrust rates."""
    world = World(scenario, cfg)
    n = world.num_vehicles
    perceiver = Perceiver(cfg, n, rng, noisy=noisy)
    totals = [0.0] * n
    clean = {v: true_observation(world, v, cfg) for v in range(n)}
    observed = {v: perceiver.observe(world, v) for v in range(n)}

    def pose_record(v):
        # trajectory log row: t, x, y, yaw, u, v, r, T_left, T_right
        s = world.vessels[v]
        return (world.time, s.pose.x, s.pose.y, s.pose.yaw,
                s.vel.u, s.vel.v, s.vel.r, s.thrusts.left, s.thrusts.right)

    paths = [[pose_record(v)] for v in range(n)]

    steps = 0
    while not world.done():
        acting = [v for v in range(n) if world.active[v]]
        actions = {v: act_fn(v, observed[v]) for v in acting}
        events = world.step(actions)
        steps += 1
        for v in acting:
            new_clean = true_observation(world, v, cfg)
            mine = [ev for ev in events if ev.vehicle == v]
            rb = reward(clean[v], new_clean, mine, cfg.reward,
                        cfg.vessel.hull_radius, cfg.perception.vehicle_speed_min)
            totals[v] += rb.total
            clean[v] = new_clean
            if world.active[v]:
                observed[v] = perceiver.observe(world, v)
        if record:
            for v in range(n):
                paths[v].append(pose_record(v))

    travel = [ev.time if ev is not None and ev.kind == EventKind.GOAL else None
              for ev in world.terminal]
    return EpisodeResult(
        terminal=list(world.terminal),
        rewards=totals,
        travel_times=travel,
        steps=steps,
        trajectories=[np.array(p) for p in paths] if record else [],
    )
