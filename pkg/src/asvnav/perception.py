"""Planar range-scan perception and observation assembly.

Pipeline mirrored from the onboard stack: simulate a single-ring scan against
the circular hulls, flood-fill the returns into clusters, track clusters across
frames with odometry compensation, and pack the result into the fixed-width
ego-frame observation the policies consume.  A cheaper "truth" mode skips the
scan and corrupts exact object states with the same noise statistics instead.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .dynamics import Pose2D, ThrustPair, VesselState
from .world import GroundTruthObject, World


@dataclass
class Scan:
    """One revolution of range returns in the ego frame.

    Beam i points along angle i * (2 pi / n) from the bow; np.inf marks
    no-return.  max_range returns are already discarded by the simulator.
    """

    ranges: np.ndarray
    max_range: float
    timestamp: float = 0.0

    @property
    def num_beams(self) -> int:
        return len(self.ranges)

    @property
    def angular_resolution(self) -> float:
        return 2.0 * math.pi / len(self.ranges)


@dataclass
class Cluster:
    """Connected group of scan returns."""

    members: list[int]              # beam indices
    centroid: tuple[float, float]   # ego frame, m
    radius: float                   # max member distance to centroid, m


@dataclass
class TrackedObject:
    """One perceived object in the current ego frame.

    velocity is the object's over-ground velocity expressed in ego axes
    (ego motion compensated away), so a static object reads near zero even
    from a moving vehicle.
    """

    position: tuple[float, float]
    velocity: tuple[float, float]
    radius: float
    is_vehicle: bool

    def distance(self) -> float:
        return math.hypot(self.position[0], self.position[1])

    def speed(self) -> float:
        return math.hypot(self.velocity[0], self.velocity[1])


@dataclass
class EgoState:
    """Ego part of the observation: goal vector, velocity, yaw rate, thrusts."""

    goal: tuple[float, float]       # ego frame, m
    velocity: tuple[float, float]   # body frame (surge, sway), m/s
    yaw_rate: float                 # rad/s
    thrusts: ThrustPair


@dataclass
class Observation:
    """Everything one vehicle senses at a control step."""

    ego: EgoState
    objects: list[TrackedObject] = field(default_factory=list)

    def goal_distance(self) -> float:
        return math.hypot(self.ego.goal[0], self.ego.goal[1])

    def arrays(self, k_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Network-ready views: ego 7-vector, (k_max, 5) object rows, validity mask.

        Objects are kept nearest-first and truncated to k_max; missing slots are
        zero rows with mask 0.
        """
        e = self.ego
        ego_vec = np.array([e.goal[0], e.goal[1], e.velocity[0], e.velocity[1],
                            e.yaw_rate, e.thrusts.left, e.thrusts.right])
        rows = np.zeros((k_max, 5))
        mask = np.zeros(k_max)
        for i, ob in enumerate(self.objects[:k_max]):
            rows[i] = (ob.position[0], ob.position[1],
                       ob.velocity[0], ob.velocity[1], ob.radius)
            mask[i] = 1.0
        return ego_vec, rows, mask


@dataclass
class NoiseModel:
    """Perception corruption: Gaussian position/velocity, von Mises radius.

    Position and velocity noise are isotropic (covariance std^2 * I).  The
    perceived radius is R * (r_mean + (1 - r_mean) * w / pi) with w drawn von
    Mises(0, kappa) on [-pi, pi], so it never exceeds the true radius and
    averages R * r_mean.  r_mean below 0.5 would allow negative draws; defaults
    keep it well above.
    """

    pos_std: float
    vel_std: float
    radius_mean: float
    kappa: float

    @classmethod
    def from_config(cls, pc) -> "NoiseModel":
        return cls(pos_std=pc.pos_noise_std, vel_std=pc.vel_noise_std,
                   radius_mean=pc.radius_vis_mean, kappa=pc.radius_vis_kappa)


def simulate_scan(world: World, ego: int, num_beams: int,
                  noise_std: float, rng: np.random.Generator,
                  max_range: float | None = None) -> Scan:
    """Ray-cast a scan from the ego vehicle against all other hulls and buoys.

    Nearest hit per beam, Gaussian range noise added, measurements beyond
    max_range dropped as no-return.
    """
    cfg = world.cfg
    if max_range is None:
        max_range = cfg.perception.max_range
    pose = world.vessels[ego].pose
    angles = pose.yaw + np.arange(num_beams) * (2.0 * math.pi / num_beams)
    dx = np.cos(angles)
    dy = np.sin(angles)
    best = np.full(num_beams, np.inf)

    circles = []
    for vid, v in enumerate(world.vessels):
        if vid != ego:
            circles.append((v.pose.x, v.pose.y, cfg.vessel.hull_radius))
    for b in world.buoys:
        circles.append((b.position[0], b.position[1], b.radius))

    for cx, cy, r in circles:
        ox = cx - pose.x
        oy = cy - pose.y
        proj = dx * ox + dy * oy
        disc = proj * proj - (ox * ox + oy * oy - r * r)
        hit = disc >= 0.0
        if not hit.any():
            continue
        s = np.sqrt(np.maximum(disc, 0.0))
        near = proj - s
        far = proj + s
        t = np.where(near >= 0.0, near, np.where(far >= 0.0, far, np.inf))
        t = np.where(hit, t, np.inf)
        best = np.minimum(best, t)

    measured = best + rng.normal(0.0, noise_std, size=num_beams)
    measured = np.where(np.isfinite(best) & (measured > 0.0)
                        & (measured <= max_range), measured, np.inf)
    return Scan(ranges=measured, max_range=max_range, timestamp=world.time)


def merge_angle(d1: float, d2: float, alpha: float) -> float:
    """Separation angle between two adjacent returns; large means same surface.

    d1 is the larger range, d2 the smaller.  The denominator is positive for
    any d1 >= d2 > 0 and alpha in (0, pi), so the angle is always defined.
    """
    return math.atan2(d2 * math.sin(alpha), d1 - d2 * math.cos(alpha))


def _adjacent(scan: Scan, i: int, k: int, theta: float) -> bool:
    d1 = max(scan.ranges[i], scan.ranges[k])
    d2 = min(scan.ranges[i], scan.ranges[k])
    return merge_angle(d1, d2, scan.angular_resolution) > theta


def scan_points(scan: Scan) -> np.ndarray:
    """Cartesian ego-frame coordinates of all beams (inf rows for no-return)."""
    angles = np.arange(scan.num_beams) * scan.angular_resolution
    safe = np.where(np.isfinite(scan.ranges), scan.ranges, 0.0)
    pts = np.stack([safe * np.cos(angles), safe * np.sin(angles)], axis=1)
    pts[~np.isfinite(scan.ranges)] = np.inf
    return pts


def segment(scan: Scan, theta: float) -> list[Cluster]:
    """Flood-fill the scan into clusters of adjacent compatible returns.

    Neighboring beams (circularly adjacent, both with returns) belong to the
    same cluster iff their separation angle exceeds theta.  Every return ends
    up in exactly one cluster.
    """
    n = scan.num_beams
    valid = np.isfinite(scan.ranges)
    pts = scan_points(scan)
    visited = np.zeros(n, dtype=bool)
    clusters: list[Cluster] = []
    for start in range(n):
        if not valid[start] or visited[start]:
            continue
        visited[start] = True
        members = []
        queue = deque([start])
        while queue:
            k = queue.popleft()
            members.append(k)
            for p in ((k - 1) % n, (k + 1) % n):
                if p == k or not valid[p] or visited[p]:
                    continue
                if _adjacent(scan, k, p, theta):
                    visited[p] = True
                    queue.append(p)
        mem_pts = pts[members]
        centroid = mem_pts.mean(axis=0)
        radius = float(np.sqrt(((mem_pts - centroid) ** 2).sum(axis=1)).max())
        members.sort()
        clusters.append(Cluster(members=members,
                                centroid=(float(centroid[0]), float(centroid[1])),
                                radius=radius))
    return clusters


def _to_world(pose: Pose2D, p: tuple[float, float]) -> tuple[float, float]:
    c, s = math.cos(pose.yaw), math.sin(pose.yaw)
    return (pose.x + c * p[0] - s * p[1], pose.y + s * p[0] + c * p[1])


def _to_ego(pose: Pose2D, p: tuple[float, float]) -> tuple[float, float]:
    c, s = math.cos(pose.yaw), math.sin(pose.yaw)
    qx, qy = p[0] - pose.x, p[1] - pose.y
    return (c * qx + s * qy, -s * qx + c * qy)


def _rot_to_ego(pose: Pose2D, v: tuple[float, float]) -> tuple[float, float]:
    c, s = math.cos(pose.yaw), math.sin(pose.yaw)
    return (c * v[0] + s * v[1], -s * v[0] + c * v[1])


def track(prev_clusters: list[Cluster], prev_pose: Pose2D,
          clusters: list[Cluster], pose: Pose2D, dt: float,
          gate: float, vehicle_speed_min: float) -> list[TrackedObject]:
    """Associate clusters across frames and estimate their velocities.

    Previous centroids are projected into the current ego frame through the
    odometry poses, matched greedily by nearest distance within the gate, and
    velocities read off the residual displacement.  Unmatched clusters get zero
    velocity.  The speed threshold sets the is_vehicle flag.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    projected = [_to_ego(pose, _to_world(prev_pose, c.centroid))
                 for c in prev_clusters]
    pairs = []
    for i, c in enumerate(clusters):
        for j, q in enumerate(projected):
            d = math.hypot(c.centroid[0] - q[0], c.centroid[1] - q[1])
            if d <= gate:
                pairs.append((d, i, j))
    pairs.sort()
    match: dict[int, int] = {}
    used = set()
    for d, i, j in pairs:
        if i in match or j in used:
            continue
        match[i] = j
        used.add(j)

    out = []
    for i, c in enumerate(clusters):
        if i in match:
            q = projected[match[i]]
            vel = ((c.centroid[0] - q[0]) / dt, (c.centroid[1] - q[1]) / dt)
        else:
            vel = (0.0, 0.0)
        speed = math.hypot(vel[0], vel[1])
        out.append(TrackedObject(position=c.centroid, velocity=vel,
                                 radius=c.radius,
                                 is_vehicle=speed >= vehicle_speed_min))
    return out


class ClusterTracker:
    """Per-vehicle frame-to-frame tracking state."""

    def __init__(self, gate: float, vehicle_speed_min: float):
        self.gate = gate
        self.vehicle_speed_min = vehicle_speed_min
        self.prev_clusters: list[Cluster] = []
        self.prev_pose: Pose2D | None = None

    def update(self, clusters: list[Cluster], pose: Pose2D,
               dt: float) -> list[TrackedObject]:
        if self.prev_pose is None:
            objs = [TrackedObject(c.centroid, (0.0, 0.0), c.radius, False)
                    for c in clusters]
        else:
            objs = track(self.prev_clusters, self.prev_pose, clusters, pose,
                         dt, self.gate, self.vehicle_speed_min)
        self.prev_clusters = clusters
        self.prev_pose = Pose2D(pose.x, pose.y, pose.yaw)
        return objs


def objects_to_ego(objects: list[GroundTruthObject],
                   pose: Pose2D) -> list[TrackedObject]:
    """Express exact world-frame object states in the ego frame."""
    out = []
    for ob in objects:
        out.append(TrackedObject(
            position=_to_ego(pose, ob.position),
            velocity=_rot_to_ego(pose, ob.velocity),
            radius=ob.radius,
            is_vehicle=ob.is_vehicle))
    return out


def inject_noise(objects: list[TrackedObject], model: NoiseModel,
                 rng: np.random.Generator,
                 vehicle_speed_min: float = 0.5) -> list[TrackedObject]:
    """Corrupt exact object states with the perception noise statistics.

    The vehicle flag is re-derived from the noisy speed, matching how the real
    pipeline classifies from estimates.
    """
    out = []
    for ob in objects:
        px = ob.position[0] + rng.normal(0.0, model.pos_std)
        py = ob.position[1] + rng.normal(0.0, model.pos_std)
        vx = ob.velocity[0] + rng.normal(0.0, model.vel_std)
        vy = ob.velocity[1] + rng.normal(0.0, model.vel_std)
        w = rng.vonmises(0.0, model.kappa)
        r = ob.radius * (model.radius_mean
                         + (1.0 - model.radius_mean) * w / math.pi)
        speed = math.hypot(vx, vy)
        out.append(TrackedObject(position=(px, py), velocity=(vx, vy),
                                 radius=r,
                                 is_vehicle=speed >= vehicle_speed_min))
    return out


def build_observation(state: VesselState, goal: tuple[float, float],
                      objects: list[TrackedObject]) -> Observation:
    """Assemble the ego-frame observation; objects sorted nearest first."""
    ego = EgoState(
        goal=_to_ego(state.pose, goal),
        velocity=(state.vel.u, state.vel.v),
        yaw_rate=state.vel.r,
        thrusts=ThrustPair(state.thrusts.left, state.thrusts.right),
    )
    ordered = sorted(objects, key=lambda ob: ob.distance())
    return Observation(ego=ego, objects=ordered)
