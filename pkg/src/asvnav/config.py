"""Layered run configuration.

Precedence: built-in defaults < YAML file < explicit overrides (dotted keys,
e.g. ``agent.lr=3e-4``).  Everything tunable lives here so experiment manifests
can hash one structure.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Any

import yaml

from .dynamics import VesselParams

OUTPUT_ROOT_ENV = "ASVNAV_OUTPUT_ROOT"


@dataclass
class SimConfig:
    """Integration and control timing."""

    dt_phys: float = 0.05      # s, physics substep
    dt_control: float = 0.5    # s, agent decision period (10 substeps)


@dataclass
class WorldConfig:
    """Scenario sampling and episode rules for the six curriculum stages."""

    stage_robots: list[int] = field(default_factory=lambda: [3, 4, 5, 5, 5, 5])
    stage_buoys: list[int] = field(default_factory=lambda: [0, 0, 0, 2, 3, 4])
    stage_min_start_goal: list[float] = field(
        default_factory=lambda: [30.0, 35.0, 40.0, 40.0, 40.0, 40.0])
    stage_side: list[float] = field(
        default_factory=lambda: [60.0, 70.0, 80.0, 80.0, 85.0, 90.0])
    goal_radius: float = 2.0       # m, goal reached when centre closer than this
    buoy_radius: float = 1.0       # m
    timeout: float = 90.0          # s
    clearance: float = 3.0         # m extra spacing when sampling layouts
    max_sample_tries: int = 10000


@dataclass
class PerceptionConfig:
    """Range scanner, clustering, tracking and observation-noise settings."""

    mode: str = "truth"        # "truth": exact states + noise model; "lidar": full pipeline
    num_beams: int = 360
    max_range: float = 20.0    # m, returns beyond this are discarded
    range_noise_std: float = 0.01   # m, additive Gaussian on each return
    merge_angle_deg: float = 10.0   # split/merge threshold for adjacent returns
    track_gate: float = 3.0         # m, max centroid jump for association
    vehicle_speed_min: float = 0.5  # m/s, tracked cluster counts as a vehicle above this
    max_objects: int = 5            # observation slots for nearby objects
    # corruption applied in "truth" mode (and to evaluation metrics sampling)
    pos_noise_std: float = 0.5      # m, per axis
    vel_noise_std: float = 0.3      # m/s, per axis
    radius_vis_mean: float = 0.8    # mean fraction of true radius observed
    radius_vis_kappa: float = 4.0   # von Mises concentration for the visibility draw


@dataclass
class RewardConfig:
    """Step reward shaping constants."""

    step_penalty: float = -0.1
    collision_penalty: float = -5.0
    goal_reward: float = 10.0
    colregs_scale: float = 0.1     # penalty per radian of compliant-course deviation
    colregs_range: float = 15.0    # m, encounter rules apply inside this range
    head_on_half_angle_deg: float = 22.5   # half-width of the head-on sector
    # crossing sector spans from the head-on edge to abeam-aft on the port side
    crossing_limit_deg: float = 135.0


@dataclass
class AgentConfig:
    """Network sizes and optimization hyperparameters shared by the RL agents."""

    ego_hidden: int = 64
    object_hidden: int = 64
    trunk_hidden: list[int] = field(default_factory=lambda: [128, 128])
    quantile_embed_dim: int = 64
    lr: float = 1e-4
    gamma: float = 0.99
    batch_size: int = 64
    buffer_capacity: int = 100000
    warmup_steps: int = 1000
    update_every: int = 1
    soft_update_beta: float = 0.005
    soft_update_period: int = 1
    num_quantiles: int = 8          # N, online samples
    num_target_quantiles: int = 8   # N', target samples
    num_action_quantiles: int = 32  # K, samples behind greedy action / actor objective
    huber_kappa: float = 1.0
    # exploration schedules, annealed linearly over anneal_steps
    sigma_start: float = 0.3        # Gaussian std on tanh output, scaled by rate limit
    sigma_end: float = 0.05
    eps_start: float = 1.0
    eps_end: float = 0.05
    anneal_steps: int = 50000
    actor_final_init: float = 1e-3  # uniform init half-width of the actor output layer
    # observation feature scaling
    pos_scale: float = 0.05
    vel_scale: float = 0.3
    thrust_scale: float = 0.001


@dataclass
class TrainConfig:
    """Curriculum training loop settings."""

    steps_per_stage: list[int] = field(
        default_factory=lambda: [100000, 100000, 100000, 100000, 100000, 100000])
    eval_interval: int = 5000
    eval_episodes: int = 40
    log_interval: int = 1000
    checkpoint_interval: int = 25000


@dataclass
class ApfConfig:
    """Artificial potential field planner gains."""

    k_att: float = 50.0
    k_rep: float = 500.0
    d0: float = 15.0               # m, repulsion cutoff distance
    virtual_offset_margin: float = 2.0  # m beyond the obstacle radius for rule ghosts


@dataclass
class MpcConfig:
    """Sampling-based receding-horizon planner weights."""

    horizon: int = 5               # control steps
    collision_weight: float = 50.0
    rule_weight: float = 1.0
    rule_cost: float = 10.0        # per predicted rule violation
    transition_cost: float = 2.0   # per encounter-class flip along the rollout
    thrust_effort_weight: float = 0.1
    progress_weight: float = 0.05
    safety_margin: float = 1.0     # m added to summed radii


@dataclass
class HarnessConfig:
    """Evaluation experiment grid."""

    set_robots: list[int] = field(default_factory=lambda: [3, 4, 5, 5, 5, 5])
    set_buoys: list[int] = field(default_factory=lambda: [0, 0, 0, 2, 3, 4])
    episodes_per_set: int = 100
    seed_base: int = 7000


@dataclass
class Config:
    """Top-level bundle; one instance describes a full run."""

    vessel: VesselParams = field(default_factory=lambda: DEFAULT_VESSEL)
    sim: SimConfig = field(default_factory=SimConfig)
    world: WorldConfig = field(default_factory=WorldConfig)
    perception: PerceptionConfig = field(default_factory=PerceptionConfig)
    reward: RewardConfig = field(default_factory=RewardConfig)
    agent: AgentConfig = field(default_factory=AgentConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    apf: ApfConfig = field(default_factory=ApfConfig)
    mpc: MpcConfig = field(default_factory=MpcConfig)
    harness: HarnessConfig = field(default_factory=HarnessConfig)


# Drag calibrated so full symmetric thrust (2x1000 N) settles at 3.3 m/s and
# full reverse (2x-500 N) at -2.3 m/s: solve du*u + du2*u^2 = |X| at both
# operating points.  The remaining numbers are plausible small-catamaran values.
DEFAULT_VESSEL = VesselParams(
    mass=180.0,
    inertia_z=120.0,
    added_mass_xu=20.0,
    added_mass_yv=90.0,
    added_mass_nr=30.0,
    damping_u=40.84,
    damping_u2=171.28,
    damping_v=300.0,
    damping_v2=400.0,
    damping_r=800.0,
    damping_r2=800.0,
    thruster_offset=1.0,
    hull_radius=2.0,
)


def _to_dict(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _to_dict(getattr(obj, f.name))
                for f in dataclasses.fields(obj)}
    if isinstance(obj, list):
        return [_to_dict(v) for v in obj]
    return obj


def config_to_dict(cfg: Config) -> dict:
    """Plain nested-dict view of a config (for hashing and manifests)."""
    return _to_dict(cfg)


def _apply_mapping(obj: Any, data: dict, path: str) -> None:
    names = {f.name: f for f in dataclasses.fields(obj)}
    for key, value in data.items():
        if key not in names:
            raise KeyError(f"unknown config key: {path}{key}")
        cur = getattr(obj, key)
        if dataclasses.is_dataclass(cur) and not isinstance(cur, type):
            if not isinstance(value, dict):
                raise TypeError(f"config section {path}{key} must be a mapping")
            _apply_mapping(cur, value, f"{path}{key}.")
        else:
            setattr(obj, key, _retype(cur, value, f"{path}{key}"))


def _retype(cur: Any, value: Any, where: str) -> Any:
    # YAML 1.1 reads bare "1e80" as a string; rescue numeric fields.
    if isinstance(cur, bool) or not isinstance(cur, (int, float)) \
            or not isinstance(value, str):
        return value
    try:
        return int(value) if isinstance(cur, int) else float(value)
    except ValueError:
        raise TypeError(f"config key {where} expects a number, "
                        f"got {value!r}") from None


def _coerce(text: str) -> Any:
    """Parse a CLI override value with YAML scalar rules."""
    return yaml.safe_load(text)


def apply_overrides(cfg: Config, overrides: list[str]) -> None:
    """Apply ``section.key=value`` strings in order."""
    for item in overrides:
        if "=" not in item:
            raise KeyError(f"override must look like section.key=value: {item!r}")
        dotted, _, raw = item.partition("=")
        parts = dotted.strip().split(".")
        node: Any = cfg
        for p in parts[:-1]:
            if not hasattr(node, p):
                raise KeyError(f"unknown config key: {dotted}")
            node = getattr(node, p)
        leaf = parts[-1]
        if not (dataclasses.is_dataclass(node) and
                any(f.name == leaf for f in dataclasses.fields(node))):
            raise KeyError(f"unknown config key: {dotted}")
        _apply_mapping(node, {leaf: _coerce(raw)}, ".".join(parts[:-1]) + ".")


def load_config(path: str | None = None,
                overrides: list[str] | None = None) -> Config:
    """Build a Config from defaults, an optional YAML file and overrides."""
    cfg = Config()
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, dict):
            raise TypeError(f"config file {path} must contain a mapping")
        _apply_mapping(cfg, data, "")
    if overrides:
        apply_overrides(cfg, overrides)
    return cfg


def config_hash(cfg: Config) -> str:
    """Stable short hash of the full configuration."""
    blob = json.dumps(config_to_dict(cfg), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def output_root() -> str:
    """Directory experiment artifacts go under; overridable by environment."""
    return os.environ.get(OUTPUT_ROOT_ENV, "runs")
