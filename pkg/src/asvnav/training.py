"""Curriculum training loop with periodic evaluation and checkpointing.

One shared model acts for every vehicle; each vehicle's transition goes into
the same replay buffer.  Stages follow the configured schedule: an episode
starts at the stage its first step falls in.

Two fixed scenario banks are in play.  The validation bank drives the
learning curve and selects best.ckpt (the snapshot with the highest
validation success, reward as tiebreak).  The held-out bank is reserved for
reporting after training; the two banks share no layouts, so selecting on
one leaves the other unbiased.  Both are deterministic, shared across
agents and seeds.
"""

from __future__ import annotations

import json
import logging
import os

import numpy as np

from .agents import AgentBase, make_agent
from .colregs import reward
from .config import Config, config_hash, config_to_dict
from .episode import Perceiver, run_episode, true_observation
from .nn import DivergenceError
from .world import EventKind, World, generate_scenario, make_stage

log = logging.getLogger(__name__)

# seed salts for the two evaluation banks; independent of training seeds and
# of each other, so checkpoint selection never sees the reporting layouts
EVAL_SCENARIO_SALT = 90210
VALID_SCENARIO_SALT = 31415

METRICS_HEADER = "step,reward_mean,reward_stderr,success_rate,avg_travel_time"


def greedy_policy(agent: AgentBase):
    """act_fn adapter running the agent without exploration."""
    return lambda vid, obs: agent.act(obs, explore=False)


def held_out_scenarios(cfg: Config, stage_index: int, count: int,
                       salt: int = EVAL_SCENARIO_SALT):
    """Deterministic evaluation layouts, shared by every agent and seed."""
    stage = make_stage(cfg, stage_index)
    return [generate_scenario(stage, salt + 1000 * stage_index + i, cfg)
            for i in range(count)]


def evaluate(act_fn, cfg: Config, stage_index: int, episodes: int,
             salt: int = EVAL_SCENARIO_SALT) -> dict:
    """Run a fixed scenario bank and aggregate the learning-curve metrics.

    The default salt is the held-out reporting bank; train() passes the
    validation salt instead.  Episode reward is the mean cumulative shaped
    reward over vehicles; travel time averages only vehicles that reached
    their goals.
    """
    results = []
    for i, sc in enumerate(held_out_scenarios(cfg, stage_index, episodes,
                                              salt)):
        rng = np.random.default_rng([salt, stage_index, i])
        results.append(run_episode(sc, cfg, act_fn, rng))
    ep_rewards = np.array([np.mean(r.rewards) for r in results])
    times = [t for r in results for t in r.travel_times if t is not None]
    stderr = (float(ep_rewards.std(ddof=1) / np.sqrt(len(ep_rewards)))
              if len(ep_rewards) > 1 else 0.0)
    return {
        "reward_mean": float(ep_rewards.mean()),
        "reward_stderr": stderr,
        "success_rate": float(np.mean([r.success for r in results])),
        "avg_travel_time": float(np.mean(times)) if times else float("nan"),
        "episodes": episodes,
    }


def _metrics_row(step: int, row: dict) -> str:
    return (f"{step},{row['reward_mean']:.6f},{row['reward_stderr']:.6f},"
            f"{row['success_rate']:.6f},{row['avg_travel_time']:.6f}")


def train(kind: str, cfg: Config, seed: int, out_dir: str,
          total_steps: int | None = None) -> dict:
    """Train one agent; writes metrics.csv, checkpoints and summary.json.

    Every evaluation interval the current model is scored on the validation
    bank; the highest-scoring snapshot of the latest curriculum stage is
    kept as best.ckpt next to final.ckpt.  Raises DivergenceError after
    dumping a diagnostic checkpoint if a loss or gradient goes non-finite.
    """
    os.makedirs(out_dir, exist_ok=True)
    tcfg = cfg.train
    bounds = np.cumsum(tcfg.steps_per_stage)
    if total_steps is None:
        total_steps = int(bounds[-1])
    n_stages = len(cfg.world.stage_robots)

    agent = make_agent(kind, cfg, np.random.default_rng([seed, 0]))
    rng_scen = np.random.default_rng([seed, 1])
    rng_noise = np.random.default_rng([seed, 2])

    with open(os.path.join(out_dir, "manifest.json"), "w",
              encoding="utf-8") as fh:
        json.dump({"kind": kind, "seed": seed, "total_steps": total_steps,
                   "config_hash": config_hash(cfg),
                   "config": config_to_dict(cfg)}, fh, indent=1, sort_keys=True)

    metrics_path = os.path.join(out_dir, "metrics.csv")
    metrics = open(metrics_path, "w", encoding="utf-8")
    metrics.write(METRICS_HEADER + "\n")

    def stage_of(step: int) -> int:
        return min(int(np.searchsorted(bounds, step, side="right")) + 1,
                   n_stages)

    world = None
    perceiver = None
    clean: list = []
    arrs: list = []
    stage_idx = stage_of(0)
    episodes = 0
    recent_losses: list[float] = []
    step = 0
    best_path = os.path.join(out_dir, "best.ckpt")
    # (success, reward) of best.ckpt; reset when the curriculum advances so
    # the kept snapshot always belongs to the hardest stage reached
    best_key: tuple[float, float] | None = None
    best_stage = stage_idx
    best_step = 0
    best_eval: dict | None = None
    try:
        while step < total_steps:
            if world is None or world.done():
                stage_idx = stage_of(step)
                sc = generate_scenario(make_stage(cfg, stage_idx),
                                       int(rng_scen.integers(2 ** 31)), cfg)
                world = World(sc, cfg)
                perceiver = Perceiver(cfg, world.num_vehicles, rng_noise)
                clean = [true_observation(world, v, cfg)
                         for v in range(world.num_vehicles)]
                arrs = [perceiver.observe(world, v).arrays(agent.k_max)
                        for v in range(world.num_vehicles)]
                episodes += 1

            acting = [v for v in range(world.num_vehicles) if world.active[v]]
            acts = agent.act_arrays(np.stack([arrs[v][0] for v in acting]),
                                    np.stack([arrs[v][1] for v in acting]),
                                    np.stack([arrs[v][2] for v in acting]),
                                    explore=True)
            actions = {v: acts[i] for i, v in enumerate(acting)}
            events = world.step(actions)
            step += 1
            agent.env_steps = step

            for v in acting:
                new_clean = true_observation(world, v, cfg)
                mine = [ev for ev in events if ev.vehicle == v]
                rb = reward(clean[v], new_clean, mine, cfg.reward,
                            cfg.vessel.hull_radius,
                            cfg.perception.vehicle_speed_min)
                clean[v] = new_clean
                new_arr = perceiver.observe(world, v).arrays(agent.k_max)
                term = world.terminal[v]
                done = term is not None and term.kind in (EventKind.COLLISION,
                                                          EventKind.GOAL)
                e0, o0, m0 = arrs[v]
                e1, o1, m1 = new_arr
                agent.record(e0, o0, m0, actions[v], rb.total,
                             e1, o1, m1, done)
                arrs[v] = new_arr

            if step % cfg.agent.update_every == 0:
                out = agent.update()
                if out is not None:
                    recent_losses.append(out[0] if isinstance(out, tuple)
                                         else out)

            if step % tcfg.log_interval == 0:
                mean_loss = (float(np.mean(recent_losses))
                             if recent_losses else float("nan"))
                log.info("step %d stage %d episodes %d loss %.4f",
                         step, stage_idx, episodes, mean_loss)
                recent_losses.clear()

            if step % tcfg.eval_interval == 0 or step == total_steps:
                row = evaluate(greedy_policy(agent), cfg, stage_idx,
                               tcfg.eval_episodes, salt=VALID_SCENARIO_SALT)
                metrics.write(_metrics_row(step, row) + "\n")
                metrics.flush()
                log.info("eval at %d: success %.2f reward %.2f", step,
                         row["success_rate"], row["reward_mean"])
                if stage_idx != best_stage:
                    best_key = None
                    best_stage = stage_idx
                key = (row["success_rate"], row["reward_mean"])
                if best_key is None or key > best_key:
                    best_key = key
                    best_step = step
                    best_eval = row
                    agent.save(best_path)

            if step % tcfg.checkpoint_interval == 0:
                agent.save(os.path.join(out_dir, f"ckpt_{step:08d}.ckpt"))
    except DivergenceError:
        agent.save(os.path.join(out_dir, "diverged.ckpt"))
        metrics.close()
        raise
    metrics.close()

    final_path = os.path.join(out_dir, "final.ckpt")
    agent.save(final_path)
    final_eval = evaluate(greedy_policy(agent), cfg, stage_idx,
                          tcfg.eval_episodes, salt=VALID_SCENARIO_SALT)
    if best_eval is None:    # no eval interval fired; degenerate short run
        best_step, best_stage, best_eval = step, stage_idx, final_eval
        agent.save(best_path)
    summary = {
        "kind": kind,
        "seed": seed,
        "steps": step,
        "episodes": episodes,
        "last_stage": stage_idx,
        "final_eval": final_eval,
        "checkpoint": final_path,
        "best_checkpoint": best_path,
        "best_step": best_step,
        "best_stage": best_stage,
        "best_eval": best_eval,
        "metrics": metrics_path,
    }
    with open(os.path.join(out_dir, "summary.json"), "w",
              encoding="utf-8") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True)
    return summary
