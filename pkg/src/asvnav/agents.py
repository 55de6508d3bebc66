"""Decision and control agents built on the quantile and value networks.

The update rules live in module-level functions so the math stays
inspectable and testable on its own; agent classes own the networks,
optimizer state, replay buffer and exploration schedule, and defer to them.
Loss math is factored into pure array functions (quantile_huber,
quantile_loss_and_grad, td_loss_and_grad, bootstrap_targets) that the update
functions share.
"""

from __future__ import annotations

import numpy as np

from .config import Config
from .dynamics import THRUST_RATE_LIMIT
from .networks import Actor, QuantileCritic, ValueNet
from .nn import (
    Adam,
    DivergenceError,
    hard_update,
    load_checkpoint,
    load_params,
    params_dict,
    save_checkpoint,
    soft_update,
    zero_grads,
)
from .perception import Observation
from .replay import Batch, ReplayBuffer

EGO_DIM = 7
OBJ_DIM = 5

# per-propeller thrust-rate levels for the discrete agents, N/s
ACTION_LEVELS = (-1000.0, -500.0, 0.0, 500.0, 1000.0)


# ---------------------------------------------------------------------------
# loss primitives
# ---------------------------------------------------------------------------

def quantile_huber(u, tau, kappa: float = 1.0):
    """Asymmetric Huber: |tau - 1{u<0}| * L_kappa(u) / kappa, elementwise."""
    u = np.asarray(u, float)
    tau = np.asarray(tau, float)
    au = np.abs(u)
    big_l = np.where(au <= kappa, 0.5 * u * u, kappa * (au - 0.5 * kappa))
    out = np.abs(tau - (u < 0)) * big_l / kappa
    return out if out.shape else float(out)


def quantile_huber_grad(u, tau, kappa: float = 1.0):
    """d/du of quantile_huber; L' = clip(u, +-kappa) is continuous."""
    u = np.asarray(u, float)
    tau = np.asarray(tau, float)
    out = np.abs(tau - (u < 0)) * np.clip(u, -kappa, kappa) / kappa
    return out if out.shape else float(out)


def quantile_loss_and_grad(z: np.ndarray, y: np.ndarray, taus: np.ndarray,
                           kappa: float) -> tuple[float, np.ndarray]:
    """Pairwise quantile-regression loss over a batch and its gradient in z.

    z is (M, N): current quantile values at the sampled taus.  y is (M, N'):
    bootstrap targets.  Per sample the loss is (1/N') sum_i sum_j
    rho_{tau_i}(y_j - z_i); the return value averages over the batch.
    """
    m = z.shape[0]
    n_prime = y.shape[1]
    delta = y[:, None, :] - z[:, :, None]                  # (M, N, N')
    t3 = taus[:, :, None]
    per_sample = quantile_huber(delta, t3, kappa).sum(axis=(1, 2)) / n_prime
    dz = -quantile_huber_grad(delta, t3, kappa).sum(axis=2) / (n_prime * m)
    return float(per_sample.mean()), dz


def bootstrap_targets(reward: np.ndarray, done: np.ndarray,
                      z_next: np.ndarray, gamma: float) -> np.ndarray:
    """r + gamma * z_next on continuing rows; terminal rows are exactly r."""
    r = np.broadcast_to(np.asarray(reward, float)[:, None], z_next.shape)
    cont = np.asarray(done, float)[:, None] == 0.0
    return np.where(cont, r + gamma * z_next, r)


def td_loss_and_grad(q: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean squared TD error and its gradient in q."""
    td = q - y
    return float((td * td).mean()), 2.0 * td / q.shape[0]


# ---------------------------------------------------------------------------
# discrete action grid
# ---------------------------------------------------------------------------

class DiscreteActionTable:
    """Bijection between joint action indices and thrust-rate pairs."""

    def __init__(self, levels=ACTION_LEVELS):
        self.levels = tuple(float(v) for v in levels)
        self.pairs = np.array([(lo, hi) for lo in self.levels
                               for hi in self.levels])
        self.n = len(self.levels) ** 2

    def pair(self, index: int) -> tuple[float, float]:
        lo, hi = self.pairs[int(index)]
        return float(lo), float(hi)

    def index(self, pair) -> int:
        try:
            i = self.levels.index(float(pair[0]))
            j = self.levels.index(float(pair[1]))
        except ValueError:
            raise ValueError(f"pair {tuple(pair)} is not on the action grid")
        return i * len(self.levels) + j


def midpoint_taus(batch: int, count: int) -> np.ndarray:
    """Deterministic stratified quantile grid used for greedy evaluation."""
    grid = (np.arange(count) + 0.5) / count
    return np.broadcast_to(grid, (batch, count)).copy()


def iqn_policy(critic, ego, objs, mask, n_samples: int,
               rng: np.random.Generator, taus: np.ndarray | None = None):
    """Greedy action under the tau-averaged quantile values.

    Returns an int for a single observation, an index array for a batch.
    Ties resolve to the lowest index through argmax.
    """
    b = np.asarray(ego).shape[0]
    if taus is None:
        taus = rng.uniform(0.0, 1.0, size=(b, n_samples))
    q = critic.forward(ego, objs, mask, taus).mean(axis=1)
    idx = np.argmax(q, axis=1)
    return int(idx[0]) if b == 1 else idx


def scale_features(ego: np.ndarray, objs: np.ndarray,
                   acfg) -> tuple[np.ndarray, np.ndarray]:
    """Bring raw observation magnitudes to O(1) network inputs."""
    ego = np.array(ego, dtype=float)
    objs = np.array(objs, dtype=float)
    ego[..., 0:2] *= acfg.pos_scale
    ego[..., 2:4] *= acfg.vel_scale
    ego[..., 5:7] *= acfg.thrust_scale
    objs[..., 0:2] *= acfg.pos_scale
    objs[..., 2:4] *= acfg.vel_scale
    objs[..., 4] *= acfg.pos_scale
    return ego, objs


# ---------------------------------------------------------------------------
# update rules
# ---------------------------------------------------------------------------

def iqn_update(agent: "IQNAgent", batch: Batch, debug_out: dict | None = None
               ) -> float:
    """One quantile-regression step on the discrete distributional critic."""
    a = agent.acfg
    m = batch.reward.shape[0]
    ego, objs, mask = agent._prep(batch.ego, batch.objs, batch.mask)
    nego, nobjs, nmask = agent._prep(batch.next_ego, batch.next_objs,
                                     batch.next_mask)
    rng = agent.rng

    # greedy next action from the target net, then fresh taus for its value
    sel = rng.uniform(0.0, 1.0, size=(m, a.num_action_quantiles))
    next_idx = np.argmax(
        agent.target.forward(nego, nobjs, nmask, sel).mean(axis=1), axis=1)
    taus_next = rng.uniform(0.0, 1.0, size=(m, a.num_target_quantiles))
    z_next = agent.target.forward(nego, nobjs, nmask,
                                  taus_next)[np.arange(m), :, next_idx]
    y = bootstrap_targets(batch.reward, batch.done, z_next, a.gamma)

    taus = rng.uniform(0.0, 1.0, size=(m, a.num_quantiles))
    z_all = agent.critic.forward(ego, objs, mask, taus)
    idx = np.asarray(batch.action, dtype=int)
    z = z_all[np.arange(m), :, idx]
    loss, dz = quantile_loss_and_grad(z, y, taus, a.huber_kappa)
    if not np.isfinite(loss):
        raise DivergenceError("quantile loss is not finite")
    dout = np.zeros_like(z_all)
    dout[np.arange(m), :, idx] = dz
    agent.critic.backward(dout)
    agent.adam.step()
    agent._after_update([(agent.target, agent.critic)])
    if debug_out is not None:
        debug_out.update(z=z, y=y, taus=taus)
    return loss


def ac_iqn_update(agent: "ACIQNAgent", batch: Batch,
                  debug_out: dict | None = None) -> tuple[float, float]:
    """Critic quantile regression plus actor ascent through its action input."""
    a = agent.acfg
    m = batch.reward.shape[0]
    ego, objs, mask = agent._prep(batch.ego, batch.objs, batch.mask)
    nego, nobjs, nmask = agent._prep(batch.next_ego, batch.next_objs,
                                     batch.next_mask)
    rng = agent.rng
    ts = a.thrust_scale

    # critic step: target-policy action inside the distributional TD target
    a_next = agent.actor_target.forward(nego, nobjs, nmask) * ts
    taus_next = rng.uniform(0.0, 1.0, size=(m, a.num_target_quantiles))
    z_next = agent.critic_target.forward(nego, nobjs, nmask, taus_next,
                                         a_next)[:, :, 0]
    y = bootstrap_targets(batch.reward, batch.done, z_next, a.gamma)
    taus = rng.uniform(0.0, 1.0, size=(m, a.num_quantiles))
    z = agent.critic.forward(ego, objs, mask, taus,
                             np.asarray(batch.action) * ts)[:, :, 0]
    loss, dz = quantile_loss_and_grad(z, y, taus, a.huber_kappa)
    if not np.isfinite(loss):
        raise DivergenceError("quantile loss is not finite")
    agent.critic.backward(dz[:, :, None])
    agent.adam_critic.step()

    # actor step: raise the tau-averaged critic value at the policy action
    a_pi = agent.actor.forward(ego, objs, mask)
    taus_pi = rng.uniform(0.0, 1.0, size=(m, a.num_quantiles))
    z_pi = agent.critic.forward(ego, objs, mask, taus_pi, a_pi * ts)
    objective = float(z_pi.mean())
    daction = agent.critic.backward(np.full_like(z_pi, -1.0 / z_pi.size))
    zero_grads(agent.critic)       # discard critic grads from the actor pass
    agent.actor.backward(daction * ts)
    agent.adam_actor.step()

    agent._after_update([(agent.critic_target, agent.critic),
                         (agent.actor_target, agent.actor)])
    if debug_out is not None:
        debug_out.update(z=z, y=y, taus=taus)
    return loss, objective


def ddpg_update(agent: "DDPGAgent", batch: Batch,
                debug_out: dict | None = None) -> tuple[float, float]:
    """Expected-value analogue of ac_iqn_update."""
    a = agent.acfg
    ego, objs, mask = agent._prep(batch.ego, batch.objs, batch.mask)
    nego, nobjs, nmask = agent._prep(batch.next_ego, batch.next_objs,
                                     batch.next_mask)
    ts = a.thrust_scale

    a_next = agent.actor_target.forward(nego, nobjs, nmask) * ts
    q_next = agent.critic_target.forward(nego, nobjs, nmask, a_next)[:, 0]
    y = bootstrap_targets(batch.reward, batch.done, q_next[:, None],
                          a.gamma)[:, 0]
    q = agent.critic.forward(ego, objs, mask,
                             np.asarray(batch.action) * ts)[:, 0]
    loss, dq = td_loss_and_grad(q, y)
    if not np.isfinite(loss):
        raise DivergenceError("TD loss is not finite")
    agent.critic.backward(dq[:, None])
    agent.adam_critic.step()

    a_pi = agent.actor.forward(ego, objs, mask)
    q_pi = agent.critic.forward(ego, objs, mask, a_pi * ts)
    objective = float(q_pi.mean())
    daction = agent.critic.backward(np.full_like(q_pi, -1.0 / q_pi.size))
    zero_grads(agent.critic)
    agent.actor.backward(daction * ts)
    agent.adam_actor.step()

    agent._after_update([(agent.critic_target, agent.critic),
                         (agent.actor_target, agent.actor)])
    if debug_out is not None:
        debug_out.update(q=q, y=y)
    return loss, objective


def dqn_update(agent: "DQNAgent", batch: Batch,
               debug_out: dict | None = None) -> float:
    """Squared TD step with the max over joint actions on the target net."""
    a = agent.acfg
    m = batch.reward.shape[0]
    ego, objs, mask = agent._prep(batch.ego, batch.objs, batch.mask)
    nego, nobjs, nmask = agent._prep(batch.next_ego, batch.next_objs,
                                     batch.next_mask)

    q_next = agent.target.forward(nego, nobjs, nmask).max(axis=1)
    y = bootstrap_targets(batch.reward, batch.done, q_next[:, None],
                          a.gamma)[:, 0]
    q_all = agent.net.forward(ego, objs, mask)
    idx = np.asarray(batch.action, dtype=int)
    q = q_all[np.arange(m), idx]
    loss, dq = td_loss_and_grad(q, y)
    if not np.isfinite(loss):
        raise DivergenceError("TD loss is not finite")
    dout = np.zeros_like(q_all)
    dout[np.arange(m), idx] = dq
    agent.net.backward(dout)
    agent.adam.step()
    agent._after_update([(agent.target, agent.net)])
    if debug_out is not None:
        debug_out.update(q=q, y=y)
    return loss


# ---------------------------------------------------------------------------
# agents
# ---------------------------------------------------------------------------

class AgentBase:
    kind = ""
    discrete = False

    def __init__(self, cfg: Config, rng: np.random.Generator):
        self.cfg = cfg
        self.acfg = cfg.agent
        self.rng = rng
        self.k_max = cfg.perception.max_objects
        self.table = DiscreteActionTable()
        self.env_steps = 0     # set by the training loop; drives annealing
        self.updates = 0
        self.buffer = ReplayBuffer(cfg.agent.buffer_capacity, EGO_DIM,
                                   self.k_max, OBJ_DIM, 2, self.discrete)

    # -- exploration schedule ---------------------------------------------
    def _anneal(self, start: float, end: float) -> float:
        frac = min(1.0, max(0.0, self.env_steps / max(1, self.acfg.anneal_steps)))
        return start + (end - start) * frac

    def exploration_scale(self) -> float:
        """Current epsilon (discrete) or Gaussian sigma fraction (continuous)."""
        a = self.acfg
        if self.discrete:
            return self._anneal(a.eps_start, a.eps_end)
        return self._anneal(a.sigma_start, a.sigma_end)

    # -- acting ------------------------------------------------------------
    def _prep(self, ego, objs, mask):
        ego_s, objs_s = scale_features(ego, objs, self.acfg)
        return ego_s, objs_s, np.asarray(mask, float)

    def act(self, obs: Observation, explore: bool) -> np.ndarray:
        ego, objs, mask = obs.arrays(self.k_max)
        return self.act_arrays(ego[None], objs[None], mask[None], explore)[0]

    def act_arrays(self, ego, objs, mask, explore: bool) -> np.ndarray:
        """Batched action selection on raw (unscaled) observation arrays."""
        if explore and self.env_steps < self.acfg.warmup_steps:
            return self._random_actions(np.asarray(ego).shape[0])
        return self._policy_actions(ego, objs, mask, explore)

    def _random_actions(self, batch: int) -> np.ndarray:
        if self.discrete:
            idx = self.rng.integers(0, self.table.n, size=batch)
            return self.table.pairs[idx].copy()
        return self.rng.uniform(-THRUST_RATE_LIMIT, THRUST_RATE_LIMIT,
                                size=(batch, 2))

    def action_repr(self, action) -> object:
        """What the replay buffer stores for this action."""
        if self.discrete:
            return self.table.index((action[0], action[1]))
        return action

    # -- learning ----------------------------------------------------------
    def record(self, ego, objs, mask, action, reward, next_ego, next_objs,
               next_mask, done: bool) -> None:
        self.buffer.push(ego, objs, mask, self.action_repr(action), reward,
                         next_ego, next_objs, next_mask, done)

    def update(self):
        """Sample a minibatch and apply this agent's rule; None if not ready."""
        a = self.acfg
        if self.env_steps < a.warmup_steps or len(self.buffer) < a.batch_size:
            return None
        return self.update_from_batch(self.buffer.sample(a.batch_size, self.rng))

    def _after_update(self, target_pairs) -> None:
        self.updates += 1
        if self.updates % self.acfg.soft_update_period == 0:
            for target, online in target_pairs:
                soft_update(target, online, self.acfg.soft_update_beta)

    # -- persistence -------------------------------------------------------
    def _net_map(self) -> dict:
        raise NotImplementedError

    def _adam_map(self) -> dict:
        raise NotImplementedError

    def save(self, path: str) -> None:
        arrays = {}
        for net_name, net in self._net_map().items():
            for pname, p in params_dict(net).items():
                arrays[f"{net_name}.{pname}"] = p
        for adam_name, adam in self._adam_map().items():
            arrays.update(adam.state_arrays(adam_name))
        a = self.acfg
        meta = {
            "kind": self.kind,
            "env_steps": self.env_steps,
            "updates": self.updates,
            "ego_hidden": a.ego_hidden,
            "object_hidden": a.object_hidden,
            "trunk_hidden": list(a.trunk_hidden),
            "quantile_embed_dim": a.quantile_embed_dim,
            "k_max": self.k_max,
        }
        save_checkpoint(path, meta, arrays)

    @classmethod
    def load(cls, path: str, cfg: Config, rng: np.random.Generator):
        meta, arrays = load_checkpoint(path)
        if meta.get("kind") != cls.kind:
            raise ValueError(f"checkpoint holds a {meta.get('kind')!r} agent, "
                             f"expected {cls.kind!r}")
        agent = cls(cfg, rng)
        for net_name, net in agent._net_map().items():
            prefix = net_name + "."
            sub = {k[len(prefix):]: v for k, v in arrays.items()
                   if k.startswith(prefix)}
            load_params(net, sub)
        for adam_name, adam in agent._adam_map().items():
            adam.load_state_arrays(adam_name, arrays)
        agent.env_steps = int(meta.get("env_steps", 0))
        agent.updates = int(meta.get("updates", 0))
        return agent


class _ContinuousPolicy:
    """Gaussian-perturbed deterministic actor with clipping."""

    def _policy_actions(self, ego, objs, mask, explore: bool) -> np.ndarray:
        ego_s, objs_s, mask = self._prep(ego, objs, mask)
        a = self.actor.forward(ego_s, objs_s, mask)
        if explore:
            sigma = self.exploration_scale() * THRUST_RATE_LIMIT
            if sigma > 0.0:
                a = a + self.rng.normal(0.0, sigma, size=a.shape)
        return np.clip(a, -THRUST_RATE_LIMIT, THRUST_RATE_LIMIT)


class _DiscretePolicy:
    """Epsilon-greedy over the joint action table."""

    def _policy_actions(self, ego, objs, mask, explore: bool) -> np.ndarray:
        ego_s, objs_s, mask = self._prep(ego, objs, mask)
        idx = self._greedy_indices(ego_s, objs_s, mask, explore)
        if explore:
            eps = self.exploration_scale()
            roll = self.rng.random(idx.shape[0])
            rand = self.rng.integers(0, self.table.n, size=idx.shape[0])
            idx = np.where(roll < eps, rand, idx)
        return self.table.pairs[idx].copy()


class ACIQNAgent(_ContinuousPolicy, AgentBase):
    """Deterministic actor trained through a distributional critic."""

    kind = "ac-iqn"
    discrete = False

    def __init__(self, cfg: Config, rng: np.random.Generator):
        super().__init__(cfg, rng)
        a = cfg.agent
        c_args = (EGO_DIM, OBJ_DIM, 2, 1, a.ego_hidden, a.object_hidden,
                  a.quantile_embed_dim, a.trunk_hidden)
        self.critic = QuantileCritic(*c_args, rng)
        self.critic_target = QuantileCritic(*c_args, rng)
        hard_update(self.critic_target, self.critic)
        a_args = (EGO_DIM, OBJ_DIM, 2, a.ego_hidden, a.object_hidden,
                  a.trunk_hidden, THRUST_RATE_LIMIT)
        self.actor = Actor(*a_args, rng, a.actor_final_init)
        self.actor_target = Actor(*a_args, rng, a.actor_final_init)
        hard_update(self.actor_target, self.actor)
        self.adam_critic = Adam(self.critic, a.lr)
        self.adam_actor = Adam(self.actor, a.lr)

    def update_from_batch(self, batch: Batch):
        return ac_iqn_update(self, batch)

    def _net_map(self):
        return {"critic": self.critic, "critic_target": self.critic_target,
                "actor": self.actor, "actor_target": self.actor_target}

    def _adam_map(self):
        return {"adam_critic": self.adam_critic, "adam_actor": self.adam_actor}


class DDPGAgent(_ContinuousPolicy, AgentBase):
    """Deterministic actor trained through an expected-value critic."""

    kind = "ddpg"
    discrete = False

    def __init__(self, cfg: Config, rng: np.random.Generator):
        super().__init__(cfg, rng)
        a = cfg.agent
        c_args = (EGO_DIM, OBJ_DIM, 2, 1, a.ego_hidden, a.object_hidden,
                  a.trunk_hidden)
        self.critic = ValueNet(*c_args, rng)
        self.critic_target = ValueNet(*c_args, rng)
        hard_update(self.critic_target, self.critic)
        a_args = (EGO_DIM, OBJ_DIM, 2, a.ego_hidden, a.object_hidden,
                  a.trunk_hidden, THRUST_RATE_LIMIT)
        self.actor = Actor(*a_args, rng, a.actor_final_init)
        self.actor_target = Actor(*a_args, rng, a.actor_final_init)
        hard_update(self.actor_target, self.actor)
        self.adam_critic = Adam(self.critic, a.lr)
        self.adam_actor = Adam(self.actor, a.lr)

    def update_from_batch(self, batch: Batch):
        return ddpg_update(self, batch)

    def _net_map(self):
        return {"critic": self.critic, "critic_target": self.critic_target,
                "actor": self.actor, "actor_target": self.actor_target}

    def _adam_map(self):
        return {"adam_critic": self.adam_critic, "adam_actor": self.adam_actor}


class IQNAgent(_DiscretePolicy, AgentBase):
    """Distributional critic over the joint action table."""

    kind = "iqn"
    discrete = True

    def __init__(self, cfg: Config, rng: np.random.Generator):
        super().__init__(cfg, rng)
        a = cfg.agent
        c_args = (EGO_DIM, OBJ_DIM, 0, self.table.n, a.ego_hidden,
                  a.object_hidden, a.quantile_embed_dim, a.trunk_hidden)
        self.critic = QuantileCritic(*c_args, rng)
        self.target = QuantileCritic(*c_args, rng)
        hard_update(self.target, self.critic)
        self.adam = Adam(self.critic, a.lr)

    def _greedy_indices(self, ego_s, objs_s, mask, explore: bool) -> np.ndarray:
        b = ego_s.shape[0]
        k = self.acfg.num_action_quantiles
        # evaluation uses the fixed stratified grid so greedy play is repeatable
        taus = (self.rng.uniform(0.0, 1.0, size=(b, k)) if explore
                else midpoint_taus(b, k))
        q = self.critic.forward(ego_s, objs_s, mask, taus).mean(axis=1)
        return np.argmax(q, axis=1)

    def update_from_batch(self, batch: Batch):
        return iqn_update(self, batch)

    def _net_map(self):
        return {"critic": self.critic, "target": self.target}

    def _adam_map(self):
        return {"adam": self.adam}


class DQNAgent(_DiscretePolicy, AgentBase):
    """Expected-value critic over the joint action table."""

    kind = "dqn"
    discrete = True

    def __init__(self, cfg: Config, rng: np.random.Generator):
        super().__init__(cfg, rng)
        a = cfg.agent
        c_args = (EGO_DIM, OBJ_DIM, 0, self.table.n, a.ego_hidden,
                  a.object_hidden, a.trunk_hidden)
        self.net = ValueNet(*c_args, rng)
        self.target = ValueNet(*c_args, rng)
        hard_update(self.target, self.net)
        self.adam = Adam(self.net, a.lr)

    def _greedy_indices(self, ego_s, objs_s, mask, explore: bool) -> np.ndarray:
        return np.argmax(self.net.forward(ego_s, objs_s, mask), axis=1)

    def update_from_batch(self, batch: Batch):
        return dqn_update(self, batch)

    def _net_map(self):
        return {"net": self.net, "target": self.target}

    def _adam_map(self):
        return {"adam": self.adam}


class RandomAgent(AgentBase):
    """Uniform draws from the joint action table; learns nothing."""

    kind = "random"
    discrete = True

    def __init__(self, cfg: Config, rng: np.random.Generator):
        super().__init__(cfg, rng)
        self.buffer = ReplayBuffer(1, EGO_DIM, self.k_max, OBJ_DIM, 2, True)

    def act_arrays(self, ego, objs, mask, explore: bool) -> np.ndarray:
        return self._random_actions(np.asarray(ego).shape[0])

    def update(self):
        return None

    def update_from_batch(self, batch: Batch):
        return None

    def _net_map(self):
        return {}

    def _adam_map(self):
        return {}


AGENT_KINDS = {cls.kind: cls for cls in
               (ACIQNAgent, IQNAgent, DDPGAgent, DQNAgent, RandomAgent)}


def make_agent(kind: str, cfg: Config, rng: np.random.Generator) -> AgentBase:
    try:
        cls = AGENT_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown agent kind {kind!r}; "
                         f"choose from {sorted(AGENT_KINDS)}")
    return cls(cfg, rng)


def load_agent(path: str, cfg: Config,
               rng: np.random.Generator) -> AgentBase:
    """Rebuild whichever agent kind a checkpoint holds."""
    meta, _ = load_checkpoint(path)
    kind = meta.get("kind")
    if kind not in AGENT_KINDS:
        raise ValueError(f"checkpoint holds unknown agent kind {kind!r}")
    return AGENT_KINDS[kind].load(path, cfg, rng)


def select_action(agent: AgentBase, obs: Observation,
                  explore: bool) -> np.ndarray:
    """One vehicle's thrust-rate command for the current observation."""
    return agent.act(obs, explore)
