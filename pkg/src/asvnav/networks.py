"""Policy and value networks assembled from the dense primitives.

All networks share the observation encoder shape: the ego vector feeds one
branch, each object slot feeds a weight-shared branch pooled with a masked
elementwise max, and the concatenation makes the state feature.  Critics that
take an action concatenate it to the state feature before the trunk, and their
backward pass also returns the gradient with respect to that action input,
which is what ties the actor to the critic.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

from .nn import Dense, ParamItem, Relu, Tanh, cosine_embed


class ObservationEncoder:
    """Ego branch + pooled object branch -> state feature vector."""

    def __init__(self, ego_dim: int, obj_dim: int, ego_hidden: int,
                 obj_hidden: int, rng: np.random.Generator):
        self.ego_fc = Dense(ego_dim, ego_hidden, rng)
        self.ego_act = Relu()
        self.obj_fc = Dense(obj_dim, obj_hidden, rng)
        self.obj_act = Relu()
        self.ego_hidden = ego_hidden
        self.obj_hidden = obj_hidden
        self.out_dim = ego_hidden + obj_hidden

    def forward(self, ego: np.ndarray, objs: np.ndarray,
                mask: np.ndarray) -> np.ndarray:
        # ego (B, E), objs (B, K, O), mask (B, K)
        he = self.ego_act.forward(self.ego_fc.forward(ego))
        ho = self.obj_act.forward(self.obj_fc.forward(objs))   # (B, K, H)
        m3 = mask[:, :, None] > 0.0
        masked = np.where(m3, ho, -np.inf)
        self._any_valid = m3.any(axis=1)                       # (B, 1)
        pooled = np.where(self._any_valid,
                          np.max(np.where(m3, ho, -np.inf), axis=1), 0.0)
        self._argmax = np.argmax(masked, axis=1)               # (B, H)
        self._obj_shape = ho.shape
        return np.concatenate([he, pooled], axis=1)

    def backward(self, dout: np.ndarray) -> None:
        dhe = dout[:, :self.ego_hidden]
        dpool = np.where(self._any_valid, dout[:, self.ego_hidden:], 0.0)
        dho = np.zeros(self._obj_shape)
        np.put_along_axis(dho, self._argmax[:, None, :], dpool[:, None, :],
                          axis=1)
        self.obj_fc.backward(self.obj_act.backward(dho))
        self.ego_fc.backward(self.ego_act.backward(dhe))

    def param_items(self, prefix: str) -> Iterator[ParamItem]:
        yield from self.ego_fc.param_items(f"{prefix}.ego_fc")
        yield from self.obj_fc.param_items(f"{prefix}.obj_fc")


class _Trunk:
    """Stack of Dense+ReLU layers with a linear head."""

    def __init__(self, n_in: int, widths: list[int], n_out: int,
                 rng: np.random.Generator):
        dims = [n_in] + list(widths)
        self.hidden = [Dense(dims[i], dims[i + 1], rng)
                       for i in range(len(widths))]
        self.acts = [Relu() for _ in widths]
        self.head = Dense(dims[-1], n_out, rng)

    def forward(self, x: np.ndarray) -> np.ndarray:
        for fc, act in zip(self.hidden, self.acts):
            x = act.forward(fc.forward(x))
        return self.head.forward(x)

    def backward(self, dy: np.ndarray) -> np.ndarray:
        dx = self.head.backward(dy)
        for fc, act in zip(reversed(self.hidden), reversed(self.acts)):
            dx = fc.backward(act.backward(dx))
        return dx

    def param_items(self, prefix: str) -> Iterator[ParamItem]:
        for i, fc in enumerate(self.hidden):
            yield from fc.param_items(f"{prefix}.h{i}")
        yield from self.head.param_items(f"{prefix}.head")


class QuantileCritic:
    """Distributional critic Z_tau(s[, a]) built on a cosine tau embedding.

    The tau embedding is lifted to the state-feature width and multiplied in
    elementwise, then a dense trunk maps each (sample, tau) row to output
    quantile values.  action_dim = 0 gives the discrete form with one output
    per action; action_dim = 2 takes the action as an input and outputs one
    value.
    """

    def __init__(self, ego_dim: int, obj_dim: int, action_dim: int,
                 n_actions_out: int, ego_hidden: int, obj_hidden: int,
                 embed_dim: int, trunk_widths: list[int],
                 rng: np.random.Generator):
        self.encoder = ObservationEncoder(ego_dim, obj_dim, ego_hidden,
                                          obj_hidden, rng)
        self.action_dim = action_dim
        self.embed_dim = embed_dim
        self.feature_dim = self.encoder.out_dim + action_dim
        self.tau_fc = Dense(embed_dim, self.feature_dim, rng)
        self.tau_act = Relu()
        self.trunk = _Trunk(self.feature_dim, trunk_widths, n_actions_out, rng)

    def forward(self, ego: np.ndarray, objs: np.ndarray, mask: np.ndarray,
                taus: np.ndarray, action: np.ndarray | None = None) -> np.ndarray:
        """Quantile values with shape (B, N, n_actions_out); taus is (B, N)."""
        sf = self.encoder.forward(ego, objs, mask)
        if self.action_dim:
            if action is None:
                raise ValueError("this critic needs an action input")
            sf = np.concatenate([sf, action], axis=1)
        elif action is not None:
            raise ValueError("this critic takes no action input")
        self._sf = sf
        emb = cosine_embed(taus, self.embed_dim)               # (B, N, D)
        phi = self.tau_act.forward(self.tau_fc.forward(emb))   # (B, N, F)
        self._phi = phi
        z = sf[:, None, :] * phi
        return self.trunk.forward(z)

    def backward(self, dout: np.ndarray) -> np.ndarray | None:
        """Backpropagate; returns the action-input gradient if it exists."""
        dz = self.trunk.backward(dout)                         # (B, N, F)
        dphi = dz * self._sf[:, None, :]
        dsf = (dz * self._phi).sum(axis=1)                     # (B, F)
        self.tau_fc.backward(self.tau_act.backward(dphi))
        if self.action_dim:
            denc = dsf[:, :self.encoder.out_dim]
            daction = dsf[:, self.encoder.out_dim:]
        else:
            denc, daction = dsf, None
        self.encoder.backward(denc)
        return daction

    def param_items(self) -> Iterator[ParamItem]:
        yield from self.encoder.param_items("encoder")
        yield from self.tau_fc.param_items("tau_fc")
        yield from self.trunk.param_items("trunk")


class ValueNet:
    """Expected-value network: Q(s) per action, or Q(s, a) with action input."""

    def __init__(self, ego_dim: int, obj_dim: int, action_dim: int,
                 n_actions_out: int, ego_hidden: int, obj_hidden: int,
                 trunk_widths: list[int], rng: np.random.Generator):
        self.encoder = ObservationEncoder(ego_dim, obj_dim, ego_hidden,
                                          obj_hidden, rng)
        self.action_dim = action_dim
        self.trunk = _Trunk(self.encoder.out_dim + action_dim, trunk_widths,
                            n_actions_out, rng)

    def forward(self, ego: np.ndarray, objs: np.ndarray, mask: np.ndarray,
                action: np.ndarray | None = None) -> np.ndarray:
        sf = self.encoder.forward(ego, objs, mask)
        if self.action_dim:
            if action is None:
                raise ValueError("this net needs an action input")
            sf = np.concatenate([sf, action], axis=1)
        elif action is not None:
            raise ValueError("this net takes no action input")
        return self.trunk.forward(sf)

    def backward(self, dout: np.ndarray) -> np.ndarray | None:
        dsf = self.trunk.backward(dout)
        if self.action_dim:
            denc = dsf[:, :self.encoder.out_dim]
            daction = dsf[:, self.encoder.out_dim:]
        else:
            denc, daction = dsf, None
        self.encoder.backward(denc)
        return daction

    def param_items(self) -> Iterator[ParamItem]:
        yield from self.encoder.param_items("encoder")
        yield from self.trunk.param_items("trunk")


class Actor:
    """Deterministic policy: observation -> bounded thrust-rate pair.

    tanh keeps the raw output in (-1, 1); out_scale stretches it to the
    physical action range.  The final layer starts near zero so early actions
    do not pin the rails.
    """

    def __init__(self, ego_dim: int, obj_dim: int, action_dim: int,
                 ego_hidden: int, obj_hidden: int, trunk_widths: list[int],
                 out_scale: float, rng: np.random.Generator,
                 final_init: float = 1e-3):
        self.encoder = ObservationEncoder(ego_dim, obj_dim, ego_hidden,
                                          obj_hidden, rng)
        dims = [self.encoder.out_dim] + list(trunk_widths)
        self.hidden = [Dense(dims[i], dims[i + 1], rng)
                       for i in range(len(trunk_widths))]
        self.acts = [Relu() for _ in trunk_widths]
        self.head = Dense(dims[-1], action_dim, rng, init_scale=final_init)
        self.squash = Tanh()
        self.out_scale = out_scale

    def forward(self, ego: np.ndarray, objs: np.ndarray,
                mask: np.ndarray) -> np.ndarray:
        x = self.encoder.forward(ego, objs, mask)
        for fc, act in zip(self.hidden, self.acts):
            x = act.forward(fc.forward(x))
        return self.out_scale * self.squash.forward(self.head.forward(x))

    def backward(self, da: np.ndarray) -> None:
        dx = self.head.backward(self.squash.backward(self.out_scale * da))
        for fc, act in zip(reversed(self.hidden), reversed(self.acts)):
            dx = fc.backward(act.backward(dx))
        self.encoder.backward(dx)

    def param_items(self) -> Iterator[ParamItem]:
        yield from self.encoder.param_items("encoder")
        for i, fc in enumerate(self.hidden):
            yield from fc.param_items(f"h{i}")
        yield from self.head.param_items("head")
