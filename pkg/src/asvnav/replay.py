"""Uniform experience replay over preallocated arrays.

The buffer is a fixed-capacity ring: once full, each push overwrites the
oldest transition.  Sampling is uniform with replacement from whatever is
currently stored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Batch:
    """Column view of a sampled minibatch."""

    ego: np.ndarray        # (M, E)
    objs: np.ndarray       # (M, K, O)
    mask: np.ndarray       # (M, K)
    action: np.ndarray     # (M, A) float, or (M,) int for joint indices
    reward: np.ndarray     # (M,)
    next_ego: np.ndarray
    next_objs: np.ndarray
    next_mask: np.ndarray
    done: np.ndarray       # (M,) 0/1


class ReplayBuffer:
    def __init__(self, capacity: int, ego_dim: int, k_max: int, obj_dim: int,
                 action_dim: int, discrete: bool = False):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.discrete = discrete
        self._ego = np.zeros((capacity, ego_dim))
        self._objs = np.zeros((capacity, k_max, obj_dim))
        self._mask = np.zeros((capacity, k_max))
        if discrete:
            self._action = np.zeros(capacity, dtype=np.int64)
        else:
            self._action = np.zeros((capacity, action_dim))
        self._reward = np.zeros(capacity)
        self._next_ego = np.zeros((capacity, ego_dim))
        self._next_objs = np.zeros((capacity, k_max, obj_dim))
        self._next_mask = np.zeros((capacity, k_max))
        self._done = np.zeros(capacity)
        self._pos = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def push(self, ego, objs, mask, action, reward, next_ego, next_objs,
             next_mask, done) -> None:
        i = self._pos
        self._ego[i] = ego
        self._objs[i] = objs
        self._mask[i] = mask
        self._action[i] = action
        self._reward[i] = reward
        self._next_ego[i] = next_ego
        self._next_objs[i] = next_objs
        self._next_mask[i] = next_mask
        self._done[i] = 1.0 if done else 0.0
        self._pos = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch:
        if self._size == 0:
            raise ValueError("cannot sample from an empty buffer")
        idx = rng.integers(0, self._size, size=batch_size)
        return Batch(
            ego=self._ego[idx],
            objs=self._objs[idx],
            mask=self._mask[idx],
            action=self._action[idx],
            reward=self._reward[idx],
            next_ego=self._next_ego[idx],
            next_objs=self._next_objs[idx],
            next_mask=self._next_mask[idx],
            done=self._done[idx],
        )
