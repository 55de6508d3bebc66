"""From-scratch dense network primitives with exact reverse-mode gradients.

Everything is float64 numpy so gradients can be checked against central finite
differences at tight tolerance.  Layers cache their inputs on forward and
accumulate parameter gradients on backward; callers zero gradients between
updates (the optimizer does it after applying a step).
"""

from __future__ import annotations

import json
import struct
from typing import Iterable, Iterator

import numpy as np


class DivergenceError(RuntimeError):
    """Raised when a loss or gradient stops being finite."""


ParamItem = tuple[str, np.ndarray, np.ndarray]   # name, values, gradient


def uniform_init(rng: np.random.Generator, n_in: int, n_out: int,
                 scale: float | None = None) -> np.ndarray:
    """Fan-in scaled uniform weights, or a fixed half-width if given."""
    s = scale if scale is not None else 1.0 / np.sqrt(n_in)
    return rng.uniform(-s, s, size=(n_in, n_out))


class Dense:
    """Affine layer y = x W + b over the last axis; leading axes are batch."""

    def __init__(self, n_in: int, n_out: int, rng: np.random.Generator,
                 init_scale: float | None = None):
        self.n_in = n_in
        self.n_out = n_out
        self.W = uniform_init(rng, n_in, n_out, init_scale)
        self.b = np.zeros(n_out)
        self.dW = np.zeros_like(self.W)
        self.db = np.zeros_like(self.b)
        self._x: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.shape[-1] != self.n_in:
            raise ValueError(f"expected last dim {self.n_in}, got {x.shape}")
        self._x = x
        return x @ self.W + self.b

    def backward(self, dy: np.ndarray) -> np.ndarray:
        x = self._x
        xf = x.reshape(-1, self.n_in)
        dyf = dy.reshape(-1, self.n_out)
        self.dW += xf.T @ dyf
        self.db += dyf.sum(axis=0)
        return (dyf @ self.W.T).reshape(x.shape)

    def param_items(self, prefix: str) -> Iterator[ParamItem]:
        yield (f"{prefix}.W", self.W, self.dW)
        yield (f"{prefix}.b", self.b, self.db)


class Relu:
    """Elementwise rectifier; subgradient 0 at the origin."""

    def __init__(self):
        self._mask: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._mask = x > 0.0
        return np.where(self._mask, x, 0.0)

    def backward(self, dy: np.ndarray) -> np.ndarray:
        return np.where(self._mask, dy, 0.0)


class Tanh:
    def __init__(self):
        self._y: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._y = np.tanh(x)
        return self._y

    def backward(self, dy: np.ndarray) -> np.ndarray:
        return dy * (1.0 - self._y * self._y)


def cosine_embed(taus: np.ndarray, dim: int) -> np.ndarray:
    """Map quantile fractions to cos(pi * i * tau), i = 0..dim-1.

    taus may have any shape; the embedding axis is appended last.  Values must
    lie in [0, 1].
    """
    taus = np.asarray(taus, dtype=float)
    if taus.size and (taus.min() < 0.0 or taus.max() > 1.0):
        raise ValueError("quantile fractions must lie in [0, 1]")
    i = np.arange(dim)
    return np.cos(np.pi * taus[..., None] * i)


class Adam:
    """Adaptive-moment optimizer over a network's parameter items.

    step() applies one update from the accumulated gradients and then zeros
    them.  A non-finite gradient raises DivergenceError before any parameter
    is touched.
    """

    def __init__(self, net, lr: float, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.net = net
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {name: np.zeros_like(p) for name, p, _ in net.param_items()}
        self.v = {name: np.zeros_like(p) for name, p, _ in net.param_items()}

    def step(self) -> None:
        items = list(self.net.param_items())
        for name, _, g in items:
            if not np.isfinite(g).all():
                raise DivergenceError(f"non-finite gradient in {name}")
        self.t += 1
        b1c = 1.0 - self.beta1 ** self.t
        b2c = 1.0 - self.beta2 ** self.t
        for name, p, g in items:
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)
            g[:] = 0.0

    def state_arrays(self, prefix: str) -> dict[str, np.ndarray]:
        out = {}
        for name in self.m:
            out[f"{prefix}.m.{name}"] = self.m[name]
            out[f"{prefix}.v.{name}"] = self.v[name]
        out[f"{prefix}.t"] = np.array([float(self.t)])
        return out

    def load_state_arrays(self, prefix: str, arrays: dict[str, np.ndarray]) -> None:
        for name in self.m:
            self.m[name][:] = arrays[f"{prefix}.m.{name}"]
            self.v[name][:] = arrays[f"{prefix}.v.{name}"]
        self.t = int(arrays[f"{prefix}.t"][0])


def zero_grads(net) -> None:
    for _, _, g in net.param_items():
        g[:] = 0.0


def soft_update(target, online, beta: float) -> None:
    """Blend target parameters toward the online ones: t = beta*o + (1-beta)*t."""
    for (_, tp, _), (_, op, _) in zip(target.param_items(), online.param_items()):
        tp *= 1.0 - beta
        tp += beta * op


def hard_update(target, online) -> None:
    soft_update(target, online, 1.0)


def params_dict(net) -> dict[str, np.ndarray]:
    return {name: p for name, p, _ in net.param_items()}


def load_params(net, arrays: dict[str, np.ndarray]) -> None:
    for name, p, _ in net.param_items():
        if name not in arrays:
            raise KeyError(f"checkpoint missing parameter {name}")
        if arrays[name].shape != p.shape:
            raise ValueError(f"shape mismatch for {name}: "
                             f"{arrays[name].shape} vs {p.shape}")
        p[:] = arrays[name]


# ---------------------------------------------------------------------------
# Checkpoint container: magic, version, JSON header, raw little-endian floats.
# The header is serialized with sorted keys and fixed separators so identical
# content always produces identical bytes.
# ---------------------------------------------------------------------------

_MAGIC = b"ASVN"
_VERSION = 1


def save_checkpoint(path: str, meta: dict,
                    arrays: dict[str, np.ndarray]) -> None:
    entries = []
    blobs = []
    offset = 0
    for name in sorted(arrays):
        a = np.ascontiguousarray(arrays[name], dtype="<f8")
        raw = a.tobytes()
        entries.append({"name": name, "shape": list(a.shape),
                        "offset": offset, "nbytes": len(raw)})
        blobs.append(raw)
        offset += len(raw)
    header = json.dumps({"meta": meta, "arrays": entries},
                        sort_keys=True, separators=(",", ":")).encode()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", _VERSION, len(header)))
        fh.write(header)
        for raw in blobs:
            fh.write(raw)


def load_checkpoint(path: str) -> tuple[dict, dict[str, np.ndarray]]:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValueError(f"not a checkpoint file: {path}")
        version, header_len = struct.unpack("<II", fh.read(8))
        if version != _VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        header = json.loads(fh.read(header_len).decode())
        payload = fh.read()
    arrays = {}
    for e in header["arrays"]:
        raw = payload[e["offset"]:e["offset"] + e["nbytes"]]
        arrays[e["name"]] = np.frombuffer(raw, dtype="<f8").reshape(
            e["shape"]).astype(float)
    return header["meta"], arrays
