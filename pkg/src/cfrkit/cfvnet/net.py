"""Counterfactual value network: a feedforward net with an exact zero-sum
correction layer, Huber loss, and Adam — all in plain numpy (float64).

The output layer has width ``2B``: one value per bucket for each player,
denominated in fractions of the current pot.  The correction layer reads
the two bucket-distribution blocks ``q_a, q_b`` from the *input* vector,
forms the residual ``e = q_a . u_a + q_b . u_b`` of the raw outputs, and
subtracts ``e / 2`` from every component; when each block sums to one this
makes the corrected outputs exactly consistent with a zero-sum game:
``q_a . v_a + q_b . v_b = 0``.  The correction is part of the graph, so
training differentiates through it.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "MlpConfig",
    "Mlp",
    "forward",
    "zero_sum_residual",
    "huber_loss",
    "backprop",
    "Adam",
    "save_net",
    "load_net",
]

_MAGIC = b"CFVN"
_VERSION = 1


# ─── Network ─────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class MlpConfig:
    """Architecture knobs: hidden widths, rectifier leak, init seed."""

    hidden: tuple[int, ...] = (500,) * 7
    leaky: float = 0.01
    seed: int = 0


class Mlp:
    """Fully connected rectifier network with a linear output layer.

    ``layers`` holds ``(W, b)`` pairs with ``W`` shaped (fan_in, fan_out);
    the forward pass is deterministic and raises on non-finite activations,
    naming the offending layer.
    """

    def __init__(self, n_in: int, n_out: int,
                 config: Optional[MlpConfig] = None) -> None:
        self.config = config or MlpConfig()
        self.n_in = n_in
        self.n_out = n_out
        self.layers: list[tuple[np.ndarray, np.ndarray]] = []
        rng = np.random.default_rng(self.config.seed)
        dims = (n_in,) + tuple(self.config.hidden) + (n_out,)
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            w = rng.normal(0.0, np.sqrt(2.0 / fan_in), (fan_in, fan_out))
            self.layers.append((w, np.zeros(fan_out)))

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.n_in,) + tuple(w.shape[1] for w, _ in self.layers)

    def params(self) -> list[np.ndarray]:
        return [arr for pair in self.layers for arr in pair]

    def set_params(self, flat: list[np.ndarray]) -> None:
        self.layers = [(flat[i], flat[i + 1])
                       for i in range(0, len(flat), 2)]

    def raw_forward(self, x: np.ndarray,
                    keep: bool = False):
        """Linear/rectifier stack up to the raw output ``u``.

        With ``keep`` the per-layer pre-activations and activations are
        returned for backpropagation.
        """
        a = np.atleast_2d(np.asarray(x, dtype=np.float64))
        acts, pres = [a], []
        last = len(self.layers) - 1
        for i, (w, b) in enumerate(self.layers):
            z = a @ w + b
            if not np.all(np.isfinite(z)):
                raise FloatingPointError(f"non-finite values at layer {i}")
            a = z if i == last else _leaky(z, self.config.leaky)
            if keep:
                pres.append(z)
                acts.append(a)
        return (a, pres, acts) if keep else a


def _leaky(z: np.ndarray, slope: float) -> np.ndarray:
    return np.where(z > 0.0, z, slope * z)


# ─── Forward with correction ─────────────────────────────────────────────────


def _correct(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Subtract half the zero-sum residual from every output component."""
    q = x[:, : u.shape[1]]
    e = np.sum(q * u, axis=1, keepdims=True)
    return u - 0.5 * e


def forward(net: Mlp, x: np.ndarray) -> np.ndarray:
    """Zero-sum-corrected network outputs for one input or a batch."""
    arr = np.atleast_2d(np.asarray(x, dtype=np.float64))
    v = _correct(arr, net.raw_forward(arr))
    return v[0] if np.ndim(x) == 1 else v


def zero_sum_residual(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Range-weighted sum of both players' values, per batch row."""
    x = np.atleast_2d(x)
    v = np.atleast_2d(v)
    return np.sum(x[:, : v.shape[1]] * v, axis=1)


# ─── Loss ────────────────────────────────────────────────────────────────────


def huber_loss(pred: np.ndarray, target: np.ndarray,
               delta: float = 1.0) -> float:
    """Mean Huber loss: quadratic inside ``delta``, linear outside."""
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    d = np.abs(np.asarray(pred, float) - np.asarray(target, float))
    quad = 0.5 * d * d
    lin = delta * (d - 0.5 * delta)
    return float(np.mean(np.where(d <= delta, quad, lin)))


def _huber_grad(diff: np.ndarray, delta: float) -> np.ndarray:
    return np.clip(diff, -delta, delta)


# ─── Backpropagation ─────────────────────────────────────────────────────────


def backprop(net: Mlp, x: np.ndarray, target: np.ndarray,
             delta: float = 1.0) -> tuple[float, list[np.ndarray]]:
    """Loss and parameter gradients for a batch, differentiating through
    the correction layer (``v = u - e/2`` couples every output to every
    other through the input's bucket blocks)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    target = np.atleast_2d(np.asarray(target, dtype=np.float64))
    u, pres, acts = net.raw_forward(x, keep=True)
    q = x[:, : u.shape[1]]
    v = u - 0.5 * np.sum(q * u, axis=1, keepdims=True)
    diff = v - target
    loss = huber_loss(v, target, delta)
    g = _huber_grad(diff, delta) / diff.size
    # Through the correction: dL/du_k = g_k - q_k * (sum_i g_i) / 2.
    gu = g - 0.5 * q * np.sum(g, axis=1, keepdims=True)
    grads: list[np.ndarray] = [None] * (2 * len(net.layers))
    ga = gu
    for i in range(len(net.layers) - 1, -1, -1):
        w, _ = net.layers[i]
        if i != len(net.layers) - 1:
            ga = ga * np.where(pres[i] > 0.0, 1.0, net.config.leaky)
        grads[2 * i] = acts[i].T @ ga
        grads[2 * i + 1] = ga.sum(axis=0)
        ga = ga @ w.T
    return loss, grads


# ─── Optimizer ───────────────────────────────────────────────────────────────


class Adam:
    """Bias-corrected adaptive moment optimizer over a parameter list."""

    def __init__(self, params: list[np.ndarray], lr: float = 1e-3,
                 betas: tuple[float, float] = (0.9, 0.999),
                 eps: float = 1e-8) -> None:
        self.lr = lr
        self.betas = betas
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params: list[np.ndarray],
             grads: list[np.ndarray]) -> None:
        self.t += 1
        b1, b2 = self.betas
        c1 = 1.0 - b1 ** self.t
        c2 = 1.0 - b2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m += (1.0 - b1) * (g - m)
            v += (1.0 - b2) * (g * g - v)
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


# ─── Checkpoints ─────────────────────────────────────────────────────────────


def save_net(net: Mlp, path) -> None:
    """Write the checkpoint: magic, version, leak, layer dims, then each
    layer's weights and biases as row-major little-endian float32."""
    dims = net.dims
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<IfI", _VERSION, net.config.leaky, len(dims)))
        f.write(struct.pack(f"<{len(dims)}I", *dims))
        for w, b in net.layers:
            f.write(np.ascontiguousarray(w, dtype="<f4").tobytes())
            f.write(np.ascontiguousarray(b, dtype="<f4").tobytes())


def load_net(path) -> Mlp:
    with open(path, "rb") as f:
        if f.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a network checkpoint")
        version, leaky, n_dims = struct.unpack("<IfI", f.read(12))
        if version != _VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        dims = struct.unpack(f"<{n_dims}I", f.read(4 * n_dims))
        net = Mlp(dims[0], dims[-1],
                  MlpConfig(hidden=tuple(dims[1:-1]), leaky=float(leaky)))
        layers = []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            w = np.frombuffer(f.read(4 * fan_in * fan_out), dtype="<f4")
            b = np.frombuffer(f.read(4 * fan_out), dtype="<f4")
            layers.append((w.astype(np.float64).reshape(fan_in, fan_out),
                           b.astype(np.float64)))
        net.layers = layers
    return net
