"""Minibatch training loop: Adam on Huber loss with a held-out split.

Validation indices are drawn once up front and never enter an update.
A non-finite training loss aborts the run and raises with the weights as
they stood after the last completed epoch.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .data import Dataset
from .net import Adam, Mlp, MlpConfig, backprop, forward, huber_loss

__all__ = ["TrainConfig", "TrainResult", "DivergenceError", "train"]


@dataclass(frozen=True)
class TrainConfig:
    """Optimization knobs (architecture fields are used only when the
    caller does not supply a network)."""

    epochs: int = 32
    batch: int = 1024
    lr: float = 1e-3
    betas: tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    delta: float = 1.0
    split: float = 0.1
    seed: int = 0
    hidden: tuple[int, ...] = (500,) * 7
    leaky: float = 0.01

    def __post_init__(self) -> None:
        if not 0.0 < self.split < 1.0:
            raise ValueError("split must lie strictly between 0 and 1")
        if self.epochs < 1 or self.batch < 1:
            raise ValueError("epochs and batch must be positive")


@dataclass
class TrainResult:
    net: Mlp
    train_losses: list[float] = field(default_factory=list)
    val_losses: list[float] = field(default_factory=list)


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss; carries the last good net."""

    def __init__(self, message: str, checkpoint: Mlp) -> None:
        super().__init__(message)
        self.checkpoint = checkpoint


def train(dataset: Dataset, net: Optional[Mlp] = None,
          config: Optional[TrainConfig] = None) -> TrainResult:
    """Fit a value network to ``dataset``; returns the net plus per-epoch
    train/validation Huber losses."""
    cfg = config or TrainConfig()
    if len(dataset) == 0:
        raise ValueError("empty dataset")
    x = dataset.inputs.astype(np.float64)
    t = dataset.targets.astype(np.float64)
    if net is None:
        net = Mlp(x.shape[1], t.shape[1],
                  MlpConfig(hidden=cfg.hidden, leaky=cfg.leaky,
                            seed=cfg.seed))
    rng = np.random.default_rng(cfg.seed)
    perm = rng.permutation(len(x))
    n_val = max(1, int(round(cfg.split * len(x))))
    val_idx, train_idx = perm[:n_val], perm[n_val:]
    if len(train_idx) == 0:
        raise ValueError("split leaves no training samples")
    opt = Adam(net.params(), lr=cfg.lr, betas=cfg.betas, eps=cfg.eps)
    result = TrainResult(net=net)
    snapshot = copy.deepcopy(net.layers)
    for epoch in range(cfg.epochs):
        order = rng.permutation(train_idx)
        batch_losses = []
        for lo in range(0, len(order), cfg.batch):
            rows = order[lo: lo + cfg.batch]
            loss, grads = backprop(net, x[rows], t[rows], cfg.delta)
            if not np.isfinite(loss):
                net.layers = snapshot
                raise DivergenceError(
                    f"non-finite loss in epoch {epoch}", checkpoint=net)
            params = net.params()
            opt.step(params, grads)
            net.set_params(params)
            batch_losses.append(loss)
        snapshot = copy.deepcopy(net.layers)
        result.train_losses.append(float(np.mean(batch_losses)))
        val = huber_loss(forward(net, x[val_idx]), t[val_idx], cfg.delta)
        result.val_losses.append(val)
    return result
