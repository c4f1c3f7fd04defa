"""Counterfactual value networks: bucketing, encoding, the zero-sum
corrected feedforward net, training, and solved-subgame data generation."""

from .buckets import BucketConfig, BucketMap, build_buckets
from .data import (Dataset, DependencyError, gen_samples, load_dataset,
                   random_range, save_dataset)
from .encode import bucket_distribution, encode
from .leaf import NetValueFn
from .net import (Adam, Mlp, MlpConfig, backprop, forward, huber_loss,
                  load_net, save_net, zero_sum_residual)
from .train import DivergenceError, TrainConfig, TrainResult, train

__all__ = [
    "BucketConfig",
    "BucketMap",
    "build_buckets",
    "Dataset",
    "DependencyError",
    "gen_samples",
    "load_dataset",
    "random_range",
    "save_dataset",
    "bucket_distribution",
    "encode",
    "NetValueFn",
    "Adam",
    "Mlp",
    "MlpConfig",
    "backprop",
    "forward",
    "huber_loss",
    "load_net",
    "save_net",
    "zero_sum_residual",
    "DivergenceError",
    "TrainConfig",
    "TrainResult",
    "train",
]
