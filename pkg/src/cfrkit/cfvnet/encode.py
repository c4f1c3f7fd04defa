"""Network input encoding: two bucketed ranges plus a pot feature.

The input vector has length ``2B + 1``: the first block is the bucket
distribution of the player to act, the second the opponent's, and the
final element is the total committed chips as a fraction of all chips in
play (``pot / (2 * stack)``), so it lies in ``(0, 1]``.
"""

from __future__ import annotations

import numpy as np

from .buckets import BucketMap

__all__ = ["encode", "bucket_distribution"]


def bucket_distribution(range_vec: np.ndarray, assign: np.ndarray,
                        buckets: int) -> np.ndarray:
    """Fold a per-hand range into a normalized per-bucket distribution."""
    r = np.asarray(range_vec, dtype=np.float64)
    live = assign >= 0
    out = np.zeros(buckets)
    np.add.at(out, assign[live], r[live])
    total = out.sum()
    if total <= 0.0:
        raise ValueError("range carries no mass on live hands")
    return out / total


def encode(range_a: np.ndarray, range_b: np.ndarray, pot: float,
           board, bmap: BucketMap) -> np.ndarray:
    """Build the ``2B + 1`` input vector for one public state.

    ``range_a`` is the acting player's hand distribution and ``range_b``
    the opponent's; both are folded into bucket space and normalized.
    """
    assign = bmap.assignment(board)
    b = bmap.buckets
    x = np.empty(2 * b + 1)
    x[:b] = bucket_distribution(range_a, assign, b)
    x[b:2 * b] = bucket_distribution(range_b, assign, b)
    frac = float(pot) / (2.0 * bmap.spec.stack)
    if not 0.0 < frac <= 1.0:
        raise ValueError(f"pot {pot} outside (0, {2 * bmap.spec.stack}]")
    x[2 * b] = frac
    return x
