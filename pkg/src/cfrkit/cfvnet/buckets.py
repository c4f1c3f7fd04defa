"""Hand bucketing: many-to-one compression of private hands for networks.

A :class:`BucketMap` assigns every private hand a bucket index in
``[0, B)``, per concrete board (assignments are computed lazily and cached
by board).  Two methods:

* ``"identity"`` — bucket = hand index, ``B`` = size of the hand space;
  dead hands keep their slot and simply never carry mass.  Exact, used by
  the small games.
* ``"equity"`` — k-means over equity-histogram features: for each live
  hand, the distribution of its showdown equity against a uniform live
  opponent over every enumeration of the remaining board cards.  Hands
  with identical histograms always land in the same bucket.

Clustering is deterministic given the seed (k-means++ seeding from a
fixed generator, Lloyd iterations with stable tie-breaking).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from ..games import GameSpec
from ..hands import HandSpace

__all__ = ["BucketConfig", "BucketMap", "build_buckets", "equity_features"]


# ─── Configuration ───────────────────────────────────────────────────────────


@dataclass(frozen=True)
class BucketConfig:
    """Clustering knobs.

    Attributes:
        buckets: number of buckets B (ignored by the identity method,
            which always uses the full hand-space size).
        method: "identity" or "equity".
        bins: histogram resolution for the equity features.
        seed: RNG seed for k-means seeding.
        iterations: Lloyd iteration cap.
    """

    buckets: int = 1000
    method: str = "equity"
    bins: int = 8
    seed: int = 0
    iterations: int = 64

    def __post_init__(self) -> None:
        if self.method not in ("identity", "equity"):
            raise ValueError(f"unknown bucketing method {self.method!r}")


# ─── Equity features ─────────────────────────────────────────────────────────


def _board_completions(spec: GameSpec, board: tuple, exclude: set) -> list:
    """All fillings of the board out to the final round, avoiding the
    cards in ``exclude``."""
    need = sum(spec.board_cards) - len(board)
    pool = [c for c in spec.deck if c not in set(board) | exclude]
    if need == 0:
        return [board]
    return [board + extra for extra in combinations(pool, need)]


def equity_features(spec: GameSpec, hands: HandSpace, board: tuple,
                    bins: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Per-hand equity histograms over enumerated board completions.

    Returns ``(features, live)`` where ``features[i]`` is hand *i*'s
    normalized histogram of equity-vs-uniform over all completions of
    ``board`` (rows of dead hands are zero).
    """
    live = hands.live_mask(board) > 0
    feats = np.zeros((hands.n, bins))
    edges = np.linspace(0.0, 1.0, bins + 1)
    edges[-1] = 1.0 + 1e-9  # equity 1.0 falls in the last bin
    for i in np.flatnonzero(live):
        mine = set(hands.hands[i])
        eqs = []
        for full in _board_completions(spec, board, mine):
            ranks = hands.showdown_ranks(full)
            opp = (hands.live_mask(full) > 0)
            opp &= ~np.fromiter((bool(mine & set(h)) for h in hands.hands),
                                bool, hands.n)
            k = int(opp.sum())
            if k == 0 or ranks[i] < 0:
                continue
            wins = float(np.sum(ranks[i] > ranks[opp]))
            ties = float(np.sum(ranks[i] == ranks[opp]))
            eqs.append((wins + 0.5 * ties) / k)
        if eqs:
            idx = np.searchsorted(edges, eqs, side="right") - 1
            np.add.at(feats[i], np.clip(idx, 0, bins - 1), 1.0)
            feats[i] /= feats[i].sum()
    return feats, live


# ─── k-means ─────────────────────────────────────────────────────────────────


def _kmeans(points: np.ndarray, k: int, seed: int, iterations: int
            ) -> np.ndarray:
    """Deterministic Lloyd's algorithm with k-means++ seeding; returns the
    cluster assignment of each row."""
    n = len(points)
    rng = np.random.default_rng(seed)
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:  # fewer distinct points than centers
            centers[j] = points[rng.integers(n)]
            continue
        centers[j] = points[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, np.sum((points - centers[j]) ** 2, axis=1))
    assign = np.zeros(n, dtype=np.int64)
    for _ in range(iterations):
        dists = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new = dists.argmin(axis=1)
        if np.array_equal(new, assign):
            break
        assign = new
        for j in range(k):
            members = points[assign == j]
            if len(members):
                centers[j] = members.mean(axis=0)
    return assign


# ─── Bucket maps ─────────────────────────────────────────────────────────────


@dataclass
class BucketMap:
    """Hand → bucket assignment for one round, lazily built per board."""

    spec: GameSpec
    round: int
    buckets: int
    config: BucketConfig
    hands: HandSpace
    _cache: dict = field(default_factory=dict)

    def assignment(self, board) -> np.ndarray:
        """Bucket index per hand on ``board`` (-1 for dead hands)."""
        key = tuple(sorted(board))
        got = self._cache.get(key)
        if got is not None:
            return got
        out = self._build(key)
        self._cache[key] = out
        return out

    def _build(self, board: tuple) -> np.ndarray:
        hands = self.hands
        out = np.full(hands.n, -1, dtype=np.int64)
        if self.config.method == "identity":
            live = hands.live_mask(board) > 0
            out[live] = np.flatnonzero(live)
            return out
        feats, live = equity_features(self.spec, hands, board,
                                      self.config.bins)
        idx = np.flatnonzero(live)
        # Identical feature rows must share a bucket: cluster the unique
        # rows, then fan the labels back out.
        uniq, inverse = np.unique(feats[idx].round(12), axis=0,
                                  return_inverse=True)
        k = min(self.buckets, len(uniq))
        labels = (_kmeans(uniq, k, self.config.seed, self.config.iterations)
                  if k < len(uniq) else np.arange(len(uniq)))
        out[idx] = labels[inverse]
        return out


def build_buckets(spec: GameSpec, round: int,
                  config: Optional[BucketConfig] = None,
                  hands: Optional[HandSpace] = None) -> BucketMap:
    """Construct the bucket map for one round of a game."""
    config = config or BucketConfig()
    hands = hands or HandSpace(spec)
    if config.method == "identity":
        buckets = hands.n
    else:
        buckets = config.buckets
        if buckets > hands.n:
            raise ValueError(
                f"cannot build {buckets} buckets from {hands.n} hands")
    if not 0 <= round < spec.num_rounds:
        raise ValueError(f"round {round} out of range")
    return BucketMap(spec=spec, round=round, buckets=buckets,
                     config=config, hands=hands)
