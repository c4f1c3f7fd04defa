"""Training data for value networks: random round-start subgames, solved.

Each sample draws a random board for the round, a random (log-uniform)
matched pot, and random ranges for both players; the subgame rooted there
is solved and the root counterfactual values — folded to buckets and
denominated in fractions of the pot — become the regression target.
Rounds before the last need the value function of the round below to cap
their lookaheads, so generation runs back to front (last round first).

Per-sample RNG streams are seeded ``[seed, index]``, so a dataset is
bit-identical for a given seed no matter how generation is partitioned.

File format ("CFVD"): header {magic, version u32, round u8, B u32,
count u64} followed by fixed-width little-endian float32 records, each an
input vector (2B+1) and its target (2B).  Blocks are ordered acting
player first.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..cfr.schedules import Schedule, dcfr_plus
from ..games import GameSpec, PokerGame
from ..hands import HandSpace
from ..lookahead.flattree import build_tree
from ..lookahead.oracle import round_start_history
from ..lookahead.solver import FlatSolver
from .buckets import BucketMap
from .encode import encode

__all__ = [
    "Dataset",
    "DependencyError",
    "random_range",
    "gen_samples",
    "save_dataset",
    "load_dataset",
]

_MAGIC = b"CFVD"
_VERSION = 1


class DependencyError(RuntimeError):
    """A round's data generation needs the value function of the round
    below it (the final round trains first)."""


# ─── Dataset container ───────────────────────────────────────────────────────


@dataclass
class Dataset:
    """Fixed-width sample arrays for one round's network."""

    round: int
    buckets: int
    inputs: np.ndarray   # (count, 2B+1) float32
    targets: np.ndarray  # (count, 2B) float32

    def __len__(self) -> int:
        return len(self.inputs)


# ─── Random subgame ingredients ──────────────────────────────────────────────


def random_range(rng: np.random.Generator, live: np.ndarray) -> np.ndarray:
    """Random hand distribution by recursive mass splitting: the live
    hands are shuffled, then total mass 1 is divided by repeated uniform
    two-way splits down to single hands (produces everything from near
    point masses to near uniform)."""
    idx = np.flatnonzero(live)
    rng.shuffle(idx)
    out = np.zeros(len(live))

    def split(mass: float, lo: int, hi: int) -> None:
        if hi - lo == 1:
            out[idx[lo]] = mass
            return
        mid = (lo + hi) // 2
        p = rng.uniform()
        split(mass * p, lo, mid)
        split(mass * (1.0 - p), mid, hi)

    split(1.0, 0, len(idx))
    return out


def _random_board(rng: np.random.Generator, spec: GameSpec,
                  rnd: int) -> tuple[int, ...]:
    size = sum(spec.board_cards[: rnd + 1])
    if size == 0:
        return ()
    cards = rng.choice(len(spec.deck), size=size, replace=False)
    return tuple(sorted(spec.deck[c] for c in cards))


def _random_pot(rng: np.random.Generator, spec: GameSpec) -> int:
    lo, hi = spec.big_blind, spec.stack
    c = int(round(np.exp(rng.uniform(np.log(lo), np.log(hi + 0.5)))))
    return 2 * min(max(c, lo), hi)


# ─── Generation ──────────────────────────────────────────────────────────────


def gen_samples(spec: GameSpec, rnd: int, count: int, bmap: BucketMap, *,
                budget: int = 1000, value_fn=None,
                schedule: Optional[Schedule] = None,
                seed: int = 0,
                hands: Optional[HandSpace] = None) -> Dataset:
    """Solve ``count`` random round-``rnd`` subgames and emit samples.

    ``value_fn`` evaluates the next round's states at the lookahead
    boundary and is required for every round except the last.
    """
    if rnd < spec.num_rounds - 1 and value_fn is None:
        raise DependencyError(
            f"round {rnd} needs the round-{rnd + 1} value function "
            f"(the final round generates first)")
    hands = hands or bmap.hands
    game = PokerGame(spec)
    schedule = schedule or dcfr_plus()
    act = spec.first_to_act[rnd]
    leaf = rnd + 1 if rnd < spec.num_rounds - 1 else None
    b = bmap.buckets
    inputs = np.empty((count, 2 * b + 1), dtype=np.float32)
    targets = np.empty((count, 2 * b), dtype=np.float32)
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        board = _random_board(rng, spec, rnd)
        pot = _random_pot(rng, spec)
        live = hands.live_mask(board) > 0
        ranges = (random_range(rng, live), random_range(rng, live))
        root = round_start_history(spec, board, pot)
        tree = build_tree(game, root, hands, leaf_round=leaf)
        solver = FlatSolver(tree, schedule, r0=ranges[0], r1=ranges[1],
                            value_fn=value_fn)
        solver.solve(budget)
        cfv0, cfv1 = solver.evaluate()
        assign = bmap.assignment(board)
        va = _bucket_values(cfv0[0] if act == 0 else cfv1[0],
                            ranges[act], assign, b) / pot
        vb = _bucket_values(cfv1[0] if act == 0 else cfv0[0],
                            ranges[1 - act], assign, b) / pot
        inputs[i] = encode(ranges[act], ranges[1 - act], pot, board, bmap)
        targets[i, :b] = va
        targets[i, b:] = vb
    return Dataset(round=rnd, buckets=b, inputs=inputs, targets=targets)


def _bucket_values(cfv: np.ndarray, range_vec: np.ndarray,
                   assign: np.ndarray, buckets: int) -> np.ndarray:
    """Range-weighted mean hand value per bucket (0 where massless)."""
    live = assign >= 0
    num = np.zeros(buckets)
    den = np.zeros(buckets)
    np.add.at(num, assign[live], (range_vec * cfv)[live])
    np.add.at(den, assign[live], range_vec[live])
    return np.divide(num, den, out=np.zeros(buckets), where=den > 0.0)


# ─── Serialization ───────────────────────────────────────────────────────────


def save_dataset(ds: Dataset, path) -> None:
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<IBIQ", _VERSION, ds.round, ds.buckets,
                            len(ds.inputs)))
        rows = np.hstack([ds.inputs, ds.targets]).astype("<f4")
        f.write(np.ascontiguousarray(rows).tobytes())


def load_dataset(path) -> Dataset:
    with open(path, "rb") as f:
        if f.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a dataset file")
        version, rnd, b, count = struct.unpack("<IBIQ", f.read(17))
        if version != _VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        width = (2 * b + 1) + 2 * b
        rows = np.frombuffer(f.read(4 * width * count), dtype="<f4")
        rows = rows.reshape(count, width).astype(np.float32)
    return Dataset(round=rnd, buckets=b, inputs=rows[:, : 2 * b + 1],
                   targets=rows[:, 2 * b + 1:])
