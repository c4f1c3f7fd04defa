"""Preflop policy grid: 13×13 matrix of not-fold probability.

Rows and columns are ranks from ace down to deuce.  Cells above the
diagonal are suited combos (4 each), below it offsuit (12 each), and the
diagonal holds pairs (6 each); each cell averages its member combos'
probability of not folding as the first action of the hand.
"""

from __future__ import annotations

import csv
from itertools import combinations

import numpy as np

from ..cards import card_rank, card_suit
from ..games import Fold, GameSpec, PokerGame
from .agents import Agent, Observation

__all__ = ["preflop_policy_grid", "write_grid", "RANK_LABELS"]

RANK_LABELS = ("A", "K", "Q", "J", "T", "9", "8", "7", "6", "5", "4", "3",
               "2")


def preflop_policy_grid(agent: Agent, spec: GameSpec,
                        seed: int = 0) -> np.ndarray:
    """Average not-fold probability of the opening decision per cell."""
    if spec.private_cards != 2:
        raise ValueError("the 13x13 grid needs two-card private hands")
    game = PokerGame(spec)
    h = game.initial_history()
    legal = game.legal_actions(h)
    fold_idx = legal.index(Fold) if Fold in legal else None
    sums = np.zeros((13, 13))
    counts = np.zeros((13, 13))
    rng = np.random.default_rng(seed)
    for cards in combinations(spec.deck, 2):
        obs = Observation(history=h, seat=h.to_act,
                          cards=tuple(sorted(cards)), legal=legal, rng=rng)
        p = agent.action_probs(obs)
        not_fold = 1.0 - (p[fold_idx] if fold_idx is not None else 0.0)
        hi, lo = sorted((card_rank(cards[0]), card_rank(cards[1])),
                        reverse=True)
        r, c = 14 - hi, 14 - lo  # ace at index 0
        suited = card_suit(cards[0]) == card_suit(cards[1])
        if hi == lo:
            sums[r, c] += not_fold
            counts[r, c] += 1
        elif suited:
            sums[r, c] += not_fold
            counts[r, c] += 1
        else:
            sums[c, r] += not_fold
            counts[c, r] += 1
    out = np.divide(sums, counts, out=np.zeros_like(sums),
                    where=counts > 0)
    return out


def write_grid(grid: np.ndarray, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow([""] + list(RANK_LABELS))
        for i, label in enumerate(RANK_LABELS):
            w.writerow([label] + [f"{grid[i, j]:.4f}" for j in range(13)])
