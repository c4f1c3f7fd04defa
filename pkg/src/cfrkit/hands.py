"""Private-hand spaces: enumeration, board masks, and showdown ranks.

A hand space fixes the indexing of per-hand vectors used by the vectorised
solvers: one entry per possible private holding (single cards for Kuhn and
Leduc, all 1,326 two-card combos for hold'em).
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .cards import card_rank, rank7_batch
from .games import GameSpec


class HandSpace:
    """Indexed private holdings for one game spec."""

    def __init__(self, spec: GameSpec):
        self.spec = spec
        if spec.private_cards == 1:
            hands = [(c,) for c in spec.deck]
        else:
            hands = list(combinations(spec.deck, 2))
        self.hands: list[tuple[int, ...]] = hands
        self.n = len(hands)
        self.index = {h: i for i, h in enumerate(hands)}
        # Fixed-width card matrix, -1 padding for single-card hands.
        self.cards = np.full((self.n, 2), -1, dtype=np.int32)
        for i, h in enumerate(hands):
            for j, c in enumerate(h):
                self.cards[i, j] = c

    def lookup(self, cards) -> int:
        return self.index[tuple(sorted(cards))]

    def live_mask(self, board) -> np.ndarray:
        """1.0 for hands not blocked by the board, else 0.0."""
        mask = np.ones(self.n, dtype=np.float64)
        bs = set(board)
        if bs:
            for i, h in enumerate(self.hands):
                if bs.intersection(h):
                    mask[i] = 0.0
        return mask

    def uniform_range(self, board=()) -> np.ndarray:
        mask = self.live_mask(board)
        return mask / mask.sum()

    def deal_correction(self) -> float:
        """K such that uniform ranges r with joint K*r0[h0]*r1[h1] reproduce
        the true probability of each ordered disjoint deal."""
        if self.spec.private_cards == 1:
            return self.n / (self.n - 1.0)
        other = len(list(combinations(range(len(self.spec.deck) - 2), 2)))
        return self.n / float(other)

    def showdown_ranks(self, board) -> np.ndarray:
        """Per-hand showdown strength on a completed board; dead hands get -1."""
        v = self.spec.variant
        live = self.live_mask(board) > 0
        out = np.full(self.n, -1, dtype=np.int64)
        if v == "kuhn":
            for i, h in enumerate(self.hands):
                if live[i]:
                    out[i] = card_rank(h[0])
            return out
        if v == "leduc":
            board_ranks = {card_rank(b) for b in board}
            for i, h in enumerate(self.hands):
                if live[i]:
                    r = card_rank(h[0])
                    out[i] = (16 if r in board_ranks else 0) + r
            return out
        board = tuple(board)
        if len(board) != 5:
            raise ValueError("hold'em showdown needs a 5-card board")
        idx = np.flatnonzero(live)
        rows = np.empty((len(idx), 7), dtype=np.int64)
        rows[:, :2] = self.cards[idx]
        rows[:, 2:] = np.asarray(board, dtype=np.int64)
        out[idx] = rank7_batch(rows)
        return out
