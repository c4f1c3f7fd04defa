"""Cards and poker hand evaluation.

Cards are small integers ``id = (rank - 2) * 4 + suit`` with ranks 2..14
(deuce to ace) and suits 0..3 in the fixed order clubs, diamonds, hearts,
spades.  String notation is rank char + suit char, e.g. ``"As"``, ``"Td"``.

Hand evaluation
---------------
``evaluate5`` scores an exact five-card hand as a single integer ordinal:
greater means stronger, equal means the hands tie.  The ordinal packs the
category and the five tie-break ranks, so two hands compare equal exactly
when they are suit-equivalent.  ``evaluate7`` is the best five-card score
over all 21 subsets of seven cards.  ``rank7_batch`` is a vectorised
seven-card evaluator producing identical ordinals to ``evaluate7``; the
scalar route is kept as its correctness oracle.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

import numpy as np

RANK_CHARS = "23456789TJQKA"
SUIT_CHARS = "cdhs"

NUM_CARDS = 52

# Hand categories, low to high.
HIGH_CARD = 0
ONE_PAIR = 1
TWO_PAIR = 2
TRIPS = 3
STRAIGHT = 4
FLUSH = 5
FULL_HOUSE = 6
QUADS = 7
STRAIGHT_FLUSH = 8


class Card(NamedTuple):
    """A playing card as (rank, suit); rank 2..14, suit 0..3."""

    rank: int
    suit: int

    @property
    def id(self) -> int:
        return (self.rank - 2) * 4 + self.suit

    def __str__(self) -> str:
        return RANK_CHARS[self.rank - 2] + SUIT_CHARS[self.suit]


def card_rank(cid: int) -> int:
    return cid // 4 + 2


def card_suit(cid: int) -> int:
    return cid % 4


def make_card(rank: int, suit: int) -> int:
    return (rank - 2) * 4 + suit


def card_from_id(cid: int) -> Card:
    return Card(card_rank(cid), card_suit(cid))


def parse_card(text: str) -> int:
    """Parse a two-character card string such as "As" into a card id."""
    text = text.strip()
    if len(text) != 2:
        raise ValueError(f"bad card {text!r}")
    r = RANK_CHARS.find(text[0].upper())
    s = SUIT_CHARS.find(text[1].lower())
    if r < 0 or s < 0:
        raise ValueError(f"bad card {text!r}")
    return r * 4 + s


def format_card(cid: int) -> str:
    return RANK_CHARS[cid // 4] + SUIT_CHARS[cid % 4]


def parse_cards(text: str) -> tuple[int, ...]:
    """Parse whitespace- or comma-separated cards ("As Td" or "As,Td")."""
    parts = text.replace(",", " ").split()
    return tuple(parse_card(p) for p in parts)


def format_cards(cids: Iterable[int]) -> str:
    return " ".join(format_card(c) for c in cids)


def full_deck() -> tuple[int, ...]:
    return tuple(range(NUM_CARDS))


# ─── Five-card evaluation ───────────────────────────────────────────────────


def _pack(category: int, ranks: Sequence[int]) -> int:
    # Five 4-bit tie-break slots below the category; unused slots stay 0.
    v = category
    padded = list(ranks) + [0] * (5 - len(ranks))
    for r in padded:
        v = (v << 4) | r
    return v


def _straight_high(rankset: int) -> int:
    """High card of a straight within a rank bitmask (bit r set = rank r
    present), 0 if none.  The wheel A-5 counts with high card 5."""
    m = int(rankset)
    # Bit r of run set means ranks r..r+4 are all present.
    run = m & (m >> 1) & (m >> 2) & (m >> 3) & (m >> 4)
    if run:
        return run.bit_length() - 1 + 4
    wheel = (1 << 14) | (1 << 2) | (1 << 3) | (1 << 4) | (1 << 5)
    if m & wheel == wheel:
        return 5
    return 0


def evaluate5(cards: Sequence[int]) -> int:
    """Score an exact five-card hand; greater ordinal = stronger hand."""
    if len(cards) != 5:
        raise ValueError("evaluate5 needs exactly five cards")
    ranks = sorted((int(c) // 4 + 2 for c in cards), reverse=True)
    suits = [int(c) % 4 for c in cards]
    counts: dict[int, int] = {}
    for r in ranks:
        counts[r] = counts.get(r, 0) + 1
    # Group ranks by multiplicity, then by rank, both descending.
    by_count = sorted(counts.items(), key=lambda kv: (kv[1], kv[0]), reverse=True)
    shape = tuple(n for _, n in by_count)

    flush = len(set(suits)) == 1
    rankset = 0
    for r in counts:
        rankset |= 1 << r
    shigh = _straight_high(rankset) if len(counts) == 5 else 0

    if shape == (4, 1):
        return _pack(QUADS, [by_count[0][0], by_count[1][0]])
    if shape == (3, 2):
        return _pack(FULL_HOUSE, [by_count[0][0], by_count[1][0]])
    if flush and shigh:
        return _pack(STRAIGHT_FLUSH, [shigh])
    if flush:
        return _pack(FLUSH, ranks)
    if shigh:
        return _pack(STRAIGHT, [shigh])
    if shape == (3, 1, 1):
        return _pack(TRIPS, [by_count[0][0], by_count[1][0], by_count[2][0]])
    if shape == (2, 2, 1):
        return _pack(TWO_PAIR, [by_count[0][0], by_count[1][0], by_count[2][0]])
    if shape == (2, 1, 1, 1):
        return _pack(ONE_PAIR, [by_count[0][0]] + [r for r, _ in by_count[1:]])
    return _pack(HIGH_CARD, ranks)


def evaluate7(cards: Sequence[int]) -> int:
    """Best five-card score over all 21 five-card subsets of seven cards."""
    if len(cards) != 7:
        raise ValueError("evaluate7 needs exactly seven cards")
    return max(evaluate5(combo) for combo in combinations(cards, 5))


# ─── Vectorised seven-card evaluation ───────────────────────────────────────


def _top_k_ranks(avail: np.ndarray, k: int) -> np.ndarray:
    """Per row, the k highest set ranks of a (n, 15) presence mask, descending.

    Rows with fewer than k set bits pad with 0 (callers never rely on pads).
    """
    n = avail.shape[0]
    out = np.zeros((n, k), dtype=np.int64)
    work = avail.copy()
    idx = np.arange(15)
    for j in range(k):
        best = np.where(work.any(axis=1), np.argmax(work * idx, axis=1), 0)
        out[:, j] = best
        work[np.arange(n), best] = False
    return out


def _straight_high_vec(rankset: np.ndarray) -> np.ndarray:
    """Vector version of _straight_high on int bitmask arrays."""
    m = rankset
    run = m & (m >> 1) & (m >> 2) & (m >> 3) & (m >> 4)
    high = np.zeros_like(m)
    # Bit r of run set means ranks r..r+4 are all present (high card r + 4).
    for r in range(10, 1, -1):
        hit = (run >> r) & 1
        high = np.where((high == 0) & (hit == 1), r + 4, high)
    wheel = (1 << 14) | (1 << 2) | (1 << 3) | (1 << 4) | (1 << 5)
    high = np.where((high == 0) & ((m & wheel) == wheel), 5, high)
    return high


def rank7_batch(cards: np.ndarray) -> np.ndarray:
    """Evaluate rows of seven card ids; returns int64 ordinals equal to
    ``evaluate7`` row by row."""
    cards = np.asarray(cards, dtype=np.int64)
    if cards.ndim != 2 or cards.shape[1] != 7:
        raise ValueError("rank7_batch expects shape (n, 7)")
    n = cards.shape[0]
    ranks = cards // 4 + 2
    suits = cards % 4

    rows = np.repeat(np.arange(n), 7)
    counts = np.zeros((n, 15), dtype=np.int64)
    np.add.at(counts, (rows, ranks.ravel()), 1)
    suit_counts = np.zeros((n, 4), dtype=np.int64)
    np.add.at(suit_counts, (rows, suits.ravel()), 1)
    # Rank presence per suit, as (n, 4, 15).
    suit_has = np.zeros((n, 4, 15), dtype=bool)
    suit_has[rows, suits.ravel(), ranks.ravel()] = True

    has = counts > 0
    rankset = (has.astype(np.int64) << np.arange(15)).sum(axis=1)

    flush_suit = np.argmax(suit_counts, axis=1)
    is_flush = suit_counts[np.arange(n), flush_suit] >= 5
    flush_has = suit_has[np.arange(n), flush_suit] & is_flush[:, None]
    flush_set = (flush_has.astype(np.int64) << np.arange(15)).sum(axis=1)

    sf_high = _straight_high_vec(flush_set)
    st_high = _straight_high_vec(rankset)

    # Count-class rank extraction (descending rank within each class).
    def top_of(mask: np.ndarray, k: int) -> np.ndarray:
        return _top_k_ranks(mask, k)

    quad_r = top_of(counts == 4, 1)[:, 0]
    trip2 = top_of(counts == 3, 2)          # up to two trip ranks in 7 cards
    pair3 = top_of(counts == 2, 3)          # up to three pair ranks
    trip_r = trip2[:, 0]
    has_quads = quad_r > 0
    has_trips = trip_r > 0
    # Full house: trips + (second trips or best pair).
    fh_pair = np.maximum(trip2[:, 1], pair3[:, 0])
    has_fh = has_trips & (fh_pair > 0)
    npairs = (counts == 2).sum(axis=1)

    out = np.zeros(n, dtype=np.int64)

    def pack_vec(cat: int, cols: list[np.ndarray]) -> np.ndarray:
        v = np.full(n, cat, dtype=np.int64)
        padded = cols + [np.zeros(n, dtype=np.int64)] * (5 - len(cols))
        for c in padded:
            v = (v << 4) | c
        return v

    # Straight flush
    sel = sf_high > 0
    out = np.where(sel, pack_vec(STRAIGHT_FLUSH, [sf_high]), out)

    # Quads: kicker is the best remaining rank.
    kick_mask = has.copy()
    kick_mask[np.arange(n), quad_r] = False
    quad_kick = top_of(kick_mask, 1)[:, 0]
    sel = (out == 0) & has_quads
    out = np.where(sel, pack_vec(QUADS, [quad_r, quad_kick]), out)

    sel = (out == 0) & has_fh
    out = np.where(sel, pack_vec(FULL_HOUSE, [trip_r, fh_pair]), out)

    flush_top = top_of(flush_has, 5)
    sel = (out == 0) & is_flush
    out = np.where(sel, pack_vec(FLUSH, [flush_top[:, j] for j in range(5)]), out)

    sel = (out == 0) & (st_high > 0)
    out = np.where(sel, pack_vec(STRAIGHT, [st_high]), out)

    trip_kick = has.copy()
    trip_kick[np.arange(n), trip_r] = False
    tk = top_of(trip_kick, 2)
    sel = (out == 0) & has_trips
    out = np.where(sel, pack_vec(TRIPS, [trip_r, tk[:, 0], tk[:, 1]]), out)

    # Two pair: top two pairs; kicker may be the third pair's rank.
    tp_kick = has.copy()
    tp_kick[np.arange(n), pair3[:, 0]] = False
    tp_kick[np.arange(n), np.maximum(pair3[:, 1], 0)] = False
    tpk = top_of(tp_kick, 1)[:, 0]
    sel = (out == 0) & (npairs >= 2)
    out = np.where(sel, pack_vec(TWO_PAIR, [pair3[:, 0], pair3[:, 1], tpk]), out)

    pair_kick = has.copy()
    pair_kick[np.arange(n), pair3[:, 0]] = False
    pk = top_of(pair_kick, 3)
    sel = (out == 0) & (npairs == 1)
    out = np.where(
        sel, pack_vec(ONE_PAIR, [pair3[:, 0], pk[:, 0], pk[:, 1], pk[:, 2]]), out
    )

    hc = top_of(has, 5)
    sel = out == 0
    out = np.where(sel, pack_vec(HIGH_CARD, [hc[:, j] for j in range(5)]), out)
    return out
