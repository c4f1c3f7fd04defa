"""Rules engines for heads-up poker games: Kuhn, Leduc, and no-limit hold'em.

The engine is a single sequential-game implementation parameterised by
:class:`GameSpec`.  Histories are immutable values; ``apply`` returns a new
history and never mutates.  Chance (card dealing) appears as explicit chance
nodes so solvers can either enumerate outcomes or sample them.

Conventions
-----------
* Player 0 posts the small blind and acts first on round 0; later rounds
  start with the player configured in ``first_to_act`` (player 1 for
  hold'em post-flop streets).
* Antes (Kuhn/Leduc) are modelled as equal blinds posted before the first
  action.
* A betting round ends when a player calls after the other player has
  already called or raised in that round.  A first-action call (limp or
  check) therefore keeps the round open.
* Raises are expressed as "raise to" totals.  A raise must increase the
  caller's total by at least ``max(min_raise_floor, last raise increment)``
  except that moving all-in is always allowed.  Fold is legal only when
  facing a positive call amount.
* On a fold the winner collects the folder's committed chips (the uncalled
  balance of a bet is returned).  Showdown compares hand ranks; ties split.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations, permutations
from typing import Iterator, NamedTuple, Optional, Sequence

import numpy as np

from .cards import (
    NUM_CARDS,
    card_rank,
    evaluate7,
    format_card,
    format_cards,
    make_card,
)

CHANCE = -1
TERMINAL = -2

FOLD = "f"
CALL = "c"
RAISE = "r"
DEAL = "d"


class Action(NamedTuple):
    """A game action: fold, call/check, raise-to, or a chance deal."""

    kind: str
    amount: int = 0
    cards: tuple[int, ...] = ()

    def __str__(self) -> str:
        if self.kind == RAISE:
            return f"r{self.amount}"
        if self.kind == DEAL:
            return "d:" + "".join(format_card(c) for c in self.cards)
        return self.kind


Fold = Action(FOLD)
Call = Action(CALL)


def raise_to(amount: int) -> Action:
    return Action(RAISE, amount)


def parse_action(text: str) -> Action:
    """Parse the wire form of an action: "f", "c", or "r<total>"."""
    text = text.strip().lower()
    if text == "f":
        return Fold
    if text in ("c", "k"):
        return Call
    if text.startswith("r") and text[1:].isdigit():
        return raise_to(int(text[1:]))
    raise ValueError(f"bad action {text!r}")


@dataclass(frozen=True)
class GameSpec:
    """Static rules configuration for one game variant.

    Attributes:
        variant: "kuhn", "leduc", or "hunl".
        num_rounds: betting rounds in the game.
        stack: chips per player at the start of a hand (maximum total
            commitment for the limit games).
        small_blind / big_blind: forced bets for player 0 / player 1; the
            limit games post equal antes through these fields.
        min_raise_floor: minimum raise increment (no-limit only).
        bet_sizes: fixed wager size per round for limit games, else ().
        max_raises: per-round cap on bets/raises for limit games, else ().
        board_cards: cards revealed at the start of each round.
        first_to_act: player opening each betting round.
        private_cards: hole cards per player.
        deck: card ids in play.
    """

    variant: str
    num_rounds: int
    stack: int
    small_blind: int
    big_blind: int
    min_raise_floor: int = 0
    bet_sizes: tuple[int, ...] = ()
    max_raises: tuple[int, ...] = ()
    board_cards: tuple[int, ...] = (0,)
    first_to_act: tuple[int, ...] = (0,)
    private_cards: int = 1
    deck: tuple[int, ...] = ()

    @property
    def is_limit(self) -> bool:
        return bool(self.bet_sizes)

    def round_name(self, rnd: int) -> str:
        if self.variant == "hunl":
            return ("preflop", "flop", "turn", "river")[rnd]
        return f"round{rnd}"

    def round_index(self, name: str) -> int:
        if name.isdigit():
            return int(name)
        if self.variant == "hunl":
            return ("preflop", "flop", "turn", "river").index(name)
        if name.startswith("round"):
            return int(name[len("round"):])
        raise ValueError(f"unknown round {name!r} for {self.variant}")


def kuhn_spec() -> GameSpec:
    # Three one-suit cards J, Q, K; 1-chip ante; a single 1-chip bet round.
    deck = tuple(make_card(r, 0) for r in (11, 12, 13))
    return GameSpec(
        variant="kuhn",
        num_rounds=1,
        stack=2,
        small_blind=1,
        big_blind=1,
        bet_sizes=(1,),
        max_raises=(1,),
        board_cards=(0,),
        first_to_act=(0,),
        private_cards=1,
        deck=deck,
    )


def leduc_spec(max_raises: int = 2) -> GameSpec:
    # Six cards (J, Q, K in two suits); 1-chip ante; wagers 2 then 4 with one
    # board card between the rounds.
    deck = tuple(make_card(r, s) for r in (11, 12, 13) for s in (0, 1))
    cap = 1 + max_raises * (2 + 4)  # ante plus full raise wars both rounds
    return GameSpec(
        variant="leduc",
        num_rounds=2,
        stack=cap,
        small_blind=1,
        big_blind=1,
        bet_sizes=(2, 4),
        max_raises=(max_raises, max_raises),
        board_cards=(0, 1),
        first_to_act=(0, 0),
        private_cards=1,
        deck=deck,
    )


def hunl_spec(stack: int = 20000, small_blind: int = 50, big_blind: int = 100) -> GameSpec:
    return GameSpec(
        variant="hunl",
        num_rounds=4,
        stack=stack,
        small_blind=small_blind,
        big_blind=big_blind,
        min_raise_floor=big_blind,
        board_cards=(0, 3, 1, 1),
        first_to_act=(0, 1, 1, 1),
        private_cards=2,
        deck=tuple(range(NUM_CARDS)),
    )


def game_spec(variant: str) -> GameSpec:
    try:
        return {"kuhn": kuhn_spec, "leduc": leduc_spec, "hunl": hunl_spec}[variant]()
    except KeyError:
        raise ValueError(f"unknown variant {variant!r}") from None


@dataclass(frozen=True)
class History:
    """One game state.  ``private`` is None for the public view.

    ``to_act`` is a player index, CHANCE when board cards are owed, or
    TERMINAL.  ``actions`` holds per-round player actions (deals excluded).
    """

    private: Optional[tuple[tuple[int, ...], tuple[int, ...]]]
    board: tuple[int, ...]
    round: int
    actions: tuple[tuple[Action, ...], ...]
    committed: tuple[int, int]
    to_act: int
    last_raise: int = 0
    raises_this_round: int = 0
    folder: Optional[int] = None

    @property
    def pot(self) -> int:
        return self.committed[0] + self.committed[1]

    def betting_string(self) -> str:
        return "/".join("".join(str(a) for a in rnd) for rnd in self.actions)

    def strip_private(self) -> "History":
        return replace(self, private=None)

    def __str__(self) -> str:
        cards = "?" if self.private is None else (
            format_cards(self.private[0]) + " vs " + format_cards(self.private[1]))
        return (f"[{cards} | board {format_cards(self.board) or '-'} | "
                f"{self.betting_string()} | pot {self.pot} | to_act {self.to_act}]")


class PokerGame:
    """Pure-function rules engine over :class:`History` values."""

    def __init__(self, spec: GameSpec):
        self.spec = spec

    # ── dealing ──────────────────────────────────────────────────────────

    def initial_history(
        self, private: Optional[tuple[tuple[int, ...], tuple[int, ...]]] = None
    ) -> History:
        s = self.spec
        return History(
            private=private,
            board=(),
            round=0,
            actions=((),),
            committed=(s.small_blind, s.big_blind),
            to_act=s.first_to_act[0],
        )

    def deals(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        """All ordered private deals (enumerable variants only)."""
        s = self.spec
        if s.private_cards != 1:
            raise ValueError("deal enumeration supported for single-card games")
        return [((a,), (b,)) for a, b in permutations(s.deck, 2)]

    def deal_histories(self) -> list[tuple[History, float]]:
        ds = self.deals()
        p = 1.0 / len(ds)
        return [(self.initial_history(d), p) for d in ds]

    # ── state tests ──────────────────────────────────────────────────────

    def is_terminal(self, h: History) -> bool:
        return h.to_act == TERMINAL

    def is_chance(self, h: History) -> bool:
        return h.to_act == CHANCE

    def current_player(self, h: History) -> int:
        return h.to_act

    # ── actions ──────────────────────────────────────────────────────────

    def call_amount(self, h: History) -> int:
        return max(h.committed) - h.committed[h.to_act]

    def raise_bounds(self, h: History) -> Optional[tuple[int, int]]:
        """(min, max) legal raise-to totals, or None when raising is barred."""
        s = self.spec
        cl = max(h.committed)
        if s.is_limit:
            if h.raises_this_round >= s.max_raises[h.round]:
                return None
            target = cl + s.bet_sizes[h.round]
            if target > s.stack:
                return None
            return (target, target)
        if cl >= s.stack or min(h.committed) >= s.stack:
            return None  # someone is all-in
        lo = cl + max(s.min_raise_floor, h.last_raise)
        return (min(lo, s.stack), s.stack)

    def legal_actions(self, h: History) -> tuple[Action, ...]:
        if h.to_act in (CHANCE, TERMINAL):
            raise ValueError("no player actions at chance/terminal node")
        out: list[Action] = []
        if self.call_amount(h) > 0:
            out.append(Fold)
        out.append(Call)
        bounds = self.raise_bounds(h)
        if bounds is not None:
            lo, hi = bounds
            out.extend(raise_to(t) for t in range(lo, hi + 1))
        return tuple(out)

    def is_legal(self, h: History, a: Action) -> bool:
        if a.kind == FOLD:
            return self.call_amount(h) > 0
        if a.kind == CALL:
            return True
        if a.kind == RAISE:
            bounds = self.raise_bounds(h)
            return bounds is not None and bounds[0] <= a.amount <= bounds[1]
        return False

    # ── transitions ──────────────────────────────────────────────────────

    def apply(self, h: History, a: Action) -> History:
        if a.kind == DEAL:
            return self._apply_deal(h, a.cards)
        if h.to_act in (CHANCE, TERMINAL):
            raise ValueError(f"cannot act at {h}")
        if not self.is_legal(h, a):
            raise ValueError(f"illegal action {a} at {h}")
        p = h.to_act
        rnd_actions = h.actions[h.round]
        new_actions = h.actions[:h.round] + (rnd_actions + (a,),)

        if a.kind == FOLD:
            return replace(h, actions=new_actions, to_act=TERMINAL, folder=p)

        if a.kind == CALL:
            committed = list(h.committed)
            committed[p] = max(h.committed)
            closes = bool(rnd_actions) and rnd_actions[-1].kind in (CALL, RAISE)
            nh = replace(
                h,
                actions=new_actions,
                committed=(committed[0], committed[1]),
                to_act=1 - p,
            )
            if closes:
                return self._end_round(nh)
            return nh

        # Raise to a.amount.
        cl = max(h.committed)
        committed = list(h.committed)
        committed[p] = a.amount
        return replace(
            h,
            actions=new_actions,
            committed=(committed[0], committed[1]),
            to_act=1 - p,
            last_raise=a.amount - cl,
            raises_this_round=h.raises_this_round + 1,
        )

    def _end_round(self, h: History) -> History:
        if h.round + 1 >= self.spec.num_rounds:
            return replace(h, to_act=TERMINAL)
        return replace(h, to_act=CHANCE)

    def _apply_deal(self, h: History, cards: tuple[int, ...]) -> History:
        if h.to_act != CHANCE:
            raise ValueError("deal applied at non-chance node")
        s = self.spec
        rnd = h.round + 1
        need = s.board_cards[rnd]
        if len(cards) != need:
            raise ValueError(f"round {rnd} deals {need} cards, got {len(cards)}")
        nh = replace(
            h,
            board=h.board + tuple(sorted(cards)),
            round=rnd,
            actions=h.actions + ((),),
            last_raise=0,
            raises_this_round=0,
            to_act=s.first_to_act[rnd],
        )
        if not s.is_limit and min(nh.committed) >= s.stack:
            # Both all-in: no betting; run out the board or show down.
            end = TERMINAL if rnd + 1 >= s.num_rounds else CHANCE
            return replace(nh, to_act=end)
        return nh

    def chance_outcomes(self, h: History) -> list[tuple[Action, float]]:
        """Enumerate next-round deals.  With private cards on the history the
        dealer's view excludes them; the public view excludes only the board."""
        if h.to_act != CHANCE:
            raise ValueError("chance_outcomes at non-chance node")
        s = self.spec
        used = set(h.board)
        if h.private is not None:
            used.update(h.private[0])
            used.update(h.private[1])
        avail = [c for c in s.deck if c not in used]
        k = s.board_cards[h.round + 1]
        combos = list(combinations(avail, k))
        p = 1.0 / len(combos)
        return [(Action(DEAL, cards=c), p) for c in combos]

    def sample_deal(self, h: History, rng: np.random.Generator) -> Action:
        outs = self.chance_outcomes(h)
        return outs[rng.integers(len(outs))][0]

    # ── terminal values ──────────────────────────────────────────────────

    def showdown_rank(self, private: Sequence[int], board: Sequence[int]) -> int:
        """Comparable hand strength for one player; larger wins."""
        v = self.spec.variant
        if v == "kuhn":
            return card_rank(private[0])
        if v == "leduc":
            paired = card_rank(private[0]) in {card_rank(b) for b in board}
            return (16 if paired else 0) + card_rank(private[0])
        return evaluate7(tuple(private) + tuple(board))

    def utility(self, h: History) -> tuple[float, float]:
        if h.to_act != TERMINAL:
            raise ValueError("utility of non-terminal")
        if h.folder is not None:
            lose = h.committed[h.folder]
            return (lose, -lose) if h.folder == 1 else (-lose, lose)
        if h.private is None:
            raise ValueError("showdown utility needs private cards")
        r0 = self.showdown_rank(h.private[0], h.board)
        r1 = self.showdown_rank(h.private[1], h.board)
        stake = min(h.committed)
        if r0 > r1:
            return (float(stake), -float(stake))
        if r1 > r0:
            return (-float(stake), float(stake))
        return (0.0, 0.0)

    # ── information sets ─────────────────────────────────────────────────

    def infostate_key(self, h: History, player: Optional[int] = None) -> tuple:
        p = h.to_act if player is None else player
        if h.private is None:
            raise ValueError("infostate key needs private cards")
        return (p, tuple(sorted(h.private[p])), h.board, h.betting_string())

    # ── traversal helpers ────────────────────────────────────────────────

    def walk(self, h: History) -> Iterator[History]:
        """Depth-first enumeration of the full subtree (enumerable games)."""
        yield h
        if h.to_act == TERMINAL:
            return
        if h.to_act == CHANCE:
            for a, _ in self.chance_outcomes(h):
                yield from self.walk(self.apply(h, a))
        else:
            for a in self.legal_actions(h):
                yield from self.walk(self.apply(h, a))


class MatrixGame:
    """A one-shot simultaneous matrix game in extensive form.

    Player 0 moves, then player 1 moves without observing player 0 (both of
    player 1's histories share one infostate key).  Used for sanity games
    such as rock-paper-scissors.
    """

    def __init__(self, payoffs: np.ndarray, labels: Optional[Sequence[str]] = None):
        self.payoffs = np.asarray(payoffs, dtype=np.float64)
        n, m = self.payoffs.shape
        self.labels = list(labels) if labels else [str(i) for i in range(max(n, m))]

    def deal_histories(self):
        return [((), 1.0)]

    def is_terminal(self, h) -> bool:
        return len(h) == 2

    def is_chance(self, h) -> bool:
        return False

    def current_player(self, h) -> int:
        return len(h)

    def legal_actions(self, h) -> tuple[Action, ...]:
        n = self.payoffs.shape[len(h)]
        return tuple(Action(RAISE, i) for i in range(n))

    def apply(self, h, a: Action):
        return h + (a.amount,)

    def utility(self, h) -> tuple[float, float]:
        u = float(self.payoffs[h[0], h[1]])
        return (u, -u)

    def infostate_key(self, h, player: Optional[int] = None) -> tuple:
        p = len(h) if player is None else player
        return (p,)  # neither player observes anything before moving


def rock_paper_scissors() -> MatrixGame:
    wins = np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])
    return MatrixGame(wins, labels=["rock", "paper", "scissors"])
