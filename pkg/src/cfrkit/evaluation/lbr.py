"""Local best response: a greedy exploiter with oracle policy access.

LBR maintains the evaluated agent's range by Bayes' rule from that agent's
*average policy* (granted to it directly), and at each of its decisions
picks the action with the best immediate expected value under the
assumption that everyone checks/calls to showdown.  The default action set
is fold/call; raises can be enabled, scored by the same rollout
assumption.  LBR's winnings lower-bound the evaluated agent's
exploitability, so it can never beat a near-equilibrium policy by more
than that policy's best-response gap.
"""

from __future__ import annotations

from itertools import combinations
from typing import Optional

import numpy as np

from ..cfr.tabular import TabularProfile
from ..games import Action, Call, Fold, GameSpec, PokerGame, RAISE
from ..hands import HandSpace
from .agents import Agent, Observation

__all__ = ["LBRAgent", "showdown_win_probability"]


def showdown_win_probability(game: PokerGame, hands: HandSpace,
                             my_cards: tuple[int, ...], board: tuple,
                             opp_range: np.ndarray) -> float:
    """Win probability (ties half) versus ``opp_range``, averaged over an
    exhaustive enumeration of the remaining board cards."""
    spec = game.spec
    need = sum(spec.board_cards) - len(board)
    known = set(board) | set(my_cards)
    pool = [c for c in spec.deck if c not in known]
    completions = (list(combinations(pool, need)) if need else [()])
    total_w = 0.0
    total_mass = 0.0
    for extra in completions:
        full = tuple(board) + tuple(extra)
        ranks = hands.showdown_ranks(full)
        mine = game.showdown_rank(my_cards, full)
        live = (ranks >= 0) & (opp_range > 0.0)
        # Hands holding a dealt board card are dead in this continuation.
        mass = float(opp_range[live].sum())
        if mass <= 0.0:
            continue
        w = float(opp_range[live] @ ((mine > ranks[live]) +
                                     0.5 * (mine == ranks[live])))
        total_w += w
        total_mass += mass
    if total_mass <= 0.0:
        raise ValueError("opponent range is empty")
    return total_w / total_mass


class LBRAgent(Agent):
    """Greedy local best response against a known average policy."""

    def __init__(self, spec: GameSpec, profile: TabularProfile, *,
                 hands: Optional[HandSpace] = None,
                 use_raises: bool = False) -> None:
        self.spec = spec
        self.game = PokerGame(spec)
        self.hands = hands or HandSpace(spec)
        self.profile = profile
        self.use_raises = use_raises
        self._range: Optional[np.ndarray] = None
        self._seat = 0
        self._cards: tuple[int, ...] = ()

    # ── range tracking ───────────────────────────────────────────────────

    def _blockers(self, cards) -> np.ndarray:
        cs = set(cards)
        return np.fromiter((0.0 if cs & set(h) else 1.0
                            for h in self.hands.hands), float, self.hands.n)

    def notify(self, event: tuple) -> None:
        kind = event[0]
        if kind == "hand_start":
            _, self._seat, self._cards = event
            self._range = (self.hands.uniform_range()
                           * self._blockers(self._cards))
            self._range /= self._range.sum()
            self._history = self.game.initial_history()
        elif kind == "opp_action":
            action = event[1]
            legal = self.game.legal_actions(self._history)
            idx = legal.index(action)
            opp = 1 - self._seat
            h = self._history
            for i, hand in enumerate(self.hands.hands):
                if self._range[i] <= 0.0:
                    continue
                key = (opp, hand, h.board, h.betting_string())
                self._range[i] *= self.profile.strategy(key, len(legal))[idx]
            self._history = self.game.apply(h, action)
        elif kind == "chance":
            cards = event[1]
            self._range = self._range * self._blockers(cards)
            self._history = self.game.apply(
                self._history, Action("d", cards=tuple(cards)))
        elif kind == "own_action":
            self._history = self.game.apply(self._history, event[1])

    # ── greedy EV decision ───────────────────────────────────────────────

    def act(self, obs: Observation) -> Action:
        h = obs.history
        if self._range is None or self._range.sum() <= 0.0:
            raise ValueError("opponent range is empty")
        rho = showdown_win_probability(self.game, self.hands, self._cards,
                                       h.board, self._range)
        c = self.game.call_amount(h)
        pot = h.pot
        ev_call = rho * (pot + c) - c
        best, best_ev = Call, ev_call
        if Fold in obs.legal and 0.0 > best_ev:
            best, best_ev = Fold, 0.0
        if self.use_raises:
            for a in obs.legal:
                if a.kind != RAISE:
                    continue
                add = a.amount - h.committed[obs.seat]
                ev = rho * (pot + add) - add
                if ev > best_ev:
                    best, best_ev = a, ev
        self.notify(("own_action", best))
        return best
