"""Agent interface for match play, plus reference agents.

An agent sees, at each of its decisions, an :class:`Observation` (public
history, its seat, its private cards, the legal menu, and a per-seat
deterministic RNG stream) and returns an action.  Between decisions the
match runner feeds events through ``notify``: ``("hand_start", seat,
cards)``, ``("opp_action", action)``, ``("chance", cards)``, and
``("hand_end", chips)``.  Agents are stateless across hands except through
those events.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..cfr.tabular import TabularProfile
from ..games import Action, Call, Fold, GameSpec, History, PokerGame
from ..hands import HandSpace
from ..resolving import Resolver

__all__ = [
    "Observation",
    "Agent",
    "AlwaysFold",
    "AlwaysCall",
    "UniformRandom",
    "ProfileAgent",
    "ResolvingAgent",
]


@dataclass(frozen=True)
class Observation:
    """Everything an agent may condition on at one decision."""

    history: History            # public view (no private cards)
    seat: int
    cards: tuple[int, ...]
    legal: tuple[Action, ...]
    rng: np.random.Generator


class Agent:
    """Base agent: subclasses implement ``act``; ``notify`` and
    ``action_probs`` (used by policy introspection such as the preflop
    grid) are optional."""

    def act(self, obs: Observation) -> Action:
        raise NotImplementedError

    def notify(self, event: tuple) -> None:
        pass

    def action_probs(self, obs: Observation) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no "
                                  "queryable policy")


# ─── Reference agents ────────────────────────────────────────────────────────


class AlwaysFold(Agent):
    """Returns fold unconditionally — illegal folds forfeit the hand,
    which is the open-fold convention the match runner scores."""

    def act(self, obs: Observation) -> Action:
        return Fold

    def action_probs(self, obs: Observation) -> np.ndarray:
        p = np.zeros(len(obs.legal))
        p[obs.legal.index(Fold) if Fold in obs.legal else 0] = 1.0
        return p


class AlwaysCall(Agent):
    def act(self, obs: Observation) -> Action:
        return Call

    def action_probs(self, obs: Observation) -> np.ndarray:
        p = np.zeros(len(obs.legal))
        p[obs.legal.index(Call)] = 1.0
        return p


class UniformRandom(Agent):
    def act(self, obs: Observation) -> Action:
        return obs.legal[obs.rng.integers(len(obs.legal))]

    def action_probs(self, obs: Observation) -> np.ndarray:
        return np.full(len(obs.legal), 1.0 / len(obs.legal))


class ProfileAgent(Agent):
    """Plays a fixed tabular average policy (sampled, or argmax)."""

    def __init__(self, profile: TabularProfile, *,
                 argmax: bool = False) -> None:
        self.profile = profile
        self.argmax = argmax

    def action_probs(self, obs: Observation) -> np.ndarray:
        key = (obs.seat, tuple(sorted(obs.cards)), obs.history.board,
               obs.history.betting_string())
        return self.profile.strategy(key, len(obs.legal))

    def act(self, obs: Observation) -> Action:
        p = self.action_probs(obs)
        if self.argmax:
            return obs.legal[int(np.argmax(p))]
        return obs.legal[obs.rng.choice(len(obs.legal), p=p)]


# ─── Continual-resolving agent ───────────────────────────────────────────────


class ResolvingAgent(Agent):
    """Plays by continual resolving, either seat; match events drive the
    resolver's observe calls.  The initial solve per seat is cached and
    reused across hands (resolve states are immutable)."""

    def __init__(self, spec: GameSpec, *, abstraction=None, value_fn=None,
                 config=None, hands: Optional[HandSpace] = None) -> None:
        self.spec = spec
        self.hands = hands or HandSpace(spec)
        self._make = lambda seat: Resolver(
            spec, seat, abstraction=abstraction, value_fn=value_fn,
            config=config, hands=self.hands)
        self._resolvers: dict[int, Resolver] = {}
        self._initial: dict[int, object] = {}
        self._seat: Optional[int] = None
        self._cards: tuple[int, ...] = ()
        self._state = None

    def _resolver(self, seat: int) -> Resolver:
        if seat not in self._resolvers:
            self._resolvers[seat] = self._make(seat)
        return self._resolvers[seat]

    def notify(self, event: tuple) -> None:
        kind = event[0]
        if kind == "hand_start":
            _, self._seat, self._cards = event
            resolver = self._resolver(self._seat)
            if self._seat not in self._initial:
                self._initial[self._seat] = resolver.new_game()
            self._state = self._initial[self._seat]
        elif kind == "opp_action" and self._state is not None:
            resolver = self._resolver(self._seat)
            self._state = resolver.observe_opponent_action(
                self._state, event[1])
        elif kind == "chance" and self._state is not None:
            resolver = self._resolver(self._seat)
            self._state = resolver.observe_chance(self._state, event[1])

    def act(self, obs: Observation) -> Action:
        resolver = self._resolver(self._seat)
        hand = self.hands.lookup(self._cards)
        action, self._state, _ = resolver.act(self._state, hand,
                                              rng=obs.rng)
        return action
