"""Tabular CFR over explicitly enumerated game trees.

This is the reference engine: it works for any two-player zero-sum
sequential game exposing the small duck-typed interface used by
:mod:`cfrkit.games` (``deal_histories``, ``is_terminal``, ``is_chance``,
``chance_outcomes``, ``current_player``, ``legal_actions``, ``apply``,
``utility``, ``infostate_key``).  Regrets and strategy accumulators are
keyed per infostate and all accumulation is float64.

Exact best response and exploitability live here as well; they double as
the measurement oracle for the vectorised solvers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .schedules import ALTERNATING, Schedule, vanilla


def regret_match(regrets: np.ndarray) -> np.ndarray:
    """Strategy proportional to positive regrets; uniform when none are
    positive."""
    pos = np.maximum(regrets, 0.0)
    total = pos.sum()
    if total <= 0.0:
        return np.full(len(regrets), 1.0 / len(regrets))
    return pos / total


@dataclass
class _Node:
    regret: np.ndarray
    avg: np.ndarray
    n_actions: int


@dataclass
class TabularProfile:
    """Average strategy per infostate key; unseen keys play uniform."""

    table: dict = field(default_factory=dict)

    def set(self, key, probs: np.ndarray) -> None:
        self.table[key] = np.asarray(probs, dtype=np.float64)

    def strategy(self, key, n_actions: int) -> np.ndarray:
        probs = self.table.get(key)
        if probs is None:
            return np.full(n_actions, 1.0 / n_actions)
        return probs


class TabularSolver:
    """CFR with pluggable schedule over an enumerable game."""

    def __init__(self, game, schedule: Optional[Schedule] = None):
        self.game = game
        self.schedule = schedule or vanilla()
        self.nodes: dict = {}
        self.t = 0
        # Strategies are fixed per pass: infostates spanning several deals
        # must not see regret updates from sibling deals mid-pass.
        self._sigma: dict = {}

    def _node(self, key, n_actions: int) -> _Node:
        node = self.nodes.get(key)
        if node is None:
            node = _Node(
                regret=np.zeros(n_actions), avg=np.zeros(n_actions),
                n_actions=n_actions,
            )
            self.nodes[key] = node
        return node

    def iterate(self) -> None:
        """Run one full iteration (both players updated)."""
        self.t += 1
        w = self.schedule.average_weight(self.t)
        if self.schedule.update_mode == ALTERNATING:
            for player in (0, 1):
                self._sigma.clear()
                for root, p in self.game.deal_histories():
                    self._walk(root, 1.0, 1.0, p, player, w)
        else:
            self._sigma.clear()
            for root, p in self.game.deal_histories():
                self._walk(root, 1.0, 1.0, p, None, w)
        fpos, fneg = self.schedule.regret_discount(self.t)
        if fpos != 1.0 or fneg != 1.0:
            for node in self.nodes.values():
                r = node.regret
                np.multiply(r, np.where(r > 0.0, fpos, fneg), out=r)

    def solve(self, iterations: int) -> TabularProfile:
        for _ in range(iterations):
            self.iterate()
        return self.average_profile()

    def average_profile(self) -> TabularProfile:
        profile = TabularProfile()
        for key, node in self.nodes.items():
            total = node.avg.sum()
            if total > 0.0:
                profile.set(key, node.avg / total)
            else:
                profile.set(key, np.full(node.n_actions, 1.0 / node.n_actions))
        return profile

    def _walk(
        self, h, r0: float, r1: float, rc: float,
        update_player: Optional[int], w: float,
    ) -> tuple[float, float]:
        """Returns expected utilities under the current profile.

        ``rc`` carries chance reach; regret updates for player i are
        weighted by the counterfactual reach rc * r_{-i}.
        """
        game = self.game
        if game.is_terminal(h):
            return game.utility(h)
        if game.is_chance(h):
            u0 = u1 = 0.0
            for a, p in game.chance_outcomes(h):
                c0, c1 = self._walk(game.apply(h, a), r0, r1, rc * p,
                                    update_player, w)
                u0 += p * c0
                u1 += p * c1
            return u0, u1

        player = game.current_player(h)
        actions = game.legal_actions(h)
        key = game.infostate_key(h)
        node = self._node(key, len(actions))
        sigma = self._sigma.get(key)
        if sigma is None:
            sigma = regret_match(node.regret)
            self._sigma[key] = sigma
        own = r0 if player == 0 else r1

        # With alternating updates the average strategy accumulates during
        # the *other* player's traversal, so it records the strategy that
        # already absorbed this iteration's regret update.
        if update_player is not None and update_player != player:
            if w > 0.0:
                node.avg += w * own * sigma

        vals = np.empty((len(actions), 2))
        for i, a in enumerate(actions):
            nr0 = r0 * sigma[i] if player == 0 else r0
            nr1 = r1 * sigma[i] if player == 1 else r1
            vals[i] = self._walk(game.apply(h, a), nr0, nr1, rc,
                                 update_player, w)
        value = sigma @ vals  # expected (u0, u1)

        if update_player is None or update_player == player:
            cf = rc * (r1 if player == 0 else r0)
            node.regret += cf * (vals[:, player] - value[player])
            if update_player is None and w > 0.0:
                node.avg += w * own * sigma
        return float(value[0]), float(value[1])


def solve_tabular(game, iterations: int, schedule: Optional[Schedule] = None,
                  on_iteration: Optional[Callable[[int, "TabularSolver"], None]] = None
                  ) -> TabularProfile:
    solver = TabularSolver(game, schedule)
    for _ in range(iterations):
        solver.iterate()
        if on_iteration is not None:
            on_iteration(solver.t, solver)
    return solver.average_profile()


# ─── Best response / exploitability ─────────────────────────────────────────


def best_response_value(game, profile: TabularProfile, responder: int) -> float:
    """Expected value an exact best responder achieves against ``profile``.

    The responder maximises per infostate (aggregating opponent-and-chance
    reach over the infostate's histories); ties break toward the lowest
    action index.  Unreached opponent infostates play uniform via the
    profile's fallback.
    """
    members: dict = {}   # infostate key -> list of (history, reach)
    reach_of: dict = {}

    def collect(h, reach: float) -> None:
        if game.is_terminal(h):
            return
        if game.is_chance(h):
            for a, p in game.chance_outcomes(h):
                collect(game.apply(h, a), reach * p)
            return
        player = game.current_player(h)
        actions = game.legal_actions(h)
        if player == responder:
            key = game.infostate_key(h)
            members.setdefault(key, []).append(h)
            reach_of[h] = reach
            for a in actions:
                collect(game.apply(h, a), reach)
        else:
            sigma = profile.strategy(game.infostate_key(h), len(actions))
            for i, a in enumerate(actions):
                collect(game.apply(h, a), reach * sigma[i])

    roots = game.deal_histories()
    for root, p in roots:
        collect(root, p)

    choice: dict = {}
    value_memo: dict = {}

    def value(h) -> float:
        if game.is_terminal(h):
            return game.utility(h)[responder]
        got = value_memo.get(h)
        if got is not None:
            return got
        if game.is_chance(h):
            v = sum(p * value(game.apply(h, a)) for a, p in game.chance_outcomes(h))
        else:
            actions = game.legal_actions(h)
            player = game.current_player(h)
            key = game.infostate_key(h)
            if player == responder:
                a_star = choice.get(key)
                if a_star is None:
                    scores = np.zeros(len(actions))
                    for i, a in enumerate(actions):
                        scores[i] = sum(
                            reach_of[m] * value(game.apply(m, a))
                            for m in members[key]
                        )
                    a_star = int(np.argmax(scores))
                    choice[key] = a_star
                v = value(game.apply(h, actions[a_star]))
            else:
                sigma = profile.strategy(key, len(actions))
                v = sum(sigma[i] * value(game.apply(h, a))
                        for i, a in enumerate(actions))
        value_memo[h] = v
        return v

    return float(sum(p * value(root) for root, p in roots))


def exploitability(game, profile: TabularProfile) -> float:
    """Per-player exploitability in chips: the mean of both players'
    best-response values.  Zero exactly at a Nash equilibrium, positive
    elsewhere.  (The per-player convention matches how poker solvers
    report exploitability in mbb/g; the two-seat total is simply twice
    this value.)"""
    return 0.5 * (best_response_value(game, profile, 0)
                  + best_response_value(game, profile, 1))


def expected_value(game, profile: TabularProfile) -> tuple[float, float]:
    """Expected utilities when both players follow ``profile``."""

    def walk(h) -> tuple[float, float]:
        if game.is_terminal(h):
            return game.utility(h)
        if game.is_chance(h):
            u0 = u1 = 0.0
            for a, p in game.chance_outcomes(h):
                c0, c1 = walk(game.apply(h, a))
                u0 += p * c0
                u1 += p * c1
            return u0, u1
        actions = game.legal_actions(h)
        sigma = profile.strategy(game.infostate_key(h), len(actions))
        u0 = u1 = 0.0
        for i, a in enumerate(actions):
            c0, c1 = walk(game.apply(h, a))
            u0 += sigma[i] * c0
            u1 += sigma[i] * c1
        return u0, u1

    t0 = t1 = 0.0
    for root, p in game.deal_histories():
        c0, c1 = walk(root)
        t0 += p * c0
        t1 += p * c1
    return t0, t1
