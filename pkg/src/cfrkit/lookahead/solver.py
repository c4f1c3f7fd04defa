"""Vector CFR over flat public trees.

The solver keeps one regret, average, strategy, reach and value row per
(node, hand) per player, all preallocated, and runs schedule-driven CFR
iterations as array sweeps (see :mod:`.kernels`).  It also provides
exact best response / exploitability over the same tree, extraction of
the average profile in the tabular engine's key format, and a root
"gadget" mode used by safe resolving, where one player's root range is
gated hand-by-hand through an enter-or-take-bound decision maintained
outside the tree.

Depth-limited trees evaluate their value leaves through a callback:

    value_fn.evaluate(hist, r0, r1) -> (v0, v1)

where ``hist`` is the leaf's public state, ``r0``/``r1`` are the
players' raw (mass-weighted, unnormalised) reach vectors there, and
``v0``/``v1`` per-hand counterfactual chip values for the game
continuing from that state, weighted by the opponent's reach as given.
Values are linear in the opponent's reach vector, so the contract
composes: the solver applies only the leaf's chance scalar on top.
Stateless evaluators need only ``hist.board`` and ``hist.pot``;
stateful ones may key internal solvers by the full action line.
"""

from __future__ import annotations

import time
from typing import Optional

import numpy as np

from ..cfr.schedules import ALTERNATING, Schedule, vanilla
from ..cfr.tabular import TabularProfile
from . import kernels as K
from .flattree import DECISION, FlatTree

_NEG_INF = float("-inf")


class FlatSolver:
    """CFR with pluggable schedule over a :class:`FlatTree`."""

    def __init__(
        self,
        tree: FlatTree,
        schedule: Optional[Schedule] = None,
        *,
        r0: Optional[np.ndarray] = None,
        r1: Optional[np.ndarray] = None,
        value_fn=None,
    ):
        self.tree = tree
        self.schedule = schedule or vanilla()
        self.value_fn = value_fn
        if len(tree.value_leaves) and value_fn is None:
            raise ValueError("tree has value leaves but no value_fn given")
        self.t = 0
        self.allocations = 0
        N = tree.n_nodes
        H0, H1 = tree.n_hands
        self.ranges = (
            np.full(H0, 1.0 / H0) if r0 is None else np.asarray(r0, float),
            np.full(H1, 1.0 / H1) if r1 is None else np.asarray(r1, float),
        )
        self.regret = (self._alloc((N, H0)), self._alloc((N, H1)))
        self.avg = (self._alloc((N, H0)), self._alloc((N, H1)))
        self.strat = (tree.strat_init[0].copy(), tree.strat_init[1].copy())
        self.reach = (self._alloc((N, H0)), self._alloc((N, H1)))
        self.cfv = (self._alloc((N, H0)), self._alloc((N, H1)))
        self.allocations += 2  # the strategy copies above
        self.reach[0][0] = self.ranges[0]
        self.reach[1][0] = self.ranges[1]
        # Leaf coefficients: stake (signed for folds) times chance scalar.
        fl, sl = tree.fold_leaves, tree.showdown_leaves
        self._fold_coef = (
            tree.pay[fl] * tree.chance_scalar[fl],
            -tree.pay[fl] * tree.chance_scalar[fl],
        )
        self._show_coef = tree.pay[sl] * tree.chance_scalar[sl]
        self.allocations += 3
        # Kernel scratch.
        H = max(H0, H1)
        self._below = self._alloc(H)
        self._above = self._alloc(H)
        self._card_a = self._alloc(64)
        self._card_b = self._alloc(64)
        self._cards = (tree.hand_cards if tree.hand_cards is not None
                       else np.zeros((H, 2), dtype=np.int32))
        # Root gadget (safe resolving), disabled by default.
        self.gadget_player: Optional[int] = None
        self._gadget_bound: Optional[np.ndarray] = None
        self._gadget_base: Optional[np.ndarray] = None
        self._gadget_regret: Optional[np.ndarray] = None
        self._gadget_avg: Optional[np.ndarray] = None

    def _alloc(self, shape) -> np.ndarray:
        self.allocations += 1
        return np.zeros(shape)

    # ── gadget ───────────────────────────────────────────────────────────

    def enable_gadget(self, player: int, bound: np.ndarray,
                      base_range: Optional[np.ndarray] = None) -> None:
        """Gate ``player``'s root range through a per-hand enter/stay-out
        decision with alternative payoff ``bound`` (their counterfactual
        value for not entering this subtree).  ``base_range`` is the mass
        each hand brings when it enters; defaults to uniform."""
        H = self.tree.n_hands[player]
        self.gadget_player = player
        self._gadget_bound = np.asarray(bound, float).copy()
        base = (np.full(H, 1.0 / H) if base_range is None
                else np.asarray(base_range, float))
        self._gadget_base = base.copy()
        self._gadget_regret = self._alloc((H, 2))  # columns: enter, stay out
        self._gadget_avg = self._alloc((H, 2))

    def _gadget_enter_prob(self, avg: bool = False) -> np.ndarray:
        src = self._gadget_avg if avg else self._gadget_regret
        pos = np.maximum(src, 0.0)
        total = pos.sum(axis=1)
        enter = np.where(total > 0.0, pos[:, 0] / np.where(total > 0.0,
                                                           total, 1.0), 0.5)
        return enter

    def _gadget_update(self, v_enter: np.ndarray, w_avg: float) -> None:
        enter = self._gadget_enter_prob()
        u = enter * v_enter + (1.0 - enter) * self._gadget_bound
        self._gadget_regret[:, 0] += v_enter - u
        self._gadget_regret[:, 1] += self._gadget_bound - u
        if w_avg > 0.0:
            self._gadget_avg[:, 0] += w_avg * enter
            self._gadget_avg[:, 1] += w_avg * (1.0 - enter)

    def gadget_range(self, avg: bool = False) -> np.ndarray:
        """The gated player's effective root range (entering mass)."""
        return self._gadget_base * self._gadget_enter_prob(avg)

    # ── iteration ────────────────────────────────────────────────────────

    def _refresh_strategies(self) -> None:
        t = self.tree
        for p in (0, 1):
            K.regret_match_k(self.regret[p], self.strat[p], t.dec_nodes[p],
                             t.first_child, t.n_children)

    def _down(self, player: int) -> None:
        # Row 0 is re-seeded every sweep so callers may retarget `ranges`
        # between solves and have it take effect immediately.
        t = self.tree
        if player == self.gadget_player:
            self.reach[player][0] = self.gadget_range()
        else:
            self.reach[player][0] = self.ranges[player]
        K.down_sweep_k(self.reach[player], self.strat[player], t.parent,
                       t.n_nodes)

    def _eval_leaves(self, want0: bool, want1: bool,
                     zero: bool = True) -> None:
        t = self.tree
        if zero and want0:
            self.cfv[0].fill(0.0)
        if zero and want1:
            self.cfv[1].fill(0.0)
        two = t.two_card
        if len(t.fold_leaves):
            if want0:
                K.fold_eval_k(self.cfv[0], self.reach[1], t.fold_leaves,
                              self._fold_coef[0], self._cards, two,
                              self._card_a)
            if want1:
                K.fold_eval_k(self.cfv[1], self.reach[0], t.fold_leaves,
                              self._fold_coef[1], self._cards, two,
                              self._card_a)
        if len(t.showdown_leaves):
            if want0:
                K.showdown_eval_k(self.cfv[0], self.reach[1],
                                  t.showdown_leaves, self._show_coef,
                                  t.board_id, t.board_order, t.board_orank,
                                  t.board_nlive, self._cards, two,
                                  self._below, self._above, self._card_a,
                                  self._card_b)
            if want1:
                K.showdown_eval_k(self.cfv[1], self.reach[0],
                                  t.showdown_leaves, self._show_coef,
                                  t.board_id, t.board_order, t.board_orank,
                                  t.board_nlive, self._cards, two,
                                  self._below, self._above, self._card_a,
                                  self._card_b)
        if len(t.matrix_leaves):
            K.matrix_eval_k(self.cfv[0], self.cfv[1], self.reach[0],
                            self.reach[1], t.matrix_leaves, t.matrix_id,
                            t.matrices, t.chance_scalar, want0, want1)
        if len(t.value_leaves):
            self._eval_value_leaves(want0, want1)

    def _eval_value_leaves(self, want0: bool, want1: bool) -> None:
        t = self.tree
        for n in t.value_leaves:
            h = t.histories[n]
            r0, r1 = self.reach[0][n], self.reach[1][n]
            if r0.sum() <= 0.0 and r1.sum() <= 0.0:
                continue
            # Raw (mass-weighted) reach vectors go straight through; the
            # value function owns any normalisation and returns values
            # already weighted by the opponent's mass, so only the chance
            # scalar is applied here.
            v0, v1 = self.value_fn.evaluate(h, r0, r1)
            s = t.chance_scalar[n]
            if want0:
                self.cfv[0][n] = s * np.asarray(v0)
            if want1:
                self.cfv[1][n] = s * np.asarray(v1)

    def _up(self, player: int) -> None:
        t = self.tree
        K.up_sweep_k(self.cfv[player], self.strat[player], t.parent,
                     t.n_nodes)

    def iterate(self) -> None:
        self.t += 1
        t = self.tree
        w = self.schedule.average_weight(self.t)
        if self.schedule.update_mode == ALTERNATING:
            for u in (0, 1):
                self._refresh_strategies()
                self._down(0)
                self._down(1)
                # Canonical alternating averaging: the non-updating
                # player's average absorbs the strategy that already saw
                # this iteration's regret update.
                o = 1 - u
                if w > 0.0:
                    K.avg_update_k(self.avg[o], self.reach[o],
                                   t.dec_children[o], w)
                    if o == self.gadget_player:
                        self._gadget_avg_update(w)
                self._eval_leaves(u == 0, u == 1)
                self._up(u)
                K.regret_update_k(self.regret[u], self.cfv[u],
                                  t.dec_nodes[u], t.first_child,
                                  t.n_children)
                if u == self.gadget_player:
                    self._gadget_update(self.cfv[u][0], 0.0)
        else:
            self._refresh_strategies()
            self._down(0)
            self._down(1)
            if w > 0.0:
                for p in (0, 1):
                    K.avg_update_k(self.avg[p], self.reach[p],
                                   t.dec_children[p], w)
                if self.gadget_player is not None:
                    self._gadget_avg_update(w)
            self._eval_leaves(True, True)
            self._up(0)
            self._up(1)
            for p in (0, 1):
                K.regret_update_k(self.regret[p], self.cfv[p],
                                  t.dec_nodes[p], t.first_child,
                                  t.n_children)
            if self.gadget_player is not None:
                self._gadget_update(self.cfv[self.gadget_player][0], 0.0)
        fpos, fneg = self.schedule.regret_discount(self.t)
        if fpos != 1.0 or fneg != 1.0:
            for p in (0, 1):
                K.discount_k(self.regret[p], t.dec_children[p], fpos, fneg)
            if self._gadget_regret is not None:
                r = self._gadget_regret
                np.multiply(r, np.where(r > 0.0, fpos, fneg), out=r)

    def _gadget_avg_update(self, w: float) -> None:
        enter = self._gadget_enter_prob()
        self._gadget_avg[:, 0] += w * enter
        self._gadget_avg[:, 1] += w * (1.0 - enter)

    def solve(self, iterations: int) -> None:
        for _ in range(iterations):
            self.iterate()

    # ── averages and evaluation ──────────────────────────────────────────

    def average_strategy(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-player strategy arrays under the time-averaged profile;
        chance-mask rows are preserved, unvisited infostates are uniform."""
        t = self.tree
        out = []
        for p in (0, 1):
            strat = t.strat_init[p].copy()
            K.avg_strategy_k(self.avg[p], strat, t.dec_nodes[p],
                             t.first_child, t.n_children)
            out.append(strat)
        return out[0], out[1]

    def average_profile(self) -> TabularProfile:
        """Average strategies keyed like the tabular engine (per player,
        private hand, board, betting string), for cross-engine checks."""
        t = self.tree
        s0, s1 = self.average_strategy()
        strats = (s0, s1)
        profile = TabularProfile()
        for p in (0, 1):
            for i in t.dec_nodes[p]:
                c0 = t.first_child[i]
                m = t.n_children[i]
                live = t.hands.live_mask(t.histories[i].board)
                for h in range(t.n_hands[p]):
                    if live[h] == 0.0:
                        continue
                    key = t.infostate_key(i, h, p)
                    profile.set(key, strats[p][c0:c0 + m, h].copy())
        return profile

    def evaluate(self, strat0: Optional[np.ndarray] = None,
                 strat1: Optional[np.ndarray] = None,
                 gadget_avg: bool = True
                 ) -> tuple[np.ndarray, np.ndarray]:
        """Counterfactual values of every (node, hand) for both players
        under the given strategies (default: the current average).
        Returns the solver's cfv arrays; row 0 holds root values."""
        if strat0 is None or strat1 is None:
            a0, a1 = self.average_strategy()
            strat0 = a0 if strat0 is None else strat0
            strat1 = a1 if strat1 is None else strat1
        saved = self.strat
        self.strat = (strat0, strat1)
        t = self.tree
        for p in (0, 1):
            if p == self.gadget_player:
                self.reach[p][0] = self.gadget_range(gadget_avg)
            else:
                self.reach[p][0] = self.ranges[p]
            K.down_sweep_k(self.reach[p], self.strat[p], t.parent, t.n_nodes)
        self._eval_leaves(True, True)
        self._up(0)
        self._up(1)
        self.strat = saved
        return self.cfv[0], self.cfv[1]

    def root_values(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-hand counterfactual values at the root under the average
        profile (copies)."""
        c0, c1 = self.evaluate()
        return c0[0].copy(), c1[0].copy()

    def game_value(self) -> tuple[float, float]:
        """Expected chips for each player under the average profile."""
        v0, v1 = self.root_values()
        r0 = (self.gadget_range(True) if self.gadget_player == 0
              else self.ranges[0])
        r1 = (self.gadget_range(True) if self.gadget_player == 1
              else self.ranges[1])
        return float(r0 @ v0), float(r1 @ v1)

    # ── best response ────────────────────────────────────────────────────

    def best_response_values(self, player: int,
                             strat_opp: Optional[np.ndarray] = None
                             ) -> np.ndarray:
        """Per-hand value of an exact best response for ``player`` against
        the opponent's average (or given) strategy.  Value leaves are
        frozen at their average-profile evaluations, so on depth-limited
        trees this measures the depth-limited game."""
        t = self.tree
        opp = 1 - player
        a0, a1 = self.average_strategy()
        strats = [a0, a1]
        if strat_opp is not None:
            strats[opp] = strat_opp
        saved = self.strat
        self.strat = (strats[0], strats[1])
        for p in (0, 1):
            if p == self.gadget_player:
                self.reach[p][0] = self.gadget_range(True)
            else:
                self.reach[p][0] = self.ranges[p]
            K.down_sweep_k(self.reach[p], self.strat[p], t.parent, t.n_nodes)
        br = self.cfv[player]
        K.br_init_k(br, t.kind, t.actor, player, DECISION, _NEG_INF)
        # Leaf evaluation writes leaf rows only; keep br_init's internal rows.
        self._eval_leaves(player == 0, player == 1, zero=False)
        K.br_up_sweep_k(br, self.strat[player], t.parent, t.kind, t.actor,
                        t.n_nodes, player, DECISION)
        self.strat = saved
        return br[0].copy()

    def exploitability(self) -> float:
        """Per-player exploitability against the average profile: the mean
        of both players' best-response values, weighted by the root ranges
        (chips).  Matches the tabular engine's convention exactly."""
        br0 = self.best_response_values(0)
        br1 = self.best_response_values(1)
        r0 = (self.gadget_range(True) if self.gadget_player == 0
              else self.ranges[0])
        r1 = (self.gadget_range(True) if self.gadget_player == 1
              else self.ranges[1])
        return 0.5 * float(r0 @ br0 + r1 @ br1)


# ─── Full-game convergence backend ───────────────────────────────────────────


def full_game_tree(spec, hands=None):
    """Flat tree of an entire game with the true deal measure at the root."""
    from ..games import PokerGame
    from ..hands import HandSpace
    from .flattree import build_tree

    game = PokerGame(spec)
    hands = hands or HandSpace(spec)
    root = game.initial_history()
    return build_tree(game, root, hands,
                      root_scalar=hands.deal_correction())


def full_game_curve(spec, schedule: Schedule, iterations: int,
                    checkpoints, big_blind: float = 1.0
                    ) -> list[tuple[int, float, float, float]]:
    """Exploitability curve rows (iteration, chips, mbb/g, seconds) for a
    full-game flat solve under ``schedule``."""
    marks = set(int(c) for c in checkpoints)
    tree = full_game_tree(spec)
    solver = FlatSolver(tree, schedule)
    rows = []
    start = time.perf_counter()
    for t in range(1, iterations + 1):
        solver.iterate()
        if t in marks:
            chips = solver.exploitability()
            rows.append((t, chips, chips / big_blind * 1000.0,
                         time.perf_counter() - start))
    return rows
