"""Exact value functions: solve the remaining game instead of predicting it.

``OracleValueFn`` satisfies the same contract as a trained value network
— ``evaluate(hist, r0, r1)`` with raw per-hand reach vectors, returning
each hand's expected chips weighted by the opponent's reach mass, under
equilibrium play of the rest of the game — but computes it by actually
solving that remaining game.  One inner solver is kept per public
state.  Each time a solve is verified (exploitability measured under the
ranges actually given), the average profile is frozen and its root
values captured as matrices in the opponent range; later calls whose
ranges drifted little enough that the verified gap still certifies the
tolerance are answered by a matrix product.  Calls outside that radius
re-verify, warm-starting the kept solver — between consecutive outer
iterations the ranges barely move, so a few refresh iterations usually
suffice — and a fresh solver replaces entries that cannot recover.  The
tolerance is a fraction of the pot, matching how value errors are
reported.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..cfr.schedules import Schedule, cfr_plus
from ..cfr.tabular import TabularProfile
from ..games import CHANCE, History, PokerGame, TERMINAL
from ..hands import HandSpace
from .flattree import build_tree
from .solver import FlatSolver


def round_start_history(spec, board, pot: int) -> History:
    """Synthesise the public state at the start of the round implied by
    ``board``, with both players having matched ``pot / 2``."""
    board = tuple(sorted(board))
    total = 0
    rnd = None
    for r, k in enumerate(spec.board_cards):
        total += k
        if total == len(board):
            rnd = r
            break
    if rnd is None:
        raise ValueError(f"board size {len(board)} matches no round")
    if pot % 2:
        raise ValueError("round-start pot must be evenly matched")
    c = pot // 2
    to_act = spec.first_to_act[rnd]
    if not spec.is_limit and c >= spec.stack:
        to_act = TERMINAL if rnd + 1 >= spec.num_rounds else CHANCE
    return History(
        private=None,
        board=board,
        round=rnd,
        actions=tuple(() for _ in range(rnd + 1)),
        committed=(c, c),
        to_act=to_act,
    )


@dataclass
class _Entry:
    solver: FlatSolver
    iters: int = 0
    # Certified snapshot: value matrices of the frozen average profile,
    # the ranges it was verified under, and the remaining error slack.
    mat0: Optional[np.ndarray] = None   # (H0, H1): cfv0 = mat0 @ r1
    mat1: Optional[np.ndarray] = None   # (H1, H0): cfv1 = mat1 @ r0
    vr0: Optional[np.ndarray] = None
    vr1: Optional[np.ndarray] = None
    slack: float = 0.0


@dataclass
class OracleStats:
    calls: int = 0
    iterations: int = 0
    resets: int = 0
    rebuilds: int = 0
    tracked: int = 0
    worst_gap: float = 0.0


class OracleValueFn:
    """Ground-truth counterfactual values for boundary states of ``spec``."""

    def __init__(
        self,
        spec,
        *,
        hands: Optional[HandSpace] = None,
        schedule: Optional[Schedule] = None,
        eps_pot: float = 1e-4,
        chunk: int = 64,
        max_refresh: int = 8192,
        abstraction=None,
    ):
        self.spec = spec
        self.game = PokerGame(spec)
        self.hands = hands or HandSpace(spec)
        self.schedule = schedule or cfr_plus()
        self.eps_pot = eps_pot
        self.chunk = chunk
        self.max_refresh = max_refresh
        self.abstraction = abstraction
        self.stats = OracleStats()
        self._entries: dict = {}
        self._track = False
        self._serve_avg = False
        self._serve_upper = False

    @contextlib.contextmanager
    def tracking(self):
        """Lockstep mode for an outer solver that queries every iteration:
        each call advances the kept inner solver one iteration under the
        queried ranges and serves its current-strategy root values.  The
        outer iteration then behaves exactly like a CFR iteration of the
        glued full game — boundary values are the current joint profile's,
        and both sides' regrets average the same noise away — at the cost
        of one small iteration per call.  Values served inside this context
        carry no tolerance certificate; leave it before the final
        evaluation, which re-verifies at full tolerance."""
        saved = self._track
        self._track = True
        try:
            yield self
        finally:
            self._track = saved

    @contextlib.contextmanager
    def serving_averages(self):
        """Serve each kept solver's average-strategy values under the
        queried ranges, with no re-solving.  After a tracked solve these
        averages are the continuation play the outer average actually
        composes with, so this mode reads off what a finished solve
        expects to happen — re-verified equilibrium values would instead
        describe fresh continuations re-solved at the queried ranges,
        which is a different quantity."""
        saved = self._serve_avg
        self._serve_avg = True
        try:
            yield self
        finally:
            self._serve_avg = saved

    @contextlib.contextmanager
    def serving_upper(self):
        """Serve, for each side, its best-response value against the kept
        solver's average strategy (an upper envelope on what that side
        can get below the boundary).  This is the right boundary reading
        for safe re-solve bounds: the opponent's alternative payoff must
        be what they could extract from the strategy actually played, not
        what their own average happened to collect, or off-support hands
        get systematically under-promised and the guarantee chain leaks."""
        saved = self._serve_upper
        self._serve_upper = True
        try:
            yield self
        finally:
            self._serve_upper = saved

    def _entry(self, root: History) -> _Entry:
        # Distinct action lines get distinct solvers even when they share
        # (board, pot): lockstep tracking keeps per-line regret state, and
        # the glued game's subgame infostates are per-line too.
        key = (root.board, root.pot, root.betting_string())
        entry = self._entries.get(key)
        if entry is None:
            tree = build_tree(self.game, root.strip_private(), self.hands,
                              abstraction=self.abstraction)
            entry = _Entry(FlatSolver(tree, self.schedule))
            self._entries[key] = entry
        return entry

    def _verify(self, entry: _Entry, eps: float) -> float:
        """Warm-start the entry's solver until its exploitability under
        the currently installed ranges is at most ``eps``; return the gap
        actually reached."""
        solver = entry.solver
        gap = np.inf
        spent = 0
        while spent < self.max_refresh:
            if entry.iters:
                gap = solver.exploitability()
                if gap <= eps:
                    return gap
            n = min(self.chunk, self.max_refresh - spent)
            solver.solve(n)
            spent += n
            entry.iters += n
            self.stats.iterations += n
        gap = solver.exploitability()
        if gap > eps:
            # Warm start could not recover; start this state over.
            self.stats.resets += 1
            fresh = FlatSolver(solver.tree, self.schedule)
            fresh.ranges = solver.ranges
            entry.solver = fresh
            entry.iters = 0
            spent = 0
            while spent < self.max_refresh:
                fresh.solve(self.chunk)
                spent += self.chunk
                entry.iters += self.chunk
                self.stats.iterations += self.chunk
                gap = fresh.exploitability()
                if gap <= eps:
                    break
        return gap

    def _certify(self, entry: _Entry, r0, r1, eps: float) -> None:
        """Solve under ``(r0, r1)``, freeze the average profile, and store
        its root values as matrices in the opponent range.

        Root counterfactual values are linear in the opposing range once
        strategies are held fixed, so one evaluation per point-mass range
        recovers the whole matrix.  The snapshot stays valid for nearby
        ranges: exploitability moves by at most ``stack`` chips per unit
        of L1 range drift, so the leftover ``eps - gap`` slack converts
        directly into a reuse radius.
        """
        solver = entry.solver
        solver.ranges = (r0, r1)
        n = len(r0)
        if not (len(solver.tree.dec_nodes[0]) or len(solver.tree.dec_nodes[1])):
            gap, slack = 0.0, np.inf  # no decisions: values are exact
        else:
            # Verify to half the tolerance so the other half funds drift.
            gap = self._verify(entry, eps / 2)
            solver = entry.solver  # _verify may have replaced it
            slack = max(eps - gap, 0.0)
        self.stats.rebuilds += 1
        self.stats.worst_gap = max(self.stats.worst_gap, gap)
        s0, s1 = solver.average_strategy()
        mat0 = np.empty((n, n))
        mat1 = np.empty((n, n))
        point = np.zeros(n)
        for k in range(n):
            point[k] = 1.0
            solver.ranges = (point, point)
            c0, c1 = solver.evaluate(s0, s1)
            mat0[:, k] = c0[0]
            mat1[:, k] = c1[0]
            point[k] = 0.0
        solver.ranges = (r0, r1)
        entry.mat0, entry.mat1 = mat0, mat1
        entry.vr0, entry.vr1 = r0.copy(), r1.copy()
        entry.slack = slack

    def evaluate(self, hist: History, r0, r1):
        self.stats.calls += 1
        entry = self._entry(hist)
        board, pot = hist.board, hist.pot
        r0 = np.asarray(r0, float)
        r1 = np.asarray(r1, float)
        if self._track:
            # One lockstep iteration under the raw queried reaches, serving
            # the inner current-strategy values: regrets on both sides of
            # the boundary then update exactly as one CFR iteration of the
            # glued full game (zero-mass reaches contribute zero weight).
            # The drift snapshot no longer describes the solver once it
            # iterates; the next certified call rebuilds it.
            self.stats.tracked += 1
            entry.mat0 = entry.mat1 = None
            solver = entry.solver
            solver.ranges = (r0.copy(), r1.copy())
            solver.iterate()
            entry.iters += 1
            self.stats.iterations += 1
            return solver.cfv[0][0].copy(), solver.cfv[1][0].copy()
        served = self._serve_avg or self._serve_upper
        if served and (entry.iters or not (
                len(entry.solver.tree.dec_nodes[0])
                or len(entry.solver.tree.dec_nodes[1]))):
            solver = entry.solver
            solver.ranges = (r0.copy(), r1.copy())
            if self._serve_upper:
                return (solver.best_response_values(0),
                        solver.best_response_values(1))
            c0, c1 = solver.evaluate(*solver.average_strategy())
            return c0[0].copy(), c1[0].copy()
        # Certified path: solve under normalised ranges, serve the raw
        # products (values are linear in the opponent reach, and masses
        # at most one only shrink the certified error).
        m0 = float(r0.sum())
        m1 = float(r1.sum())
        n0 = r0 / m0 if m0 > 0.0 else self.hands.uniform_range(board)
        n1 = r1 / m1 if m1 > 0.0 else self.hands.uniform_range(board)
        if entry.mat0 is not None:
            drift = (np.abs(n0 - entry.vr0).sum()
                     + np.abs(n1 - entry.vr1).sum())
            if float(self.spec.stack) * drift <= entry.slack:
                return entry.mat0 @ r1, entry.mat1 @ r0
        eps = self.eps_pot * max(pot, 1)
        self._certify(entry, n0, n1, eps)
        return entry.mat0 @ r1, entry.mat1 @ r0

    def evaluate_state(self, board, pot, r0, r1):
        """Evaluate a round-start state given only its public summary."""
        return self.evaluate(round_start_history(self.spec, board, pot),
                             r0, r1)

    def average_profile(self) -> TabularProfile:
        """Merged average strategies of every kept inner solver.

        After a tracked trunk solve these are the joint run's own
        continuation strategies below each boundary state, so merging
        them over the trunk's average profile yields a full-game profile
        whose exploitability matches an unsegmented solve — unlike
        re-solving the continuations fresh at the trunk's average
        ranges, which is unsafe (the re-solve ignores how the trunk
        error correlates across boundary states and can compose far
        worse).  Boundary states never share infostate keys: entries
        are per action line and the keys include the line.
        """
        profile = TabularProfile()
        for entry in self._entries.values():
            if entry.iters:
                for key, probs in entry.solver.average_profile().table.items():
                    profile.set(key, probs)
        return profile

    def solve_exact(self, root: History, r0, r1, eps: float
                    ) -> FlatSolver:
        """Fresh high-accuracy solve of the game below ``root`` (true
        action prefix preserved), for composing full-game profiles."""
        tree = build_tree(self.game, root.strip_private(), self.hands,
                          abstraction=self.abstraction)
        solver = FlatSolver(tree, self.schedule,
                            r0=np.asarray(r0, float),
                            r1=np.asarray(r1, float))
        if not (len(tree.dec_nodes[0]) or len(tree.dec_nodes[1])):
            return solver
        spent = 0
        while spent < self.max_refresh * 4:
            solver.solve(self.chunk)
            spent += self.chunk
            if solver.exploitability() <= eps:
                break
        return solver
