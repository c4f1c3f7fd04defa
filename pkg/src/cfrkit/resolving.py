"""Continual resolving for two-player zero-sum sequential games.

One :class:`Resolver` drives a single seat through a hand.  At every own
decision it builds a fresh lookahead rooted at the current public state and
solves it; the opponent's root range is gated through a per-hand
enter/stay-out gadget whose stay-out payoff is the opponent's
counterfactual value carried over from the previous solve, which bounds the
exploitability of the stitched-together policy.

State is carried functionally: ``observe_*`` methods return new
:class:`ResolveState` values, so replaying a logged hand rebuilds an
identical trajectory and game-tree walks may fork states freely.

Bookkeeping between solves:

* the agent's own range is pushed through its resolved policy after each
  own action (Bayes' rule) and masked/renormalized on every deal;
* opponent counterfactual values are read out of the previous solve at the
  tree node matching the new public state, then renormalized into the next
  subgame's root measure (divide by own reach mass times the accumulated
  chance constant);
* an opponent action outside the lookahead's action menu triggers a
  rebuild of the previous lookahead with that one concrete action grafted
  in, after which bounds are read from the re-solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .cfr.schedules import Schedule, dcfr_plus
from .cfr.tabular import TabularProfile
from .games import Action, PokerGame
from .hands import HandSpace
from .lookahead.flattree import FlatTree, build_tree
from .lookahead.solver import FlatSolver

__all__ = [
    "ResolveConfig",
    "ResolveState",
    "ResolvedPolicy",
    "Resolver",
    "compose_resolving_profile",
]


# ─── Configuration ───────────────────────────────────────────────────────────


@dataclass(frozen=True)
class ResolveConfig:
    """Knobs for one resolving seat.

    Attributes:
        iterations: solver iterations per resolve.
        schedule: CFR schedule used by every inner solve.
        depth_rounds: betting rounds the lookahead spans before handing
            leaves to the value function (None = solve to end of game;
            also forced when no value function is supplied).
        selection: how ``act`` picks an action from the resolved policy —
            "sample", "argmax", or "purify" (drop probabilities below
            ``purify_threshold``, renormalize, then sample).
        purify_threshold: cutoff used by the "purify" rule.
    """

    iterations: int = 4000
    schedule: Schedule = field(default_factory=dcfr_plus)
    depth_rounds: Optional[int] = None
    selection: str = "sample"
    purify_threshold: float = 0.05

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.selection not in ("sample", "argmax", "purify"):
            raise ValueError(f"unknown selection rule {self.selection!r}")


# ─── State carried between decisions ─────────────────────────────────────────


@dataclass(frozen=True)
class _SolveContext:
    """A finished solve plus a cursor into its tree.

    ``cfv_opp``/``reach_own`` are the opponent counterfactual values and
    the agent's reach probabilities under the solve's average profile;
    ``node`` tracks the tree position matching the true public state and
    ``path`` the edge actions taken from the solve's root to get there.
    ``root_range``/``root_bound``/``forced`` record the solve's inputs so
    an off-tree opponent action can rebuild it with one extra action.
    """

    tree: FlatTree
    cfv_opp: np.ndarray
    reach_own: np.ndarray
    node: int
    path: tuple[Action, ...]
    root_range: np.ndarray
    root_bound: Optional[np.ndarray]
    forced: tuple = ()


@dataclass(frozen=True)
class ResolveState:
    """Everything one seat knows between decisions: the public history,
    its own hand distribution, and the opponent's carried counterfactual
    values (per opponent hand, chips at the current public state)."""

    history: object
    own_range: np.ndarray
    opp_cfv_bound: np.ndarray
    ctx: _SolveContext


@dataclass(frozen=True)
class ResolvedPolicy:
    """Output of one resolve: the agent's average strategy at the root
    (one row per action, one column per private hand) plus the solved
    context that supplies successor counterfactual values."""

    actions: tuple[Action, ...]
    probs: np.ndarray
    ctx: _SolveContext

    def for_hand(self, hand: int) -> np.ndarray:
        return self.probs[:, hand]


class _ForcedActions:
    """Action menu that grafts specific concrete actions onto given public
    states, on top of a base abstraction (or the full legal menu)."""

    def __init__(self, base, forced) -> None:
        self.base = base
        self.forced = forced

    def actions(self, game, h) -> list[Action]:
        if self.base is not None:
            acts = list(self.base.actions(game, h))
        else:
            acts = list(game.legal_actions(h))
        for betting, board, extra in self.forced:
            if betting == h.betting_string() and board == h.board:
                if extra not in acts and extra in game.legal_actions(h):
                    acts.append(extra)
        return acts


# ─── Resolver ────────────────────────────────────────────────────────────────


class Resolver:
    """Continual-resolving driver for one seat of a two-player game."""

    def __init__(self, spec, player: int, *, abstraction=None,
                 value_fn=None, config: Optional[ResolveConfig] = None,
                 hands: Optional[HandSpace] = None) -> None:
        self.spec = spec
        self.player = player
        self.opponent = 1 - player
        self.game = PokerGame(spec)
        self.hands = hands or HandSpace(spec)
        self.abstraction = abstraction
        self.value_fn = value_fn
        self.config = config or ResolveConfig()
        self.log: list[str] = []

    # ── internal helpers ─────────────────────────────────────────────────

    def _log(self, seat, event: str, payload: str) -> None:
        self.log.append(f"{seat}|{event}|{payload}")

    def _leaf_round(self, h) -> Optional[int]:
        if self.config.depth_rounds is None or self.value_fn is None:
            return None
        boundary = h.round + self.config.depth_rounds
        return boundary if boundary < self.spec.num_rounds else None

    def _opp_base(self, h) -> np.ndarray:
        mask = self.hands.live_mask(h.board)
        return mask / mask.sum()

    def _solve(self, h, own_range: np.ndarray,
               bound: Optional[np.ndarray], iterations: int,
               forced: tuple = ()) -> _SolveContext:
        """Build and solve a lookahead rooted at ``h``; package the result
        as a cursor-at-root context."""
        menu = (_ForcedActions(self.abstraction, forced) if forced
                else self.abstraction)
        initial = h == self.game.initial_history()
        scalar = self.hands.deal_correction() if initial else 1.0
        tree = build_tree(self.game, h, self.hands, abstraction=menu,
                          leaf_round=self._leaf_round(h), root_scalar=scalar)
        ranges = [None, None]
        ranges[self.player] = own_range
        ranges[self.opponent] = self._opp_base(h)
        solver = FlatSolver(tree, self.config.schedule, r0=ranges[0],
                            r1=ranges[1], value_fn=self.value_fn)
        if bound is not None and not initial:
            solver.enable_gadget(self.opponent, bound,
                                 base_range=self._opp_base(h))
        # A value function that can defer per-call verification to a final
        # certified pass (the exact-solve oracle does) gets told when the
        # per-iteration queries start and stop.
        track = getattr(self.value_fn, "tracking", None)
        if track is not None and len(tree.value_leaves):
            with track():
                solver.solve(iterations)
        else:
            solver.solve(iterations)
        # Later re-solves bound the opponent by what they could extract
        # from this solve's play: a best-response sweep against the
        # average strategy, with boundary states read against the tracked
        # continuations (their own best response to those).  Average-vs-
        # average values would under-promise off-support hands and leak
        # the safety guarantee by a margin iterations cannot shrink.
        upper = getattr(self.value_fn, "serving_upper", None)
        if upper is not None and len(tree.value_leaves):
            with upper():
                solver.best_response_values(self.opponent)
        else:
            solver.best_response_values(self.opponent)
        return _SolveContext(
            tree=tree,
            cfv_opp=solver.cfv[self.opponent].copy(),
            reach_own=solver.reach[self.player].copy(),
            node=0,
            path=(),
            root_range=own_range.copy(),
            root_bound=None if bound is None else bound.copy(),
            forced=forced,
        )

    def _bound_at(self, ctx: _SolveContext) -> np.ndarray:
        """Opponent per-hand counterfactual values at the cursor,
        renormalized into a fresh subgame's root measure."""
        mass = float(ctx.reach_own[ctx.node].sum())
        scale = mass * float(ctx.tree.chance_scalar[ctx.node])
        if scale <= 0.0:
            return np.zeros(ctx.cfv_opp.shape[1])
        return ctx.cfv_opp[ctx.node] / scale

    def _child_for(self, ctx: _SolveContext, action: Action) -> Optional[int]:
        t = ctx.tree
        n = ctx.node
        target = self.game.apply(t.histories[n], action)
        first = t.first_child[n]
        for c in range(first, first + t.n_children[n]):
            if t.histories[c] == target:
                return int(c)
        return None

    def _advance(self, state: ResolveState, ctx: _SolveContext,
                 action: Action) -> ResolveState:
        """Move the cursor down one edge, rebuilding the solve when the
        edge is missing (off-menu action or past a value-function leaf)."""
        history = self.game.apply(state.history, action)
        if ctx.tree.n_children[ctx.node] == 0 and \
                not self.game.is_terminal(ctx.tree.histories[ctx.node]):
            # Cursor sits on a value-function leaf: the stored solve ends
            # here, so re-root a fresh constrained solve before advancing.
            ctx = self._solve(state.history, state.own_range,
                              state.opp_cfv_bound, self.config.iterations)
        child = self._child_for(ctx, action)
        if child is None:
            forced = ctx.forced + (
                (ctx.tree.histories[ctx.node].betting_string(),
                 ctx.tree.histories[ctx.node].board, action),)
            root_h = ctx.tree.histories[0]
            rebuilt = self._solve(root_h, ctx.root_range, ctx.root_bound,
                                  self.config.iterations, forced=forced)
            node = 0
            for step in ctx.path + (action,):
                rebuilt = replace(rebuilt, node=node)
                node = self._child_for(rebuilt, step)
                if node is None:
                    raise ValueError(f"cannot graft action {step} into "
                                     f"rebuilt lookahead")
            ctx = replace(rebuilt, node=node, path=ctx.path + (action,))
        else:
            ctx = replace(ctx, node=child, path=ctx.path + (action,))
        return ResolveState(history=history, own_range=state.own_range,
                            opp_cfv_bound=self._bound_at(ctx), ctx=ctx)

    # ── public protocol ──────────────────────────────────────────────────

    def new_game(self) -> ResolveState:
        """Start a hand: uniform own range, opponent bounds taken from an
        unconstrained solve of the initial lookahead."""
        self.log = []
        h = self.game.initial_history()
        uniform = self.hands.uniform_range()
        ctx = self._solve(h, uniform, None, self.config.iterations)
        state = ResolveState(history=h, own_range=uniform.copy(),
                             opp_cfv_bound=self._bound_at(ctx), ctx=ctx)
        self._log(self.player, "new_game", self.spec.variant)
        return state

    def resolve(self, state: ResolveState,
                iterations: Optional[int] = None) -> ResolvedPolicy:
        """Solve the lookahead at the agent's decision point and return
        the root policy plus successor counterfactual values."""
        h = state.history
        if self.game.current_player(h) != self.player:
            raise ValueError("resolve() called when the seat is not to act")
        ctx = self._solve(h, state.own_range, state.opp_cfv_bound,
                          iterations or self.config.iterations)
        tree = ctx.tree
        first = tree.first_child[0]
        n_act = tree.n_children[0]
        probs = self._root_strategy(ctx)
        actions = tuple(self._edge_action(tree, c)
                        for c in range(first, first + n_act))
        self._log(self.player, "resolve",
                  f"{h.betting_string()}|{len(actions)}")
        return ResolvedPolicy(actions=actions, probs=probs, ctx=ctx)

    def _edge_action(self, tree: FlatTree, child: int) -> Action:
        parent_h = tree.histories[int(tree.parent[child])]
        child_h = tree.histories[child]
        for a in self.game.legal_actions(parent_h):
            if self.game.apply(parent_h, a) == child_h:
                return a
        raise ValueError("child history does not match any legal action")

    def _root_strategy(self, ctx: _SolveContext) -> np.ndarray:
        """Average strategy rows at the solve root (actions × hands)."""
        t = ctx.tree
        first = t.first_child[0]
        n_act = t.n_children[0]
        # reach_own at the root's children divided by the root range gives
        # the average strategy directly, but recomputing from the stored
        # reaches avoids assumptions about masking; do the normalization
        # per hand with a uniform fallback.
        rows = ctx.reach_own[first:first + n_act].copy()
        base = ctx.root_range
        with np.errstate(invalid="ignore", divide="ignore"):
            rows = np.where(base > 0.0, rows / base, 0.0)
        total = rows.sum(axis=0)
        ok = total > 0.0
        rows = np.where(ok, rows / np.where(ok, total, 1.0), 1.0 / n_act)
        return rows

    def observe_own_action(self, state: ResolveState, action: Action,
                           policy: ResolvedPolicy) -> ResolveState:
        """Push the agent's range through its policy for ``action`` and
        advance bounds to the chosen successor."""
        try:
            idx = policy.actions.index(action)
        except ValueError:
            raise ValueError(f"action {action} not in the resolved policy")
        pushed = state.own_range * policy.probs[idx]
        z = pushed.sum()
        if z <= 0.0:
            raise ValueError(f"action {action} has zero probability under "
                             f"every hand in range")
        new_state = ResolveState(history=state.history,
                                 own_range=state.own_range,
                                 opp_cfv_bound=state.opp_cfv_bound,
                                 ctx=policy.ctx)
        out = self._advance(new_state, policy.ctx, action)
        out = replace(out, own_range=pushed / z)
        self._log(self.player, "own_action", str(action))
        return out

    def observe_opponent_action(self, state: ResolveState,
                                action: Action) -> ResolveState:
        """Advance bounds through an opponent action (any legal one, in
        the action menu or not); the agent's own range is untouched."""
        if action not in self.game.legal_actions(state.history):
            raise ValueError(f"illegal opponent action {action}")
        out = self._advance(state, state.ctx, action)
        self._log(self.opponent, "opp_action", str(action))
        return out

    def observe_chance(self, state: ResolveState,
                       cards: Sequence[int]) -> ResolveState:
        """Advance through a public deal: mask and renormalize the own
        range, and read bounds stored for this chance outcome."""
        cards = tuple(cards)
        deal = None
        for a, _ in self.game.chance_outcomes(state.history):
            if a.cards == cards:
                deal = a
                break
        if deal is None:
            raise ValueError(f"cards {cards} conflict with the board")
        out = self._advance(state, state.ctx, deal)
        mask = self.hands.live_mask(out.history.board)
        masked = out.own_range * mask
        z = masked.sum()
        if z <= 0.0:
            raise ValueError("own range has no mass on the new board")
        out = replace(out, own_range=masked / z)
        self._log("-", "chance", "".join(str(c) for c in cards))
        return out

    def act(self, state: ResolveState, hand: int,
            rng: Optional[np.random.Generator] = None,
            iterations: Optional[int] = None
            ) -> tuple[Action, ResolveState, ResolvedPolicy]:
        """Resolve, pick an action for the agent's actual private hand by
        the configured selection rule, and advance the state."""
        policy = self.resolve(state, iterations)
        p = policy.probs[:, hand].copy()
        total = p.sum()
        p = p / total if total > 0 else np.full(len(p), 1.0 / len(p))
        rule = self.config.selection
        if rule == "argmax":
            idx = int(np.argmax(p))
        else:
            if rule == "purify":
                p = np.where(p < self.config.purify_threshold, 0.0, p)
                p = p / p.sum() if p.sum() > 0 else \
                    np.full(len(p), 1.0 / len(p))
            if rng is None:
                raise ValueError("sampling selection rules need an rng")
            idx = int(rng.choice(len(p), p=p))
        action = policy.actions[idx]
        return action, self.observe_own_action(state, action, policy), policy


# ─── Whole-game composition (desk-scale audit) ───────────────────────────────


def compose_resolving_profile(spec, resolver0: Resolver, resolver1: Resolver,
                              *, iterations: Optional[int] = None
                              ) -> TabularProfile:
    """Drive both seats' resolvers down every public trajectory and stitch
    their per-decision policies into one full-game profile, suitable for
    exact best-response measurement.  Only feasible at desk scale."""
    game = PokerGame(spec)
    profile = TabularProfile()
    for resolver in (resolver0, resolver1):
        _compose_walk(game, resolver, resolver.new_game(), profile,
                      iterations)
    return profile


def _compose_walk(game, resolver: Resolver, state: ResolveState,
                  profile: TabularProfile,
                  iterations: Optional[int]) -> None:
    h = state.history
    if game.is_terminal(h):
        return
    if game.is_chance(h):
        for a, _ in game.chance_outcomes(h):
            _compose_walk(game, resolver,
                          resolver.observe_chance(state, a.cards),
                          profile, iterations)
        return
    if game.current_player(h) != resolver.player:
        for a in game.legal_actions(h):
            _compose_walk(game, resolver,
                          resolver.observe_opponent_action(state, a),
                          profile, iterations)
        return
    policy = resolver.resolve(state, iterations)
    legal = tuple(game.legal_actions(h))
    if policy.actions != legal:
        raise ValueError("profile composition requires an unabstracted "
                         "action menu")
    tree = policy.ctx.tree
    live = resolver.hands.live_mask(h.board)
    for hand in np.nonzero(live)[0]:
        key = tree.infostate_key(0, int(hand), resolver.player)
        profile.set(key, policy.probs[:, hand].copy())
    for a in legal:
        idx = policy.actions.index(a)
        if float((state.own_range * policy.probs[idx]).sum()) <= 0.0:
            continue
        _compose_walk(game, resolver,
                      resolver.observe_own_action(state, a, policy),
                      profile, iterations)
