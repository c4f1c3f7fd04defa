"""Head-to-head match runner with exact all-in scoring and mbb/g stats.

Deals are seeded per hand (``[seed, hand]``), agent RNG streams per hand
and seat, so a match is reproducible and mirror-symmetric: swapping the
two agents *and* the seat pattern replays identical trajectories with
negated scores.  When variance reduction is on, a hand where both players
are all-in before the board is complete scores as the exact expectation
over every remaining board runout instead of the sampled one.

An illegal action (or one exceeding the per-action time limit) forfeits
the hand: the offender loses their committed chips, and the result row
records the reason.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..games import Action, GameSpec, PokerGame, DEAL
from .agents import Agent, Observation

__all__ = [
    "MatchConfig",
    "HandResult",
    "MatchStats",
    "stats",
    "play_match",
    "write_results",
    "allin_expectation",
    "ForfeitHand",
]


class ForfeitHand(Exception):
    """Raised by an agent (e.g. the remote client) to concede the hand."""


# ─── Configuration and results ───────────────────────────────────────────────


@dataclass(frozen=True)
class MatchConfig:
    hands: int = 1000
    seed: int = 0
    variance_reduction: bool = True
    alternate_seats: bool = True
    first_seat: int = 0
    mirror_deals: bool = False
    time_limit: Optional[float] = None

    def __post_init__(self) -> None:
        if self.hands < 1:
            raise ValueError("hands must be >= 1")


@dataclass(frozen=True)
class HandResult:
    hand_id: int
    seat: int                  # agent 1's seat this hand
    chips: float               # agent 1's winnings
    allin_ev_applied: bool
    actions: str               # e.g. "r200/c/d:5h/c/!forfeit(p0: illegal)"


@dataclass
class MatchStats:
    total_chips: float
    mbb_per_game: float
    stderr_mbb: float
    results: list[HandResult] = field(default_factory=list)

    @property
    def hands(self) -> int:
        return len(self.results)


def stats(results: list[HandResult], big_blind: int) -> MatchStats:
    """mbb/g mean and per-hand sample stderr from raw results."""
    if len(results) < 2:
        raise ValueError("need at least two hand results")
    chips = np.array([r.chips for r in results])
    total = float(chips.sum())
    mbb = total / len(chips) / big_blind * 1000.0
    stderr = float(chips.std(ddof=1) / np.sqrt(len(chips))
                   / big_blind * 1000.0)
    return MatchStats(total_chips=total, mbb_per_game=mbb,
                      stderr_mbb=stderr, results=list(results))


def write_results(results: list[HandResult], path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["hand_id", "seat", "chips", "allin_ev_applied",
                    "actions"])
        for r in results:
            w.writerow([r.hand_id, r.seat, repr(r.chips),
                        int(r.allin_ev_applied), r.actions])


# ─── All-in expectation ──────────────────────────────────────────────────────


def allin_expectation(game: PokerGame, h) -> tuple[float, float]:
    """Exact expected utility when no further choices matter: enumerate
    every remaining chance outcome, taking the forced check/call at any
    interleaved decision."""
    if game.is_terminal(h):
        return game.utility(h)
    if game.is_chance(h):
        v0 = v1 = 0.0
        for a, p in game.chance_outcomes(h):
            u0, u1 = allin_expectation(game, game.apply(h, a))
            v0 += p * u0
            v1 += p * u1
        return v0, v1
    return allin_expectation(game, game.apply(h, Action("c")))


def _betting_closed(spec: GameSpec, h) -> bool:
    """True when both stacks are fully committed (no meaningful bets
    remain, only runout)."""
    return min(h.committed) >= spec.stack


# ─── Match loop ──────────────────────────────────────────────────────────────


def _deal_hand(rng: np.random.Generator, spec: GameSpec):
    """Pre-deal private cards for both seats plus the full board."""
    n_board = sum(spec.board_cards)
    need = 2 * spec.private_cards + n_board
    picks = rng.choice(len(spec.deck), size=need, replace=False)
    cards = [spec.deck[i] for i in picks]
    k = spec.private_cards
    p0 = tuple(sorted(cards[:k]))
    p1 = tuple(sorted(cards[k: 2 * k]))
    return (p0, p1), cards[2 * k:]


def _play_hand(game: PokerGame, agents: dict[int, Agent], privates,
               board_plan: list[int], hand_id: int, config: MatchConfig
               ) -> tuple[float, bool, str]:
    """One hand; returns (seat-0 chips, all-in EV applied, action log)."""
    spec = game.spec
    h = game.initial_history(private=privates)
    rngs = {s: np.random.default_rng([config.seed, hand_id, s])
            for s in (0, 1)}
    for s in (0, 1):
        agents[s].notify(("hand_start", s, privates[s]))
    log = []
    dealt = 0
    while not game.is_terminal(h):
        if game.is_chance(h):
            if config.variance_reduction and _betting_closed(spec, h):
                u0, _ = allin_expectation(game, h)
                log.append("allin-ev")
                return u0, True, "/".join(log)
            k = spec.board_cards[h.round + 1]
            cards = tuple(board_plan[dealt: dealt + k])
            dealt += k
            action = Action(DEAL, cards=tuple(sorted(cards)))
            h = game.apply(h, action)
            log.append(str(action))
            for s in (0, 1):
                agents[s].notify(("chance", action.cards))
            continue
        seat = game.current_player(h)
        obs = Observation(history=h.strip_private(), seat=seat,
                          cards=privates[seat],
                          legal=game.legal_actions(h), rng=rngs[seat])
        started = time.perf_counter()
        try:
            action = agents[seat].act(obs)
        except ForfeitHand as exc:
            reason = f"p{seat}: {exc}"
            log.append(f"!forfeit({reason})")
            loss = float(h.committed[seat])
            return (-loss if seat == 0 else loss), False, "/".join(log)
        elapsed = time.perf_counter() - started
        bad = (action not in obs.legal or
               (config.time_limit is not None
                and elapsed > config.time_limit))
        if bad:
            why = ("timeout" if action in obs.legal else
                   f"illegal {action}")
            log.append(f"!forfeit(p{seat}: {why})")
            loss = float(h.committed[seat])
            return (-loss if seat == 0 else loss), False, "/".join(log)
        h = game.apply(h, action)
        log.append(str(action))
        agents[1 - seat].notify(("opp_action", action))
    u0, _ = game.utility(h)
    return u0, False, "/".join(log)


def play_match(agent1: Agent, agent2: Agent, spec: GameSpec,
               config: Optional[MatchConfig] = None) -> MatchStats:
    """Play ``config.hands`` hands and report stats from ``agent1``'s
    perspective."""
    config = config or MatchConfig()
    game = PokerGame(spec)
    results = []
    for i in range(config.hands):
        if config.mirror_deals:
            rng = np.random.default_rng([config.seed, i // 2])
            privates, board = _deal_hand(rng, spec)
            if i % 2:
                privates = (privates[1], privates[0])
        else:
            rng = np.random.default_rng([config.seed, i])
            privates, board = _deal_hand(rng, spec)
        seat1 = (config.first_seat + i) % 2 if config.alternate_seats \
            else config.first_seat
        agents = {seat1: agent1, 1 - seat1: agent2}
        chips0, allin, log = _play_hand(game, agents, privates, board,
                                        i, config)
        chips = chips0 if seat1 == 0 else -chips0
        for s in (0, 1):
            own = chips if agents[s] is agent1 else -chips
            agents[s].notify(("hand_end", own))
        results.append(HandResult(hand_id=i, seat=seat1, chips=chips,
                                  allin_ev_applied=allin, actions=log))
    return stats(results, spec.big_blind)
