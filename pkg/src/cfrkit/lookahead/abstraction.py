"""Betting abstractions: the raise menu offered at each decision point.

No-limit games expose thousands of legal raise totals; solvers restrict
each decision to fold, call, a small set of pot-fraction raises, and
all-in.  The menu may depend on how many raises the current round has
already seen ("first action" = the opening bet, "second action" = the
raise over it, and so on; the big blind does not count).  Fractions are
of the pot after the actor would call, so a 1.0-pot raise triples the
amount faced.

Limit games ignore the abstraction entirely: their raise size is fixed
by the rules.
"""

from __future__ import annotations

import logging
import sys
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..games import Action, Call, Fold, History, raise_to

log = logging.getLogger(__name__)

# Raise menus per raises-so-far-this-round; the last entry repeats.
BASIC_LEVELS = ((0.5, 1.0, 2.0), (0.5, 1.0, 2.0), (1.0,), (1.0,))
DENSE_LEVELS = ((0.33, 0.5, 0.75, 1.0, 1.25, 2.0), (0.25, 0.5, 1.0),
                (0.25,), (1.0,))


@dataclass(frozen=True)
class ActionAbstraction:
    """Pot-fraction raise menu keyed by raise depth within the round."""

    levels: tuple[tuple[float, ...], ...]
    include_allin: bool = True
    name: str = "custom"

    def __post_init__(self):
        if not self.levels or any(len(row) == 0 for row in self.levels):
            raise ValueError("abstraction needs at least one fraction per level")

    def fractions_at(self, depth: int) -> tuple[float, ...]:
        return self.levels[min(depth, len(self.levels) - 1)]

    def raise_targets(self, game, h: History) -> list[int]:
        """Legal raise-to totals at ``h``: clamped pot-fraction raises plus
        all-in, deduplicated and ascending."""
        bounds = game.raise_bounds(h)
        if bounds is None:
            return []
        lo, hi = bounds
        if game.spec.is_limit:
            return list(range(lo, hi + 1))
        cl = max(h.committed)
        pot_after_call = 2 * cl
        targets = set()
        in_band = False
        for q in self.fractions_at(h.raises_this_round):
            t = cl + int(round(q * pot_after_call))
            if lo <= t <= hi:
                in_band = True
            targets.add(min(max(t, lo), hi))
        if self.include_allin:
            targets.add(hi)
        if not in_band and targets == {hi}:
            key = (h.round, h.raises_this_round)
            if key not in _collapsed_warned:
                _collapsed_warned.add(key)
                log.warning(
                    "abstraction %s: no configured fraction fits at round %d "
                    "raise depth %d; falling back to fold/call/all-in",
                    self.name, h.round, h.raises_this_round)
        return sorted(targets)

    def actions(self, game, h: History) -> tuple[Action, ...]:
        out: list[Action] = []
        if game.call_amount(h) > 0:
            out.append(Fold)
        out.append(Call)
        out.extend(raise_to(t) for t in self.raise_targets(game, h))
        return tuple(out)


_collapsed_warned: set[tuple[int, int]] = set()


def basic() -> ActionAbstraction:
    """Three raise sizes early, pot-size only once the round heats up."""
    return ActionAbstraction(BASIC_LEVELS, name="basic")


def dense() -> ActionAbstraction:
    """Six opening sizes, thinning out at later raise depths."""
    return ActionAbstraction(DENSE_LEVELS, name="dense")


_PRESETS = {"basic": basic, "dense": dense}


def preset(name: str) -> ActionAbstraction:
    try:
        return _PRESETS[name]()
    except KeyError:
        raise ValueError(
            f"unknown abstraction preset {name!r}; choose from "
            f"{sorted(_PRESETS)}") from None


def from_config(cfg: Mapping) -> ActionAbstraction:
    """Build from a config mapping: either ``preset`` or explicit
    ``levels`` (list of lists of pot fractions), plus ``include_allin``."""
    known = {"preset", "levels", "include_allin", "name"}
    unknown = set(cfg) - known
    if unknown:
        raise ValueError(f"unknown abstraction keys: {sorted(unknown)}")
    if "preset" in cfg and "levels" in cfg:
        raise ValueError("give either 'preset' or 'levels', not both")
    include_allin = bool(cfg.get("include_allin", True))
    if "preset" in cfg:
        base = preset(cfg["preset"])
        return ActionAbstraction(base.levels, include_allin, base.name)
    if "levels" not in cfg:
        raise ValueError("abstraction config needs 'preset' or 'levels'")
    levels = tuple(tuple(float(q) for q in row) for row in cfg["levels"])
    return ActionAbstraction(levels, include_allin,
                             str(cfg.get("name", "custom")))


def load_abstraction(path) -> ActionAbstraction:
    """Read an ``[abstraction]`` table from a TOML file."""
    if sys.version_info >= (3, 11):
        import tomllib
    else:
        import tomli as tomllib
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    table = doc.get("abstraction", doc)
    return from_config(table)
