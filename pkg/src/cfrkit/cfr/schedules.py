"""Iteration schedules for the CFR family.

A schedule bundles three things that distinguish published CFR variants:

* the multiplicative discount applied to accumulated positive/negative
  regrets after each iteration,
* the weight that iteration t's strategy contributes to the average, and
* the default update mode (simultaneous or alternating regret updates).

Variants:

* vanilla CFR: no discounting, uniform averaging, simultaneous updates.
* CFR+: negative regrets floored at zero (discount factor 0), linear
  averaging, alternating updates.
* LCFR: both regret signs and the average discounted linearly (equivalent
  to weighting iteration t by t).
* DCFR(alpha, beta, gamma): positive regrets scaled by t^a/(t^a+1),
  negative by t^b/(t^b+1); averaging weight t^gamma (equivalent to the
  multiplicative (t/(t+1))^gamma form after normalisation).
* DCFR+(d, alpha, beta): DCFR's regret discounting combined with delayed
  linear averaging weight max{0, t - d}.  Iterations t <= d still update
  regrets; only the average accumulator skips them.
"""

from __future__ import annotations

from dataclasses import dataclass

SIMULTANEOUS = "simultaneous"
ALTERNATING = "alternating"


@dataclass(frozen=True)
class Schedule:
    """One member of the CFR family, identified by discounting behaviour.

    Attributes:
        name: printable variant name.
        alpha: exponent for positive-regret discounting (None = keep).
        beta: exponent for negative-regret discounting (None = keep;
            float("-inf") encodes the CFR+ hard floor at zero).
        gamma: averaging-weight exponent for DCFR-style averaging.
        delay: averaging delay d; weight is max{0, t - d} when linear=True.
        linear: linear (possibly delayed) averaging instead of t^gamma.
        update_mode: default simultaneous/alternating regret updates.
    """

    name: str
    alpha: float | None = None
    beta: float | None = None
    gamma: float = 0.0
    delay: int = 0
    linear: bool = False
    update_mode: str = SIMULTANEOUS

    def regret_discount(self, t: int) -> tuple[float, float]:
        """Factors applied to (positive, negative) cumulative regrets after
        iteration t's updates."""
        fpos = 1.0
        fneg = 1.0
        if self.alpha is not None:
            ta = float(t) ** self.alpha
            fpos = ta / (ta + 1.0)
        if self.beta is not None:
            if self.beta == float("-inf"):
                fneg = 0.0
            else:
                tb = float(t) ** self.beta
                fneg = tb / (tb + 1.0)
        return fpos, fneg

    def average_weight(self, t: int) -> float:
        """Weight of iteration t's strategy in the average accumulator."""
        if self.linear:
            return float(max(0, t - self.delay))
        if self.gamma == 0.0:
            return 1.0
        return float(t) ** self.gamma


def vanilla() -> Schedule:
    return Schedule(name="cfr", update_mode=SIMULTANEOUS)


def cfr_plus(delay: int = 0) -> Schedule:
    return Schedule(
        name="cfr+",
        beta=float("-inf"),
        delay=delay,
        linear=True,
        update_mode=ALTERNATING,
    )


def lcfr() -> Schedule:
    return Schedule(
        name="lcfr", alpha=1.0, beta=1.0, delay=0, linear=True,
        update_mode=ALTERNATING,
    )


def dcfr(alpha: float = 1.5, beta: float = 0.0, gamma: float = 2.0) -> Schedule:
    return Schedule(
        name="dcfr", alpha=alpha, beta=beta, gamma=gamma, update_mode=ALTERNATING,
    )


def dcfr_plus(delay: int = 100, alpha: float = 1.5, beta: float = 0.0) -> Schedule:
    return Schedule(
        name="dcfr+", alpha=alpha, beta=beta, delay=delay, linear=True,
        update_mode=SIMULTANEOUS,
    )


_FACTORIES = {
    "cfr": vanilla,
    "vanilla": vanilla,
    "cfr+": cfr_plus,
    "lcfr": lcfr,
    "dcfr": dcfr,
    "dcfr+": dcfr_plus,
}


def parse_schedule(name: str, **overrides) -> Schedule:
    """Build a schedule from its variant name, e.g. "dcfr+"."""
    key = name.strip().lower()
    if key not in _FACTORIES:
        raise ValueError(f"unknown CFR variant {name!r}; "
                         f"choose from {sorted(_FACTORIES)}")
    sched = _FACTORIES[key]()
    if overrides:
        from dataclasses import replace
        sched = replace(sched, **overrides)
    return sched
