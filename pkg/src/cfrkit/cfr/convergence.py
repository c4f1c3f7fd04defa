"""Convergence studies: exploitability curves per schedule, CSV output.

The CSV layout is ``iteration,exploitability_chips,exploitability_mbbg,
seconds`` with one row per checkpoint.  mbb/g is milli-big-blinds per game:
chips / big_blind * 1000.
"""

from __future__ import annotations

import csv
import time
from typing import Iterable, Optional, Sequence

from .schedules import Schedule
from .tabular import TabularSolver, exploitability


def chips_to_mbbg(chips: float, big_blind: float) -> float:
    return chips / big_blind * 1000.0


def run_convergence(
    game,
    schedules: Sequence[Schedule],
    iterations: int,
    checkpoints: Iterable[int],
    big_blind: float = 1.0,
    backend: str = "auto",
) -> dict[str, list[tuple[int, float, float, float]]]:
    """Solve ``game`` once per schedule, measuring exploitability of the
    average profile at each checkpoint.  Returns rows keyed by schedule
    name, each row (iteration, chips, mbb/g, elapsed seconds)."""
    marks = sorted(set(int(c) for c in checkpoints if 0 < c <= iterations))
    curves: dict[str, list[tuple[int, float, float, float]]] = {}
    use_flat = backend == "flat" or (
        backend == "auto"
        and getattr(getattr(game, "spec", None), "variant", None) in ("kuhn", "leduc")
    )
    for sched in schedules:
        if use_flat:
            from ..lookahead import full_game_curve

            rows = full_game_curve(game.spec, sched, iterations, marks, big_blind)
        else:
            rows = []
            solver = TabularSolver(game, sched)
            start = time.perf_counter()
            for t in range(1, iterations + 1):
                solver.iterate()
                if t in marks:
                    chips = exploitability(game, solver.average_profile())
                    rows.append((t, chips, chips_to_mbbg(chips, big_blind),
                                 time.perf_counter() - start))
        curves[sched.name] = rows
    return curves


def write_convergence_csv(path, rows: Sequence[tuple[int, float, float, float]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["iteration", "exploitability_chips", "exploitability_mbbg", "seconds"])
        for it, chips, mbbg, secs in rows:
            writer.writerow([it, repr(float(chips)), repr(float(mbbg)),
                             repr(float(secs))])


def read_convergence_csv(path) -> list[tuple[int, float, float, float]]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        expect = ["iteration", "exploitability_chips", "exploitability_mbbg",
                  "seconds"]
        if header != expect:
            raise ValueError(f"bad convergence CSV header {header!r}")
        for row in reader:
            out.append((int(row[0]), float(row[1]), float(row[2]), float(row[3])))
    return out
