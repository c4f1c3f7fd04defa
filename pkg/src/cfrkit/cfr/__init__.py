"""Counterfactual regret minimisation: schedules, tabular solver, best
response and exploitability, convergence studies."""

from .schedules import (  # noqa: F401
    Schedule,
    vanilla,
    cfr_plus,
    lcfr,
    dcfr,
    dcfr_plus,
    parse_schedule,
)
from .tabular import (  # noqa: F401
    TabularProfile,
    TabularSolver,
    regret_match,
    solve_tabular,
    best_response_value,
    exploitability,
    expected_value,
)
from .convergence import run_convergence, write_convergence_csv, read_convergence_csv  # noqa: F401
