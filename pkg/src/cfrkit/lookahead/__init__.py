"""Flat public-tree solving: full games, depth-limited lookaheads, and
the exact-oracle value functions used to verify them."""

from .abstraction import (ActionAbstraction, basic, dense, from_config,
                          load_abstraction, preset)
from .flattree import (CHANCE_NODE, DECISION, FOLD_LEAF, MATRIX_LEAF,
                       SHOWDOWN_LEAF, VALUE_LEAF, FlatTree,
                       build_decision_matrix_tree, build_tree)
from .kernels import HAVE_NUMBA, USE_NUMBA
from .oracle import OracleValueFn, round_start_history
from .solver import FlatSolver, full_game_curve, full_game_tree

__all__ = [
    "ActionAbstraction", "basic", "dense", "from_config", "load_abstraction",
    "preset", "FlatTree", "build_tree", "build_decision_matrix_tree",
    "DECISION", "CHANCE_NODE", "FOLD_LEAF", "SHOWDOWN_LEAF", "VALUE_LEAF",
    "MATRIX_LEAF", "FlatSolver", "full_game_tree", "full_game_curve",
    "OracleValueFn", "round_start_history", "HAVE_NUMBA", "USE_NUMBA",
]
