"""Flat public game trees: structure-of-arrays layout for vector CFR.

A public tree node is a betting/board state visible to both players;
private hands live in per-hand vectors attached to every node.  Nodes
are stored breadth-first so a node's children occupy one contiguous
block and every parent precedes its children, which lets the solver
kernels run as simple forward/backward sweeps over flat arrays.

Per-player "strategy" rows carry three meanings sharing one layout:

* children of a decision node: the acting player's current probability
  of taking that edge (filled by regret matching each iteration);
* children of a chance node: a fixed 0/1 mask, per hand, of whether the
  hand is consistent with the dealt cards (both players multiply it);
* everything else (rows the player does not control): constant 1.

Chance *probabilities* never enter the strategy rows.  Each node keeps
a scalar: the product along its path of 1/(number of deals actually
possible once both players' private cards are removed), times the
builder's root constant.  Leaf evaluation applies the scalar once, so
per-hand reach vectors stay pure products of strategies and masks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Optional

import numpy as np

from ..games import CHANCE, History, PokerGame, TERMINAL
from ..hands import HandSpace

# Node kinds.
DECISION = 0
CHANCE_NODE = 1
FOLD_LEAF = 2
SHOWDOWN_LEAF = 3
VALUE_LEAF = 4
MATRIX_LEAF = 5

LEAF_KINDS = (FOLD_LEAF, SHOWDOWN_LEAF, VALUE_LEAF, MATRIX_LEAF)


@dataclass
class FlatTree:
    """Structure-of-arrays public tree plus showdown lookup tables."""

    n_nodes: int
    n_hands: tuple[int, int]
    parent: np.ndarray        # int32 (N,), -1 at root
    kind: np.ndarray          # int8  (N,)
    actor: np.ndarray         # int8  (N,), decision nodes only, else -1
    edge_actor: np.ndarray    # int8  (N,): actor of parent; -1 for chance/root
    first_child: np.ndarray   # int32 (N,), -1 for leaves
    n_children: np.ndarray    # int32 (N,)
    chance_scalar: np.ndarray  # float64 (N,)
    pay: np.ndarray           # float64 (N,): fold = chips to player 0;
    #                           showdown = stake (symmetric); else 0
    board_id: np.ndarray      # int32 (N,), showdown leaves only, else -1
    matrix_id: np.ndarray     # int32 (N,), matrix leaves only, else -1
    histories: list           # History per node (public view), or None
    # Per-player fixed strategy-row template: masks at chance children,
    # 1.0 elsewhere.  The solver copies these once.
    strat_init: tuple[np.ndarray, np.ndarray]
    # Showdown tables: live hands of board b sorted by ascending strength.
    boards: list
    board_order: np.ndarray   # int32 (B, H): hand ids, -1 padded
    board_orank: np.ndarray   # int64 (B, H): strength at order position
    board_nlive: np.ndarray   # int32 (B,)
    # Leaf index arrays.
    fold_leaves: np.ndarray
    showdown_leaves: np.ndarray
    value_leaves: np.ndarray
    matrix_leaves: np.ndarray
    matrices: Optional[np.ndarray]  # float64 (M, H0, H1), payoff to player 0
    # Per-player decision structure.
    dec_nodes: tuple[np.ndarray, np.ndarray]     # decision nodes by actor
    dec_children: tuple[np.ndarray, np.ndarray]  # child rows by edge actor
    hands: Optional[HandSpace] = None
    game: Optional[PokerGame] = None
    hand_cards: Optional[np.ndarray] = None      # int32 (H, 2), -1 padded

    @property
    def two_card(self) -> bool:
        return self.hands is not None and self.hands.spec.private_cards == 2

    def infostate_key(self, node: int, hand: int, player: int) -> tuple:
        """Key compatible with ``PokerGame.infostate_key`` for the acting
        player holding ``hand`` at ``node``."""
        h = self.histories[node]
        return (player, tuple(sorted(self.hands.hands[hand])), h.board,
                h.betting_string())

    def describe(self) -> str:
        counts = {
            "decision": int(np.sum(self.kind == DECISION)),
            "chance": int(np.sum(self.kind == CHANCE_NODE)),
            "fold": len(self.fold_leaves),
            "showdown": len(self.showdown_leaves),
            "value": len(self.value_leaves),
            "matrix": len(self.matrix_leaves),
        }
        parts = ", ".join(f"{k}={v}" for k, v in counts.items() if v)
        return f"FlatTree({self.n_nodes} nodes: {parts})"


def build_tree(
    game: PokerGame,
    root: History,
    hands: HandSpace,
    *,
    abstraction=None,
    leaf_round: Optional[int] = None,
    root_scalar: float = 1.0,
) -> FlatTree:
    """Expand the public tree below ``root``.

    ``abstraction`` restricts no-limit raise menus (limit games use their
    fixed legal actions).  When ``leaf_round`` is given, any state that
    reaches that round stops expanding and becomes a value-function leaf,
    so the boundary always sits just after the cards opening the round
    are dealt.  ``root_scalar`` seeds the chance constant; full-game
    trees pass ``hands.deal_correction()`` so that uniform unit ranges
    reproduce the true deal measure.
    """
    root = root.strip_private()
    spec = game.spec
    H = hands.n

    parent: list[int] = []
    kind: list[int] = []
    actor: list[int] = []
    edge_actor: list[int] = []
    first_child: list[int] = []
    n_children: list[int] = []
    scalar: list[float] = []
    pay: list[float] = []
    board_id: list[int] = []
    histories: list[History] = []
    mask_rows: dict[int, np.ndarray] = {}
    boards: list[tuple] = []
    board_index: dict[tuple, int] = {}

    def intern_board(board: tuple) -> int:
        bid = board_index.get(board)
        if bid is None:
            bid = len(boards)
            board_index[board] = bid
            boards.append(board)
        return bid

    def classify(h: History) -> int:
        if leaf_round is not None and h.round >= leaf_round:
            return VALUE_LEAF
        if h.to_act == TERMINAL:
            return FOLD_LEAF if h.folder is not None else SHOWDOWN_LEAF
        if h.to_act == CHANCE:
            return CHANCE_NODE
        return DECISION

    def add_node(h: History, par: int, edge: int, sc: float) -> int:
        n = len(parent)
        k = classify(h)
        parent.append(par)
        kind.append(k)
        actor.append(h.to_act if k == DECISION else -1)
        edge_actor.append(edge)
        first_child.append(-1)
        n_children.append(0)
        scalar.append(sc)
        histories.append(h)
        if k == FOLD_LEAF:
            lose = float(h.committed[h.folder])
            pay.append(lose if h.folder == 1 else -lose)
            board_id.append(-1)
        elif k == SHOWDOWN_LEAF:
            pay.append(float(min(h.committed)))
            board_id.append(intern_board(h.board))
        else:
            pay.append(0.0)
            board_id.append(-1)
        return n

    add_node(root, -1, -1, root_scalar)
    cursor = 0
    while cursor < len(parent):
        n = cursor
        cursor += 1
        k = kind[n]
        if k in LEAF_KINDS:
            continue
        h = histories[n]
        first_child[n] = len(parent)
        if k == DECISION:
            acts = (abstraction.actions(game, h) if abstraction is not None
                    else game.legal_actions(h))
            for a in acts:
                add_node(game.apply(h, a), n, actor[n], scalar[n])
            n_children[n] = len(acts)
        else:  # chance: enumerate public deals, mask each child
            outcomes = game.chance_outcomes(h)
            deal_size = spec.board_cards[h.round + 1]
            remaining = (len(spec.deck) - len(h.board)
                         - 2 * spec.private_cards)
            child_scalar = scalar[n] / comb(remaining, deal_size)
            for a, _ in outcomes:
                c = add_node(game.apply(h, a), n, -1, child_scalar)
                mask_rows[c] = hands.live_mask(a.cards)
            n_children[n] = len(outcomes)

    N = len(parent)
    strat0 = np.ones((N, H))
    strat1 = np.ones((N, H))
    for c, mask in mask_rows.items():
        strat0[c] = mask
        strat1[c] = mask

    B = len(boards)
    board_order = np.full((B, H), -1, dtype=np.int32)
    board_orank = np.full((B, H), -1, dtype=np.int64)
    board_nlive = np.zeros(B, dtype=np.int32)
    for b, board in enumerate(boards):
        ranks = hands.showdown_ranks(board)
        live = np.flatnonzero(ranks >= 0)
        order = live[np.argsort(ranks[live], kind="stable")]
        board_order[b, : len(order)] = order
        board_orank[b, : len(order)] = ranks[order]
        board_nlive[b] = len(order)

    kind_arr = np.asarray(kind, dtype=np.int8)
    actor_arr = np.asarray(actor, dtype=np.int8)
    edge_arr = np.asarray(edge_actor, dtype=np.int8)
    tree = FlatTree(
        n_nodes=N,
        n_hands=(H, H),
        parent=np.asarray(parent, dtype=np.int32),
        kind=kind_arr,
        actor=actor_arr,
        edge_actor=edge_arr,
        first_child=np.asarray(first_child, dtype=np.int32),
        n_children=np.asarray(n_children, dtype=np.int32),
        chance_scalar=np.asarray(scalar, dtype=np.float64),
        pay=np.asarray(pay, dtype=np.float64),
        board_id=np.asarray(board_id, dtype=np.int32),
        matrix_id=np.full(N, -1, dtype=np.int32),
        histories=histories,
        strat_init=(strat0, strat1),
        boards=boards,
        board_order=board_order,
        board_orank=board_orank,
        board_nlive=board_nlive,
        fold_leaves=np.flatnonzero(kind_arr == FOLD_LEAF).astype(np.int32),
        showdown_leaves=np.flatnonzero(
            kind_arr == SHOWDOWN_LEAF).astype(np.int32),
        value_leaves=np.flatnonzero(kind_arr == VALUE_LEAF).astype(np.int32),
        matrix_leaves=np.zeros(0, dtype=np.int32),
        matrices=None,
        dec_nodes=tuple(
            np.flatnonzero((kind_arr == DECISION) & (actor_arr == p)
                           ).astype(np.int32) for p in (0, 1)),
        dec_children=tuple(
            np.flatnonzero(edge_arr == p).astype(np.int32) for p in (0, 1)),
        hands=hands,
        game=game,
        hand_cards=hands.cards,
    )
    return tree


def build_decision_matrix_tree(payoffs: np.ndarray, actor: int = 1
                               ) -> FlatTree:
    """One decision for ``actor`` whose options resolve against a hidden
    opponent state: child j is a matrix leaf paying row-player ``payoffs``
    restricted to ``actor``'s choice j.

    This is the flat form of "opponent moved first and privately": the
    opponent's move becomes their hand, so their mixed strategy enters as
    a range.  Used by resolving tests and matrix-game gadgets.
    """
    payoffs = np.asarray(payoffs, dtype=np.float64)
    h0, n_acts = payoffs.shape if actor == 1 else (payoffs.shape[1],
                                                   payoffs.shape[0])
    if actor == 1:
        H0, H1 = payoffs.shape[0], 1
        mats = payoffs.T.reshape(n_acts, H0, 1)
    else:
        H0, H1 = 1, payoffs.shape[1]
        mats = payoffs.reshape(n_acts, 1, payoffs.shape[1])
    N = 1 + n_acts
    kind = np.full(N, MATRIX_LEAF, dtype=np.int8)
    kind[0] = DECISION
    actor_arr = np.full(N, -1, dtype=np.int8)
    actor_arr[0] = actor
    edge = np.full(N, actor, dtype=np.int8)
    edge[0] = -1
    parent = np.full(N, 0, dtype=np.int32)
    parent[0] = -1
    first_child = np.full(N, -1, dtype=np.int32)
    first_child[0] = 1
    n_children = np.zeros(N, dtype=np.int32)
    n_children[0] = n_acts
    matrix_id = np.arange(-1, n_acts, dtype=np.int32)
    strat0 = np.ones((N, H0))
    strat1 = np.ones((N, H1))
    dec_nodes = (np.zeros(0, dtype=np.int32), np.zeros(0, dtype=np.int32))
    dec_children = (np.zeros(0, dtype=np.int32), np.zeros(0, dtype=np.int32))
    dec_nodes = tuple(
        np.array([0], dtype=np.int32) if p == actor else dec_nodes[p]
        for p in (0, 1))
    dec_children = tuple(
        np.arange(1, N, dtype=np.int32) if p == actor else dec_children[p]
        for p in (0, 1))
    return FlatTree(
        n_nodes=N,
        n_hands=(H0, H1),
        parent=parent,
        kind=kind,
        actor=actor_arr,
        edge_actor=edge,
        first_child=first_child,
        n_children=n_children,
        chance_scalar=np.ones(N),
        pay=np.zeros(N),
        board_id=np.full(N, -1, dtype=np.int32),
        matrix_id=matrix_id,
        histories=[None] * N,
        strat_init=(strat0, strat1),
        boards=[],
        board_order=np.full((0, max(H0, H1)), -1, dtype=np.int32),
        board_orank=np.full((0, max(H0, H1)), -1, dtype=np.int64),
        board_nlive=np.zeros(0, dtype=np.int32),
        fold_leaves=np.zeros(0, dtype=np.int32),
        showdown_leaves=np.zeros(0, dtype=np.int32),
        value_leaves=np.zeros(0, dtype=np.int32),
        matrix_leaves=np.arange(1, N, dtype=np.int32),
        matrices=mats,
        dec_nodes=dec_nodes,
        dec_children=dec_children,
        hands=None,
        game=None,
        hand_cards=None,
    )
