"""Inner loops for the flat-tree solver.

Every kernel is written as plain nested loops over preallocated arrays
(no allocation inside), compiled with numba when it is installed and
run as-is otherwise.  Set ``CFRKIT_NO_NUMBA=1`` before import to force
the plain-Python versions; the underscore-prefixed originals also stay
importable for differential testing against the compiled ones.

Array conventions (see :mod:`.flattree`): nodes are breadth-first so a
forward sweep sees parents before children and a backward sweep the
reverse; per-player strategy rows are 1.0 wherever that player has no
say, letting reach and value sweeps multiply unconditionally.
"""

from __future__ import annotations

import os

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not os.environ.get("CFRKIT_NO_NUMBA")


def maybe_jit(fn):
    if USE_NUMBA:
        return njit(cache=True)(fn)
    return fn


# ─── Strategy and reach sweeps ───────────────────────────────────────────────


def _regret_match(regret, strat, dec_nodes, first_child, n_children):
    """Per hand, strategy over a decision node's children proportional to
    positive regret; uniform when no child has positive regret."""
    H = regret.shape[1]
    for i in range(dec_nodes.shape[0]):
        p = dec_nodes[i]
        c0 = first_child[p]
        m = n_children[p]
        for h in range(H):
            total = 0.0
            for j in range(m):
                r = regret[c0 + j, h]
                if r > 0.0:
                    total += r
            if total > 0.0:
                for j in range(m):
                    r = regret[c0 + j, h]
                    strat[c0 + j, h] = r / total if r > 0.0 else 0.0
            else:
                u = 1.0 / m
                for j in range(m):
                    strat[c0 + j, h] = u
    return 0


def _down_sweep(reach, strat, parent, n_nodes):
    """reach[n] = reach[parent] * strat[n] in breadth-first order."""
    H = reach.shape[1]
    for n in range(1, n_nodes):
        p = parent[n]
        for h in range(H):
            reach[n, h] = reach[p, h] * strat[n, h]
    return 0


def _up_sweep(cfv, strat, parent, n_nodes):
    """cfv[parent] += strat[n] * cfv[n], leaves to root.  Internal rows
    must be zeroed beforehand; leaf rows hold evaluated values."""
    H = cfv.shape[1]
    for n in range(n_nodes - 1, 0, -1):
        p = parent[n]
        for h in range(H):
            cfv[p, h] += strat[n, h] * cfv[n, h]
    return 0


def _regret_update(regret, cfv, dec_nodes, first_child, n_children):
    """Accumulate instantaneous counterfactual regret: child value minus
    the node's strategy-weighted value (already in cfv[parent])."""
    H = regret.shape[1]
    for i in range(dec_nodes.shape[0]):
        p = dec_nodes[i]
        c0 = first_child[p]
        m = n_children[p]
        for h in range(H):
            v = cfv[p, h]
            for j in range(m):
                regret[c0 + j, h] += cfv[c0 + j, h] - v
    return 0


def _avg_update(avg, reach, dec_children, weight):
    """avg[c] += weight * reach[c] over the player's decision-child rows
    (reach at a child already equals own reach times strategy)."""
    H = avg.shape[1]
    for i in range(dec_children.shape[0]):
        c = dec_children[i]
        for h in range(H):
            avg[c, h] += weight * reach[c, h]
    return 0


def _discount(regret, dec_children, fpos, fneg):
    for i in range(dec_children.shape[0]):
        c = dec_children[i]
        for h in range(regret.shape[1]):
            r = regret[c, h]
            regret[c, h] = r * fpos if r > 0.0 else r * fneg
    return 0


def _avg_strategy(avg, strat, dec_nodes, first_child, n_children):
    """Normalise accumulated average weights into strategy rows; uniform
    where an infostate accumulated no weight."""
    H = avg.shape[1]
    for i in range(dec_nodes.shape[0]):
        p = dec_nodes[i]
        c0 = first_child[p]
        m = n_children[p]
        for h in range(H):
            total = 0.0
            for j in range(m):
                total += avg[c0 + j, h]
            if total > 0.0:
                for j in range(m):
                    strat[c0 + j, h] = avg[c0 + j, h] / total
            else:
                u = 1.0 / m
                for j in range(m):
                    strat[c0 + j, h] = u
    return 0


# ─── Terminal evaluation ─────────────────────────────────────────────────────


def _fold_eval(cfv, reach_opp, leaves, coef, cards, two_card, card_sums):
    """Fold leaves: winner collects the folder's commitment against every
    live opponent hand.  ``coef`` carries sign, stake and chance scalar.
    Opponent mass excludes card-sharing hands (inclusion-exclusion for
    two-card hands; the identical hand for one-card games)."""
    H = reach_opp.shape[1]
    for i in range(leaves.shape[0]):
        n = leaves[i]
        c = coef[i]
        total = 0.0
        for h in range(H):
            total += reach_opp[n, h]
        if two_card:
            for j in range(card_sums.shape[0]):
                card_sums[j] = 0.0
            for h in range(H):
                w = reach_opp[n, h]
                if w != 0.0:
                    card_sums[cards[h, 0]] += w
                    card_sums[cards[h, 1]] += w
            for h in range(H):
                cfv[n, h] = c * (total - card_sums[cards[h, 0]]
                                 - card_sums[cards[h, 1]] + reach_opp[n, h])
        else:
            for h in range(H):
                cfv[n, h] = c * (total - reach_opp[n, h])
    return 0


def _showdown_eval(cfv, reach_opp, leaves, coef, board_id, order, orank,
                   nlive, cards, two_card, below, above, card_below,
                   card_above):
    """Showdown leaves: per hand, (mass of weaker opponent hands) minus
    (mass of stronger ones), times stake and scalar.

    Hands are visited in strength order with ties grouped, so each group
    reads the running mass before adding its own (a hand never counts its
    tie group, itself included).  For two-card hands, per-card running
    masses subtract opponent combos that share a card, which restores the
    true conditional opponent distribution.
    """
    for i in range(leaves.shape[0]):
        n = leaves[i]
        c = coef[i]
        b = board_id[n]
        m = nlive[b]
        if two_card:
            for j in range(card_below.shape[0]):
                card_below[j] = 0.0
                card_above[j] = 0.0
        run = 0.0
        j = 0
        while j < m:
            k = j
            r = orank[b, j]
            while k < m and orank[b, k] == r:
                k += 1
            for t in range(j, k):
                h = order[b, t]
                v = run
                if two_card:
                    v -= card_below[cards[h, 0]] + card_below[cards[h, 1]]
                below[h] = v
            for t in range(j, k):
                h = order[b, t]
                w = reach_opp[n, h]
                run += w
                if two_card:
                    card_below[cards[h, 0]] += w
                    card_below[cards[h, 1]] += w
            j = k
        run = 0.0
        j = m - 1
        while j >= 0:
            k = j
            r = orank[b, j]
            while k >= 0 and orank[b, k] == r:
                k -= 1
            for t in range(k + 1, j + 1):
                h = order[b, t]
                v = run
                if two_card:
                    v -= card_above[cards[h, 0]] + card_above[cards[h, 1]]
                above[h] = v
            for t in range(k + 1, j + 1):
                h = order[b, t]
                w = reach_opp[n, h]
                run += w
                if two_card:
                    card_above[cards[h, 0]] += w
                    card_above[cards[h, 1]] += w
            j = k
        for t in range(m):
            h = order[b, t]
            cfv[n, h] = c * (below[h] - above[h])
    return 0


def _matrix_eval(cfv0, cfv1, reach0, reach1, leaves, matrix_id, matrices,
                 scalar, want0, want1):
    """Dense payoff leaves: cfv0 = scalar * U @ reach1, cfv1 = -scalar *
    U^T @ reach0."""
    H0 = reach0.shape[1]
    H1 = reach1.shape[1]
    for i in range(leaves.shape[0]):
        n = leaves[i]
        mid = matrix_id[n]
        s = scalar[n]
        if want0:
            for a in range(H0):
                acc = 0.0
                for b in range(H1):
                    acc += matrices[mid, a, b] * reach1[n, b]
                cfv0[n, a] = s * acc
        if want1:
            for b in range(H1):
                acc = 0.0
                for a in range(H0):
                    acc += matrices[mid, a, b] * reach0[n, a]
                cfv1[n, b] = -s * acc
    return 0


# ─── Best response ───────────────────────────────────────────────────────────


def _br_up_sweep(br, strat_own, parent, kind, actor, n_nodes, player,
                 decision_kind):
    """Backward sweep turning leaf counterfactual values into best-response
    values: own decision nodes take the max over children, everything else
    sums (chance masks ride along in strat_own; opponent play is already
    inside the leaf values via their reach)."""
    H = br.shape[1]
    for n in range(n_nodes - 1, 0, -1):
        p = parent[n]
        own_choice = kind[p] == decision_kind and actor[p] == player
        for h in range(H):
            v = br[n, h]
            if not own_choice:
                v *= strat_own[n, h]
                br[p, h] += v
            else:
                if v > br[p, h]:
                    br[p, h] = v
    return 0


def _br_init(br, kind, actor, player, decision_kind, neg_inf):
    for n in range(br.shape[0]):
        if kind[n] == decision_kind and actor[n] == player:
            for h in range(br.shape[1]):
                br[n, h] = neg_inf
        else:
            for h in range(br.shape[1]):
                br[n, h] = 0.0
    return 0


# ─── Compiled bindings ───────────────────────────────────────────────────────

regret_match_k = maybe_jit(_regret_match)
down_sweep_k = maybe_jit(_down_sweep)
up_sweep_k = maybe_jit(_up_sweep)
regret_update_k = maybe_jit(_regret_update)
avg_update_k = maybe_jit(_avg_update)
discount_k = maybe_jit(_discount)
avg_strategy_k = maybe_jit(_avg_strategy)
fold_eval_k = maybe_jit(_fold_eval)
showdown_eval_k = maybe_jit(_showdown_eval)
matrix_eval_k = maybe_jit(_matrix_eval)
br_up_sweep_k = maybe_jit(_br_up_sweep)
br_init_k = maybe_jit(_br_init)
