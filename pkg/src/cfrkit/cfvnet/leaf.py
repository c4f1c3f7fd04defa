"""Network-backed leaf evaluator for depth-limited lookaheads.

Adapts per-round value networks to the solver's leaf contract
(``evaluate(hist, r0, r1) -> (v0, v1)`` with raw mass-weighted reaches in
and opponent-mass-weighted chip values out): ranges are normalized and
folded to buckets on the way in; bucket outputs come back in pot
fractions, are broadcast to member hands, and rescaled by the pot and the
opponent's reach mass on the way out.  The rescaling preserves the
contract's proportionality in the opponent's total mass exactly; within a
bucket, hands share one value by construction.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..games import GameSpec
from ..hands import HandSpace
from .buckets import BucketMap
from .encode import encode
from .net import Mlp, forward

__all__ = ["NetValueFn"]


class NetValueFn:
    """Leaf evaluator backed by one network per boundary round."""

    def __init__(self, spec: GameSpec, nets: dict[int, Mlp],
                 bmaps: dict[int, BucketMap],
                 hands: Optional[HandSpace] = None) -> None:
        self.spec = spec
        self.nets = dict(nets)
        self.bmaps = dict(bmaps)
        self.hands = hands or HandSpace(spec)

    def evaluate(self, hist, r0, r1):
        rnd = hist.round
        net = self.nets[rnd]
        bmap = self.bmaps[rnd]
        board, pot = hist.board, hist.pot
        r0 = np.asarray(r0, dtype=np.float64)
        r1 = np.asarray(r1, dtype=np.float64)
        m0, m1 = float(r0.sum()), float(r1.sum())
        n0 = r0 / m0 if m0 > 0.0 else self.hands.uniform_range(board)
        n1 = r1 / m1 if m1 > 0.0 else self.hands.uniform_range(board)
        act = self.spec.first_to_act[rnd]
        first, second = (n0, n1) if act == 0 else (n1, n0)
        x = encode(first, second, pot, board, bmap)
        v = forward(net, x)
        b = bmap.buckets
        assign = bmap.assignment(board)
        va = _to_hands(v[:b], assign)
        vb = _to_hands(v[b:], assign)
        v0, v1 = (va, vb) if act == 0 else (vb, va)
        return m1 * pot * v0, m0 * pot * v1


def _to_hands(per_bucket: np.ndarray, assign: np.ndarray) -> np.ndarray:
    out = np.zeros(len(assign))
    live = assign >= 0
    out[live] = per_bucket[assign[live]]
    return out
