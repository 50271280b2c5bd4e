"""Biased transition kernel, conductances, stationary measure, quotient chain.

The walk with bias ``lam`` moves from v != o to its unique lower neighbor
with probability lam / (d_v + (lam - 1) d_v^-) and to every other neighbor
with probability 1 / (d_v + (lam - 1) d_v^-); from the root it is uniform.
Both families have d_v^- = 1 off the root, so the denominator is
``degree + lam - 1`` throughout.

The quotient chain lumps the walk onto (level, type) states; the lumping is
exact because vertices of equal level and type are related by root-fixing
automorphisms.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    InvalidState,
    InvalidVertex,
    NegativeBias,
    NonpositiveBias,
    UnsupportedModel,
)
from .models import (
    FreeProductComplete,
    GraphModel,
    RegularTree,
    VertexAddr,
    level_degrees,
    neighbors,
    validate_model,
)

ORIGIN = (0, 0)


@dataclass(frozen=True)
class TransitionRow:
    """One row of a transition kernel: (target, probability) pairs."""

    entries: tuple[tuple[object, float], ...]

    def probability(self, target) -> float:
        for tgt, p in self.entries:
            if tgt == target:
                return p
        return 0.0

    def total(self) -> float:
        return sum(p for _, p in self.entries)


def transition_row(model: GraphModel, lam: float, v: VertexAddr) -> TransitionRow:
    """Kernel row at ``v``: uniform at the root, lam-weighted down elsewhere."""
    if lam < 0:
        raise NegativeBias(f"bias must be >= 0, got {lam}")
    nbrs = neighbors(model, v)
    if v.is_root:
        p = 1.0 / len(nbrs)
        return TransitionRow(tuple((u, p) for u, _ in nbrs))
    deg = level_degrees(model, v)
    den = deg.d_v + (lam - 1.0) * deg.d_minus
    return TransitionRow(
        tuple((u, (lam if delta == -1 else 1.0) / den) for u, delta in nbrs)
    )


def conductance(model: GraphModel, lam: float, x: VertexAddr, y: VertexAddr) -> float:
    """Edge weight lam**(-n) where n = min(|x|, |y|).

    Only defined for lam > 0; the network description degenerates at 0.
    """
    if lam <= 0:
        raise NonpositiveBias(f"conductance requires bias > 0, got {lam}")
    nbr_addrs = [u for u, _ in neighbors(model, x)]
    if y not in nbr_addrs:
        raise InvalidVertex(f"{x} and {y} are not adjacent")
    n = min(len(x), len(y))
    return lam ** (-n)


def stationary_weight(model: GraphModel, lam: float, v: VertexAddr) -> float:
    """Reversing measure: mu(o) = d_o, mu(x) = (d^+ + d^0 + lam d^-) lam^(-|x|)."""
    if lam <= 0:
        raise NonpositiveBias(f"stationary weight requires bias > 0, got {lam}")
    deg = level_degrees(model, v)
    if v.is_root:
        return float(deg.d_v)
    return (deg.d_plus + deg.d_zero + lam * deg.d_minus) * lam ** (-len(v))


State = tuple[int, int]


@dataclass(frozen=True)
class QuotientChain:
    """Lumped walk on (level, type) states.

    Trees use type 0 at every level; two-factor free products use types
    1 and 2.  State (0, 0) is the origin.  Rows are generated on demand,
    so the chain supports any horizon without truncation.
    """

    model: GraphModel
    lam: float

    @property
    def n_types(self) -> int:
        return 1 if isinstance(self.model, RegularTree) else 2

    def states_up_to(self, level: int) -> list[State]:
        if isinstance(self.model, RegularTree):
            return [ORIGIN] + [(k, 0) for k in range(1, level + 1)]
        return [ORIGIN] + [
            (k, t) for k in range(1, level + 1) for t in (1, 2)
        ]

    def row(self, state: State) -> TransitionRow:
        return quotient_row(self, state)


def build_quotient(model: GraphModel, lam: float) -> QuotientChain:
    """Quotient of the biased walk whose return probabilities match the graph.

    Supported for regular trees and two-factor free products.  Free products
    with three or more factors have no per-type row table here; their
    spectral quantities flow through the fixed-point solvers instead.
    """
    validate_model(model)
    if lam < 0:
        raise NegativeBias(f"bias must be >= 0, got {lam}")
    if isinstance(model, FreeProductComplete) and model.r != 2:
        raise UnsupportedModel(
            f"quotient chain is defined for 2 factors, got {model.r}"
        )
    return QuotientChain(model, lam)


def quotient_row(chain: QuotientChain, state: State) -> TransitionRow:
    """Transition row of the lumped chain at ``state``."""
    k, t = state
    lam = chain.lam
    model = chain.model
    if k < 0:
        raise InvalidState(f"negative level in state {state}")
    if isinstance(model, RegularTree):
        if t != 0 or (k == 0 and state != ORIGIN):
            raise InvalidState(f"tree states are (k, 0), got {state}")
        if k == 0:
            return TransitionRow((((1, 0), 1.0),))
        den = model.d - 1 + lam
        return TransitionRow(
            (
                ((k - 1, 0), lam / den),
                ((k + 1, 0), (model.d - 1) / den),
            )
        )
    m1, m2 = model.ms
    m = model.m
    if state == ORIGIN:
        return TransitionRow((((1, 1), m1 / m), ((1, 2), m2 / m)))
    if t not in (1, 2) or k == 0:
        raise InvalidState(f"free-product states are (k, 1|2) or (0, 0), got {state}")
    den = m - 1 + lam
    mi = model.ms[t - 1]
    other = 3 - t
    mo = model.ms[other - 1]
    down_state = ORIGIN if k == 1 else (k - 1, other)
    return TransitionRow(
        (
            (down_state, lam / den),
            ((k, t), (mi - 1) / den),
            ((k + 1, other), mo / den),
        )
    )
