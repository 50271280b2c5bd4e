"""Bisection solvers for implicitly characterized quantities.

Covers volume growth rates of free products (via their factors' sphere-size
generating functions), the critical bias, the first-return generating
function U(z) as the smallest fixed point of a one-parameter map, and the
spectral radius as the reciprocal of the smallest z at which that fixed
point becomes tangent.

Every root here is a root of a monotone function on a bracket, so plain
bisection is used throughout: robustness over speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DomainError,
    HypothesisViolated,
    MultipleRoots,
    NoConvergence,
    NoRoot,
)

GROWTH_XTOL = 1e-12
RADIUS_XTOL = 1e-10
_DIVERGENCE_LIMIT = 1.5
_MAX_PLAIN_ITERS = 100_000
_FAST_ITERS = 4_000


@dataclass(frozen=True)
class Complete:
    """Complete-graph factor K_{m+1}; sphere series m*z."""

    m: int


@dataclass(frozen=True)
class Cycle:
    """Cycle factor of length l >= 3; spheres have two vertices per level
    except a single antipode when l is even."""

    l: int


FactorSpec = Complete | Cycle


def sphere_series(factor: FactorSpec, z: float) -> float:
    """Generating function of the factor's sphere sizes, sum |dB(n)| z^n."""
    if isinstance(factor, Complete):
        if factor.m < 1:
            raise DomainError(f"complete factor requires m >= 1, got {factor.m}")
        return factor.m * z
    if factor.l < 3:
        raise DomainError(f"cycle factor requires length >= 3, got {factor.l}")
    l = factor.l
    if l % 2 == 1:
        return sum(2.0 * z**j for j in range(1, (l - 1) // 2 + 1))
    return sum(2.0 * z**j for j in range(1, (l - 2) // 2 + 1)) + z ** (l // 2)


@dataclass(frozen=True)
class FixedPointResult:
    value: float
    residual: float
    iterations: int
    bracket: tuple[float, float]


def bisect_root(
    f, lo: float, hi: float, xtol: float, max_iter: int = 200
) -> FixedPointResult:
    """Locate the sign change of ``f`` on [lo, hi] to bracket width ``xtol``.

    ``f(lo)`` and ``f(hi)`` must have opposite signs.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return FixedPointResult(lo, 0.0, 0, (lo, lo))
    if fhi == 0.0:
        return FixedPointResult(hi, 0.0, 0, (hi, hi))
    if (flo < 0) == (fhi < 0):
        raise NoRoot(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")
    it = 0
    while hi - lo > xtol and it < max_iter:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fmid = f(mid)
        if fmid == 0.0:
            return FixedPointResult(mid, 0.0, it + 1, (mid, mid))
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
        it += 1
    mid = 0.5 * (lo + hi)
    return FixedPointResult(mid, f(mid), it, (lo, hi))


def growth_root(factors) -> FixedPointResult:
    """Solve sum_i psi_i(z)/(1 + psi_i(z)) = 1 for the unique positive z.

    The left side is strictly increasing from 0, so a single bisection
    bracket suffices.  The growth rate of the free product is 1/z.
    """
    factors = list(factors)
    if len(factors) < 2:
        raise NoRoot(f"free product growth needs >= 2 factors, got {len(factors)}")

    def balance(z: float) -> float:
        total = 0.0
        for fac in factors:
            psi = sphere_series(fac, z)
            total += psi / (1.0 + psi)
        return total - 1.0

    hi = 1.0
    expansions = 0
    while balance(hi) <= 0:
        hi *= 2.0
        expansions += 1
        if expansions > 60:
            raise NoRoot("balance never reaches 1; degenerate factor list")
    return bisect_root(balance, 0.0, hi, GROWTH_XTOL)


def free_product_growth(factors) -> float:
    """Volume growth rate of the free product of the given factors."""
    return 1.0 / growth_root(factors).value


def critical_bias(ms) -> float:
    """Critical bias of a free product of complete graphs, = its growth rate."""
    ms = [int(m) for m in ms]
    if len(ms) < 2 or any(m < 1 for m in ms):
        raise HypothesisViolated(f"need >= 2 factors with m_i >= 1, got {ms}")
    return free_product_growth([Complete(m) for m in ms])


def cycle_balance(d: int, l: int, z: float) -> float:
    """(d-2) z/(1+z) + k_l(z)/(1+k_l(z)) for the degree-d, girth-l graph."""
    kl = sphere_series(Cycle(l), z)
    return (d - 2) * z / (1.0 + z) + kl / (1.0 + kl)


def regular_cycle_growth(d: int, l: int) -> float:
    """Growth rate of the d-regular free product of d-2 edges and one l-cycle.

    This is the vertex-transitive d-regular graph with minimal cycle length
    l built from d-2 involutions and one l-cycle; every d-regular transitive
    graph with girth l is covered by it.  Its growth is strictly below d-1,
    witnessed by the balance function staying below 1 at z = 1/(d-1).
    """
    if d < 3:
        raise DomainError(f"degree must be >= 3, got {d}")
    if l < 3:
        raise DomainError(f"cycle length must be >= 3, got {l}")
    at_tree_radius = cycle_balance(d, l, 1.0 / (d - 1))
    if not at_tree_radius < 1.0:
        raise NoRoot(
            f"balance at 1/(d-1) is {at_tree_radius}, expected < 1"
        )
    result = growth_root([Complete(1)] * (d - 2) + [Cycle(l)])
    return 1.0 / result.value


def return_map(ms, lam: float, z: float, u: float) -> float:
    """Self-consistency map whose smallest fixed point is U(z).

    F(z, u) = (1/2m) sum_i [ -(phi_i - m u) + sqrt((phi_i - m u)^2
              + 4 lam m_i z^2) ] with phi_i(z) = m - 1 + lam - (m_i - 1) z.
    """
    m = float(sum(ms))
    total = 0.0
    for mi in ms:
        a = (m - 1.0 + lam - (mi - 1.0) * z) - m * u
        total += -a + math.sqrt(a * a + 4.0 * lam * mi * z * z)
    return total / (2.0 * m)


def return_map_du(ms, lam: float, z: float, u: float) -> float:
    """Partial derivative of :func:`return_map` in its u argument."""
    m = float(sum(ms))
    r = len(ms)
    total = 0.0
    for mi in ms:
        a = (m - 1.0 + lam - (mi - 1.0) * z) - m * u
        rad = a * a + 4.0 * lam * mi * z * z
        if rad > 0.0:
            total += a / math.sqrt(rad)
        elif a != 0.0:
            total += math.copysign(1.0, a)
    return 0.5 * r - 0.5 * total


def _slope_one_point(ms, lam: float, z: float) -> float:
    """The unique u at which d return_map / du = 1 (the slope is increasing)."""
    lo, hi = 0.0, 1.0
    grow = 0
    while return_map_du(ms, lam, z, hi) <= 1.0:
        lo = hi
        hi *= 2.0
        grow += 1
        if grow > 200:
            raise NoConvergence("slope never reaches 1")
    res = bisect_root(
        lambda u: return_map_du(ms, lam, z, u) - 1.0, lo, hi, 1e-15, max_iter=300
    )
    return res.value


def solve_return_series(ms, lam: float, z: float, tol: float = 1e-14) -> float:
    """Smallest nonnegative fixed point of u -> return_map(ms, lam, z, u).

    Iterates from 0; the map is increasing and convex in u with a positive
    value at 0, so the iterates increase monotonically to the smallest fixed
    point when one exists.  Near the tangency point the plain iteration
    slows down critically, so after a fixed budget the solve switches to
    bisection between the last iterate and the slope-1 point, which brackets
    the fixed point whenever it exists.

    Raises:
        NoConvergence: when no fixed point exists (z beyond the series
            radius) or iterates pass the divergence limit.
    """
    if lam < 0:
        raise DomainError(f"bias must be >= 0, got {lam}")
    u = 0.0
    for _ in range(_FAST_ITERS):
        nxt = return_map(ms, lam, z, u)
        if nxt > _DIVERGENCE_LIMIT:
            raise NoConvergence(
                f"iterates exceeded {_DIVERGENCE_LIMIT}; z={z} is beyond the radius"
            )
        if nxt - u <= tol * max(1.0, u):
            return nxt
        u = nxt

    # Critical slowing down: resolve via the convex structure.  The minimum
    # of return_map(u) - u sits at the slope-1 point; its sign decides
    # whether a fixed point exists at all.
    if return_map_du(ms, lam, z, u) >= 1.0:
        raise NoConvergence(f"no fixed point below the divergence region at z={z}")
    u_top = _slope_one_point(ms, lam, z)
    gap_at_top = return_map(ms, lam, z, u_top) - u_top
    if gap_at_top > 0.0:
        raise NoConvergence(f"map has no fixed point at z={z} (min gap {gap_at_top})")
    if gap_at_top == 0.0:
        return u_top
    res = bisect_root(
        lambda v: return_map(ms, lam, z, v) - v, u, u_top, 1e-15, max_iter=300
    )
    return res.value


def _validate_free_product(ms) -> list[int]:
    ms = [int(m) for m in ms]
    if len(ms) < 2 or any(m < 1 for m in ms):
        raise HypothesisViolated(f"need >= 2 factors with m_i >= 1, got {ms}")
    return ms


def free_product_spectral_radius(
    ms,
    lam: float,
    xtol: float = RADIUS_XTOL,
    prescan_points: int = 64,
) -> float:
    """Spectral radius of the biased walk on a free product of complete graphs.

    1/rho is the smallest z >= 1 at which the fixed point of the return map
    turns tangent (slope 1).  The sign of ``slope(z) - 1`` at the solved
    fixed point drives a bisection; a z where the fixed point no longer
    exists counts as the positive side.  A dense pre-scan guards the
    single-sign-change assumption.
    """
    ms = _validate_free_product(ms)
    lam_c = critical_bias(ms)
    if not 0 < lam < lam_c:
        raise HypothesisViolated(
            f"spectral radius solver requires 0 < lam < lam_c = {lam_c}, got {lam}"
        )

    def slope_excess(z: float) -> float:
        try:
            u = solve_return_series(ms, lam, z)
        except NoConvergence:
            return 1.0
        return return_map_du(ms, lam, z, u) - 1.0

    lo = 1.0
    if slope_excess(lo) >= 0:
        raise NoConvergence("slope already >= 1 at z = 1; expected subcritical bias")
    hi = 1.1
    while slope_excess(hi) < 0:
        lo = hi
        hi *= 1.5
        if hi > 1e3:
            raise NoConvergence("no tangency found below z = 1e3")

    signs = []
    for i in range(prescan_points):
        zi = 1.0 + (hi - 1.0) * (i + 1) / prescan_points
        signs.append(slope_excess(zi) >= 0)
    changes = sum(1 for a, b in zip(signs, signs[1:]) if a != b)
    if changes > 1:
        raise MultipleRoots(
            f"{changes} sign changes of the tangency criterion on [1, {hi}]"
        )

    res = bisect_root(slope_excess, lo, hi, xtol)
    return 1.0 / res.value
