"""Closed formulas for the biased walk on trees and two-complete free products.

Everything here is an explicit algebraic expression; independent DP and
Monte-Carlo estimates of the same quantities live in :mod:`walkspec.dp` and
:mod:`walkspec.simulate` and are cross-checked against these in the
verification suite.
"""

from __future__ import annotations

import math

from .errors import DomainError, HypothesisViolated, OutsideRadius


def _check_tree_args(d: int, lam: float) -> None:
    if d < 2:
        raise DomainError(f"tree degree must be >= 2, got {d}")
    if lam < 0:
        raise DomainError(f"bias must be >= 0, got {lam}")


def tree_spectral_radius(d: int, lam: float) -> float:
    """Spectral radius of the biased walk on the d-regular tree.

    Equals 2 sqrt((d-1) lam) / (d-1+lam) on 0 <= lam <= d-1; the critical
    bias d-1 gives exactly 1.
    """
    _check_tree_args(d, lam)
    if lam > d - 1:
        raise DomainError(f"formula stated on [0, d-1]; got lam={lam} > {d - 1}")
    return 2.0 * math.sqrt((d - 1) * lam) / (d - 1 + lam)


def tree_return_probability(d: int, lam: float) -> float:
    """Probability the walk on the d-regular tree ever returns to the root."""
    _check_tree_args(d, lam)
    return min(lam, d - 1.0) / (d - 1.0)


def log_catalan(k: int) -> float:
    """log of the k-th Catalan number, C(2k, k) / (k+1)."""
    if k < 0:
        raise DomainError(f"Catalan index must be >= 0, got {k}")
    return math.lgamma(2 * k + 1) - math.lgamma(k + 1) - math.lgamma(k + 2)


def tree_log_first_return_prob(d: int, lam: float, n: int) -> float:
    """log of the probability that the first return to the root is at step 2n.

    The height of the walk is a birth-death chain; first-return paths of
    length 2n are counted by the (n-1)-st Catalan number, each carrying
    n-1 up-factors and n down-factors.
    """
    _check_tree_args(d, lam)
    if lam == 0:
        raise DomainError("first-return law requires bias > 0")
    if n < 1:
        raise DomainError(f"step count must be >= 1, got {n}")
    log_up = math.log(d - 1.0) - math.log(d - 1.0 + lam)
    log_down = math.log(lam) - math.log(d - 1.0 + lam)
    return log_catalan(n - 1) + (n - 1) * log_up + n * log_down


def tree_first_return_prob(d: int, lam: float, n: int) -> float:
    """Probability that the first return to the root happens at step 2n."""
    return math.exp(tree_log_first_return_prob(d, lam, n))


def tree_series_radius(d: int, lam: float) -> float:
    """Convergence radius of the first-return series on the d-regular tree."""
    _check_tree_args(d, lam)
    if lam == 0:
        raise DomainError("series radius requires bias > 0")
    return (d - 1 + lam) / (2.0 * math.sqrt(lam * (d - 1)))


def tree_first_return_series(d: int, lam: float, z: float) -> float:
    """First-return generating function U(z) on the d-regular tree.

    Defined for |z| <= (d-1+lam) / (2 sqrt(lam (d-1))).
    """
    radius = tree_series_radius(d, lam)
    if abs(z) > radius * (1 + 1e-15):
        raise OutsideRadius(f"|z|={abs(z)} beyond radius {radius}")
    a = d - 1.0 + lam
    disc = max(a * a - 4.0 * lam * (d - 1.0) * z * z, 0.0)
    return (a - math.sqrt(disc)) / (2.0 * (d - 1.0))


def tree_green_function(d: int, lam: float, z: float) -> float:
    """Green function G(z) = 1 / (1 - U(z)) on the d-regular tree.

    Requires 0 < lam <= d-1 and |z| strictly inside the series radius.
    """
    _check_tree_args(d, lam)
    if lam == 0 or lam > d - 1:
        raise DomainError(f"green function stated for 0 < lam <= d-1, got {lam}")
    radius = tree_series_radius(d, lam)
    if abs(z) >= radius:
        raise OutsideRadius(f"|z|={abs(z)} not inside radius {radius}")
    return 1.0 / (1.0 - tree_first_return_series(d, lam, z))


def tree_darboux_c1(d: int, lam: float) -> float:
    """Second-derivative constant of the square-root singularity expansion."""
    _check_tree_args(d, lam)
    if not 0 < lam < d - 1:
        raise DomainError(f"constant defined on (0, d-1), got lam={lam}")
    return (d - 1.0 - lam) ** 3 / (2.0 * (d - 1.0) * (d - 1.0 + lam) ** 2)


def tree_darboux_c2(d: int, lam: float) -> float:
    """Mixed-derivative constant of the square-root singularity expansion."""
    _check_tree_args(d, lam)
    if not 0 < lam < d - 1:
        raise DomainError(f"constant defined on (0, d-1), got lam={lam}")
    return 2.0 * tree_spectral_radius(d, lam) * (d - 1.0) / (d - 1.0 - lam)


def tree_return_asymptotic_constant(d: int, lam: float) -> float:
    """Constant c in p^(2n)(o,o) ~ c rho^(2n) n^(-3/2) for the subcritical tree.

    Equals (d-1-lam)^2 / (16 sqrt(pi lam) (d-1)^(3/2)).  Degenerates at the
    critical bias, where the law is 1/sqrt(pi n) instead.
    """
    _check_tree_args(d, lam)
    if not 0 < lam < d - 1:
        raise DomainError(f"constant defined on (0, d-1), got lam={lam}")
    return (d - 1.0 - lam) ** 2 / (
        16.0 * math.sqrt(math.pi * lam) * (d - 1.0) ** 1.5
    )


def _check_two_complete(m1: int, m2: int, allow_degenerate: bool) -> None:
    if m1 < 1 or m2 < 1:
        raise HypothesisViolated(f"factor sizes must be >= 1, got ({m1}, {m2})")
    if m1 * m2 < 2 and not allow_degenerate:
        raise HypothesisViolated(
            "two-complete formulas require m1*m2 >= 2 (K_2 * K_2 is the line); "
            "pass allow_degenerate=True to evaluate anyway"
        )


def two_complete_critical_bias(m1: int, m2: int) -> float:
    """Critical bias sqrt(m1 m2) of K_{m1+1} * K_{m2+1}."""
    if m1 < 1 or m2 < 1:
        raise HypothesisViolated(f"factor sizes must be >= 1, got ({m1}, {m2})")
    return math.sqrt(m1 * m2)


def two_complete_speed(
    m1: int, m2: int, lam: float, allow_degenerate: bool = False
) -> float:
    """Almost-sure escape speed of the biased walk on K_{m1+1} * K_{m2+1}.

    S(lam) = 2 (m1 m2 - lam^2) / ((2 lam + m)(lam + m - 1)) with m = m1+m2,
    strictly decreasing on [0, sqrt(m1 m2)] and zero at the critical bias.
    """
    _check_two_complete(m1, m2, allow_degenerate)
    lam_c = two_complete_critical_bias(m1, m2)
    if lam < 0 or lam > lam_c * (1 + 1e-15):
        raise HypothesisViolated(f"speed formula holds for 0 <= lam <= {lam_c}")
    m = m1 + m2
    return 2.0 * (m1 * m2 - lam * lam) / ((2.0 * lam + m) * (lam + m - 1.0))


def two_complete_spectral_radius(
    m1: int, m2: int, lam: float, allow_degenerate: bool = False
) -> float:
    """Spectral radius of the biased walk on K_{m1+1} * K_{m2+1}.

    rho(lam) = (m-2 + sqrt((m1-m2)^2 + 4 lam (sqrt(m1)+sqrt(m2))^2))
               / (2 (m + lam - 1)),
    strictly increasing on (0, sqrt(m1 m2)] with rho(lam_c) = 1.
    """
    _check_two_complete(m1, m2, allow_degenerate)
    lam_c = two_complete_critical_bias(m1, m2)
    if lam <= 0 or lam > lam_c * (1 + 1e-15):
        raise HypothesisViolated(
            f"spectral radius formula holds for 0 < lam <= {lam_c}, got {lam}"
        )
    m = m1 + m2
    root = math.sqrt(
        (m1 - m2) ** 2 + 4.0 * lam * (math.sqrt(m1) + math.sqrt(m2)) ** 2
    )
    return (m - 2.0 + root) / (2.0 * (m + lam - 1.0))


def zero_bias_spectral_radius_limit(ms) -> float:
    """Limit of the spectral radius as the bias vanishes: max(m_i - 1)/(m - 1)."""
    ms = [int(m) for m in ms]
    if len(ms) < 2 or any(m < 1 for m in ms):
        raise HypothesisViolated(f"need >= 2 factors with m_i >= 1, got {ms}")
    m = sum(ms)
    return (max(ms) - 1.0) / (m - 1.0)


def occupation_fraction_limit(m1: int, m2: int, lam: float, i: int) -> float:
    """Limiting fraction of time spent at type-i vertices: (m_i+lam)/(m+2 lam)."""
    if i not in (1, 2):
        raise DomainError(f"type index must be 1 or 2, got {i}")
    if m1 < 1 or m2 < 1:
        raise HypothesisViolated(f"factor sizes must be >= 1, got ({m1}, {m2})")
    lam_c = two_complete_critical_bias(m1, m2)
    if lam < 0 or lam >= lam_c:
        raise DomainError(f"occupation limit holds for 0 <= lam < {lam_c}")
    m = m1 + m2
    mi = m1 if i == 1 else m2
    return (mi + lam) / (m + 2.0 * lam)


def excursion_continue_prob(m1: int, m2: int, lam: float, i: int) -> float:
    """Per-step probability that a same-type run extends: (m_i-1)/(m-1+lam).

    Run extensions beyond the first step are i.i.d. with this success
    probability, so run-length-minus-one is geometric.
    """
    if i not in (1, 2):
        raise DomainError(f"type index must be 1 or 2, got {i}")
    if lam < 0:
        raise DomainError(f"bias must be >= 0, got {lam}")
    m = m1 + m2
    mi = m1 if i == 1 else m2
    return (mi - 1.0) / (m - 1.0 + lam)
