"""Tail-shape fitting and bias sweeps.

Return probabilities of both families decay like c * rho^n * n^(-3/2) away
from the critical bias; the fitter recovers (rho, exponent, constant) from
a log-linear least squares on the table tail and the sweep machinery
evaluates rho along bias grids through every available route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import closed_form, fixed_point
from .dp import SeriesTable, p_series, rho_from_series
from .errors import DomainError, InsufficientData
from .kernel import build_quotient
from .models import FreeProductComplete, GraphModel, RegularTree
from .simulate import RNG_ID


@dataclass(frozen=True)
class TailFit:
    """Fit of log p^(n) = n log(rho) - alpha log(n/2) + log(c) on even n.

    The power-law factor is indexed by the half step count: even-step
    tables are the natural clock for period-2 chains, and the constant is
    then directly comparable with the subcritical tree law.  The rms of
    the fit residual is reported, never hidden.
    """

    rho_hat: float
    exponent_hat: float
    constant_hat: float
    window: tuple[int, int]
    residual_rms: float
    n_points: int


def fit_tail(table: SeriesTable, window: tuple[int, int]) -> TailFit:
    """Three-parameter least squares on the even subsequence of a table."""
    if table.log_p is None:
        raise InsufficientData("tail fit needs the return-probability part")
    n_lo, n_hi = window
    if n_lo < 0 or n_hi > table.n_max or n_hi - n_lo < 50:
        raise InsufficientData(f"window {window} invalid for table of {table.n_max}")
    ns = np.arange(n_lo + (n_lo % 2), n_hi + 1, 2)
    lp = table.log_p[ns]
    mask = np.isfinite(lp)
    ns, lp = ns[mask].astype(float), lp[mask]
    if len(ns) < 25:
        raise InsufficientData(f"only {len(ns)} usable even points in {window}")
    design = np.stack([ns, -np.log(ns / 2.0), np.ones_like(ns)], axis=1)
    coef, *_ = np.linalg.lstsq(design, lp, rcond=None)
    resid = lp - design @ coef
    return TailFit(
        rho_hat=float(np.exp(coef[0])),
        exponent_hat=float(coef[1]),
        constant_hat=float(np.exp(coef[2])),
        window=(n_lo, n_hi),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        n_points=len(ns),
    )


def verify_f_asymptotics(d: int, lam: float, n_max: int) -> float:
    """Max relative deviation of the first-return law from its tail shape.

    Checks f^(2n) against pi^(-1/2) w^(2n) n^(-3/2) with
    w = 2 sqrt((d-1) lam)/(d-1+lam) over n in [n_max/2, n_max]; the
    comparison is valid for every positive bias, including the recurrent
    regime where w is no longer the spectral radius.
    """
    if lam <= 0:
        raise DomainError(f"first-return law requires bias > 0, got {lam}")
    log_w = math.log(2.0) + 0.5 * (
        math.log(d - 1.0) + math.log(lam)
    ) - math.log(d - 1.0 + lam)
    worst = 0.0
    for n in range(max(1, n_max // 2), n_max + 1):
        log_f = closed_form.tree_log_first_return_prob(d, lam, n)
        log_target = -0.5 * math.log(math.pi) + 2 * n * log_w - 1.5 * math.log(n)
        worst = max(worst, abs(math.expm1(log_f - log_target)))
    return worst


@dataclass
class SweepRecord:
    """One bias grid point with every computed route and their gaps."""

    model: str
    lam: float
    rho_closed: float | None = None
    rho_solver: float | None = None
    rho_dp: float | None = None
    gap_closed_solver: float | None = None
    gap_closed_dp: float | None = None
    gap_solver_dp: float | None = None
    speed_closed: float | None = None
    speed_mc: float | None = None
    speed_se: float | None = None
    n_max: int | None = None
    steps: int | None = None
    replicas: int | None = None
    seed: int | None = None
    rng_id: str = RNG_ID
    wall_time_ms: float | None = None


def _solver_factors(model: GraphModel) -> list[int]:
    if isinstance(model, RegularTree):
        return [1] * model.d
    return list(model.ms)


def rho_routes(
    model: GraphModel, lam: float, n_max: int | None = None
) -> SweepRecord:
    """Evaluate the spectral radius through all routes valid at this bias."""
    rec = SweepRecord(model=model.describe(), lam=lam, n_max=n_max)
    if isinstance(model, RegularTree):
        if 0 <= lam <= model.d - 1:
            rec.rho_closed = closed_form.tree_spectral_radius(model.d, lam)
    elif model.r == 2 and not model.degenerate_line:
        lam_c = closed_form.two_complete_critical_bias(*model.ms)
        if 0 < lam <= lam_c:
            rec.rho_closed = closed_form.two_complete_spectral_radius(*model.ms, lam)
        rec.speed_closed = (
            closed_form.two_complete_speed(*model.ms, lam) if lam <= lam_c else None
        )
    ms = _solver_factors(model)
    lam_c = fixed_point.critical_bias(ms)
    if 0 < lam < lam_c:
        rec.rho_solver = fixed_point.free_product_spectral_radius(ms, lam)
    if n_max is not None and lam > 0:
        table = p_series(build_quotient(model, lam), n_max)
        rec.rho_dp = rho_from_series(table).rho_hat
    if rec.rho_closed is not None and rec.rho_solver is not None:
        rec.gap_closed_solver = abs(rec.rho_closed - rec.rho_solver)
    if rec.rho_closed is not None and rec.rho_dp is not None:
        rec.gap_closed_dp = abs(rec.rho_closed - rec.rho_dp)
    if rec.rho_solver is not None and rec.rho_dp is not None:
        rec.gap_solver_dp = abs(rec.rho_solver - rec.rho_dp)
    return rec


def continuity_sweep(
    model: GraphModel, lambdas, n_max: int | None = None
) -> list[SweepRecord]:
    """Spectral radius along a bias grid, one record per point."""
    return [rho_routes(model, float(lam), n_max=n_max) for lam in lambdas]


@dataclass(frozen=True)
class ContinuityReport:
    max_adjacent_jump: float
    endpoint_rho: float | None
    n_points: int

    def jump_within(self, bound: float) -> bool:
        return self.max_adjacent_jump < bound


def check_continuity(records: list[SweepRecord]) -> ContinuityReport:
    """Empirical Lipschitz diagnostics of a sweep's best-available rho."""
    rhos = []
    for rec in records:
        val = rec.rho_closed if rec.rho_closed is not None else rec.rho_solver
        if val is not None:
            rhos.append(val)
    if len(rhos) < 2:
        raise InsufficientData("need at least two evaluable grid points")
    jumps = [abs(b - a) for a, b in zip(rhos, rhos[1:])]
    return ContinuityReport(max(jumps), rhos[-1], len(rhos))
