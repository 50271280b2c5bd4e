"""Exact n-step and first-return probabilities via log-space forward DP.

Return probabilities decay like rho^n, so a table up to n = 1e5 spans a
dynamic range far beyond what 64-bit floats can hold in linear scale.  The
DP therefore stores every state's mass as a log value and combines incoming
flows with log-sum-exp; zero mass is -inf.  This keeps the *ratios* between
entries exact to machine precision, which is all the tail estimators need.

Levels above floor(n_max / 2) are unreachable-and-returnable within the
horizon and are dropped, keeping the table exact while bounding the state
space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import BallTooLarge, DomainError, InsufficientData
from .kernel import QuotientChain
from .models import FreeProductComplete, GraphModel, RegularTree, sphere_type_counts

NEG_INF = float("-inf")


@dataclass
class SeriesTable:
    """Log-scaled table of return and first-return probabilities.

    ``log_p[n]`` is log p^(n)(o,o) and ``log_f[n]`` is log f^(n)(o,o);
    -inf marks an exactly-zero entry.  Either array may be absent when only
    one series was requested.
    """

    model: GraphModel
    lam: float
    n_max: int
    log_p: np.ndarray | None = None
    log_f: np.ndarray | None = None

    def p(self, n: int) -> float:
        if self.log_p is None:
            raise InsufficientData("table has no return-probability part")
        return float(np.exp(self.log_p[n]))

    def f(self, n: int) -> float:
        if self.log_f is None:
            raise InsufficientData("table has no first-return part")
        return float(np.exp(self.log_f[n]))


def _log(x: float) -> float:
    return math.log(x) if x > 0 else NEG_INF


def _tree_log_dp(d: int, lam: float, n_max: int, absorb_origin: bool) -> np.ndarray:
    """Forward DP for the height chain of the d-regular tree.

    Returns log p^(n)(o,o) for n = 0..n_max, or the first-return series
    when ``absorb_origin`` is set.
    """
    levels = max(1, n_max // 2)
    den = d - 1.0 + lam
    log_up = _log((d - 1.0) / den)
    log_down = _log(lam / den)

    v = np.full(levels + 1, NEG_INF)
    v[0] = 0.0
    # Up-step log-probability out of each level; the origin exits with
    # probability one.
    up_out = np.full(levels + 1, log_up)
    up_out[0] = 0.0

    out = np.full(n_max + 1, NEG_INF)
    out[0] = 0.0 if not absorb_origin else NEG_INF
    for n in range(1, n_max + 1):
        new = np.full(levels + 1, NEG_INF)
        new[1:] = v[:-1] + up_out[:-1]
        inflow = v[1:] + log_down
        new[:-1] = np.logaddexp(new[:-1], inflow)
        if absorb_origin:
            out[n] = new[0]
            new[0] = NEG_INF
        else:
            out[n] = new[0]
        v = new
    if absorb_origin and n_max >= 1:
        out[1] = NEG_INF
    return out


def _free_log_dp(
    m1: int, m2: int, lam: float, n_max: int, absorb_origin: bool
) -> np.ndarray:
    """Forward DP for the (level, type) chain of K_{m1+1} * K_{m2+1}."""
    levels = max(1, n_max // 2)
    m = m1 + m2
    den = m - 1.0 + lam
    log_down = _log(lam / den)
    log_lat = (_log((m1 - 1.0) / den), _log((m2 - 1.0) / den))
    log_up_to = (_log(m1 / den), _log(m2 / den))
    log_from_origin = (_log(m1 / m), _log(m2 / m))

    # index = level; slot 0 stays -inf, origin mass kept separately.
    a = [np.full(levels + 2, NEG_INF), np.full(levels + 2, NEG_INF)]
    origin = 0.0

    out = np.full(n_max + 1, NEG_INF)
    out[0] = 0.0 if not absorb_origin else NEG_INF
    for n in range(1, n_max + 1):
        new = [np.full(levels + 2, NEG_INF), np.full(levels + 2, NEG_INF)]
        for i in (0, 1):
            j = 1 - i
            # up into level 1 comes from the origin, deeper from the other type
            new[i][1] = origin + log_from_origin[i]
            new[i][2 : levels + 1] = a[j][1:levels] + log_up_to[i]
            new[i] = np.logaddexp(new[i], a[i] + log_lat[i])
            down_in = a[j][2 : levels + 2] + log_down
            new[i][1 : levels + 1] = np.logaddexp(new[i][1 : levels + 1], down_in)
        origin = np.logaddexp(a[0][1], a[1][1]) + log_down
        out[n] = origin
        if absorb_origin:
            origin = NEG_INF
        a = new
    return out


def p_series(chain: QuotientChain, n_max: int) -> SeriesTable:
    """Exact log p^(n)(o,o) for n = 0..n_max."""
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    model, lam = chain.model, chain.lam
    if isinstance(model, RegularTree):
        log_p = _tree_log_dp(model.d, lam, n_max, absorb_origin=False)
    else:
        m1, m2 = model.ms
        log_p = _free_log_dp(m1, m2, lam, n_max, absorb_origin=False)
    return SeriesTable(model, lam, n_max, log_p=log_p)


def f_series(chain: QuotientChain, n_max: int) -> SeriesTable:
    """Exact log f^(n)(o,o) for n = 0..n_max via an absorbing-origin DP."""
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    model, lam = chain.model, chain.lam
    if isinstance(model, RegularTree):
        log_f = _tree_log_dp(model.d, lam, n_max, absorb_origin=True)
    else:
        m1, m2 = model.ms
        log_f = _free_log_dp(m1, m2, lam, n_max, absorb_origin=True)
    return SeriesTable(model, lam, n_max, log_f=log_f)


def compute_series(chain: QuotientChain, n_max: int) -> SeriesTable:
    """Both series in one table."""
    table = p_series(chain, n_max)
    table.log_f = f_series(chain, n_max).log_f
    return table


def renewal_check(table: SeriesTable) -> float:
    """Max relative residual of p^(n) = sum_k f^(k) p^(n-k), n = 1..n_max.

    The identity couples the two tables; a small residual certifies the two
    independent DP passes against each other.
    """
    if table.log_p is None or table.log_f is None:
        raise InsufficientData("renewal check needs both series")
    lp, lf = table.log_p, table.log_f
    worst = 0.0
    for n in range(1, table.n_max + 1):
        terms = lf[1 : n + 1] + lp[n - 1 :: -1]
        conv = logsumexp(terms) if np.any(np.isfinite(terms)) else NEG_INF
        if lp[n] == NEG_INF:
            residual = 0.0 if conv == NEG_INF else float(np.exp(conv))
        else:
            residual = abs(float(np.expm1(conv - lp[n])))
        worst = max(worst, residual)
    return worst


@dataclass(frozen=True)
class SeriesRadiusEstimate:
    """Spectral-radius estimate from a return-probability tail."""

    rho_hat: float
    error: float
    slope: float
    residual_rms: float
    n_used: int


def rho_from_series(
    table: SeriesTable, period: int | None = None
) -> SeriesRadiusEstimate:
    """Estimate rho from step-2 tail ratios with the n^(-3/2) factor removed.

    Uses the even subsequence only: it carries the limit for period-2 chains
    and both parities agree for aperiodic ones.  The estimate at step n is
    (p^(n+2)/p^(n))^(1/2) * ((n+2)/n)^(3/4); the reported error is the drift
    between the half-tail and full-tail estimates.
    """
    if table.log_p is None:
        raise InsufficientData("estimate needs the return-probability part")
    if period is not None and period not in (1, 2):
        raise DomainError(f"period must be 1 or 2, got {period}")
    lp = table.log_p
    even = np.arange(0, table.n_max + 1, 2)
    usable = even[np.isfinite(lp[even])]
    usable = usable[usable + 2 <= table.n_max]
    if len(usable) < 100 or table.n_max < 200:
        raise InsufficientData(
            f"need an even subsequence of >= 100 usable ratios, have {len(usable)}"
        )

    def ratio_estimate(n: int) -> float:
        return float(
            np.exp(0.5 * (lp[n + 2] - lp[n]) + 0.75 * math.log((n + 2.0) / n))
        )

    n_hi = int(usable[-1])
    n_mid = int(usable[len(usable) // 2])
    rho_hi = ratio_estimate(n_hi)
    rho_mid = ratio_estimate(n_mid)

    window = usable[usable >= usable[-1] // 2]
    y = lp[window]
    design = np.stack([window.astype(float), np.ones_like(window, float)], axis=1)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return SeriesRadiusEstimate(
        rho_hat=rho_hi,
        error=abs(rho_hi - rho_mid) + 1e-12,
        slope=float(coef[0]),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        n_used=n_hi,
    )


def _tree_test_function_logs(d: int, lam: float, n: int):
    """log g(k) for k = 0..n+1 with g(k) = (1 + b k) ((d-1)/lam)^(-k/2)."""
    b = (d - 1.0 - lam) / (d - 1.0 + lam)
    k = np.arange(n + 2, dtype=float)
    return np.log1p(b * k) - 0.5 * k * (math.log(d - 1.0) - math.log(lam))


def rayleigh_quotient(model: GraphModel, lam: float, n: int) -> float:
    """(P f_n, f_n) / (f_n, f_n) for the radial test function cut at B(n).

    The test function depends only on the distance to the root, and both
    the kernel and the reversing measure are constant on (level, type)
    classes, so the inner products reduce to per-level sums; those are the
    exact ball sums without materializing the ball.  All terms are
    accumulated in log scale since sphere counts and lam^(-k) overflow
    long before the summands do.
    """
    if n < 1:
        raise DomainError(f"ball radius must be >= 1, got {n}")
    if n > 10**6:
        raise BallTooLarge(f"level budget exceeded: n={n}")
    d = model.degree
    if not 0 < lam < d - 1:
        raise DomainError(f"test function defined for 0 < lam < {d - 1}, got {lam}")

    log_g = _tree_test_function_logs(d, lam, n)
    den = d - 1.0 + lam
    log_lam = math.log(lam)

    if isinstance(model, RegularTree):
        # per-level vertex counts and per-vertex measure, in logs
        log_M = np.concatenate(
            ([0.0], math.log(d) + np.arange(n) * math.log(d - 1.0))
        )
        type_counts = None
    else:
        counts = sphere_type_counts(model, n)
        type_counts = counts
        log_M = np.array([0.0] + [math.log(sum(c)) for c in counts[1:]])

    ks = np.arange(n + 1, dtype=float)
    log_mu = math.log(den) - ks * log_lam
    log_mu[0] = math.log(d)

    log_den_terms = log_M + log_mu + 2.0 * log_g[: n + 1]
    log_den = logsumexp(log_den_terms)

    # numerator: log of P f_n at each (level, type), times g * mu * count
    num_terms = []
    num_terms.append(math.log(d) + log_g[0] + log_g[1])  # root: P f_n(o) = g(1)
    if isinstance(model, RegularTree):
        for k in range(1, n + 1):
            parts = [log_lam + log_g[k - 1]]
            if k < n:
                parts.append(math.log(d - 1.0) + log_g[k + 1])
            log_pf = logsumexp(parts) - math.log(den)
            num_terms.append(log_M[k] + log_mu[k] + log_g[k] + log_pf)
    else:
        for k in range(1, n + 1):
            for t in (1, 2):
                count = type_counts[k][t - 1]
                if count == 0:
                    continue
                mi = model.ms[t - 1]
                parts = [log_lam + log_g[k - 1]]
                if mi > 1:
                    parts.append(math.log(mi - 1.0) + log_g[k])
                if k < n:
                    parts.append(math.log(model.m - mi) + log_g[k + 1])
                log_pf = logsumexp(parts) - math.log(den)
                num_terms.append(
                    math.log(count) + log_mu[k] + log_g[k] + log_pf
                )
    log_num = logsumexp(num_terms)
    return float(np.exp(log_num - log_den))


def write_series_csv(table: SeriesTable, stream) -> None:
    """Emit the table as CSV with linear and log columns."""
    stream.write("n,p_n,f_n,log_p_n,log_f_n\n")
    for n in range(table.n_max + 1):
        lp = table.log_p[n] if table.log_p is not None else NEG_INF
        lf = table.log_f[n] if table.log_f is not None else NEG_INF
        p = math.exp(lp) if lp > NEG_INF else 0.0
        f = math.exp(lf) if lf > NEG_INF else 0.0
        stream.write(f"{n},{p!r},{f!r},{lp!r},{lf!r}\n")
