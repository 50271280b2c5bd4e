"""Path simulation and statistical estimators.

Paths are simulated on full word addresses (push for up-moves, pop for
down-moves, rewrite of the last letter for lateral moves) so that
branch-membership questions stay answerable; the lumped chain is only used
as a cross-check oracle in the tests.

Reproducibility contract: the generator is PCG64 and per-replica seeds are
derived from the master seed by one splitmix64 output step applied to
``master + (replica + 1) * 0x9E3779B97F4A7C15`` (mod 2^64).  Identical
(config, seed) pairs produce identical summaries on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .closed_form import excursion_continue_prob, two_complete_critical_bias
from .errors import DomainError, HypothesisViolated, Inconclusive, NegativeBias
from .models import FreeProductComplete, GraphModel, RegularTree, VertexAddr

RNG_ID = "pcg64+splitmix64"
_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One output step of the splitmix64 generator."""
    x = (x + _GOLDEN) & _MASK64
    z = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def replica_seed(master_seed: int, replica: int) -> int:
    """Documented per-replica seed expansion of the master seed."""
    return splitmix64((master_seed + (replica + 1) * _GOLDEN) & _MASK64)


@dataclass(frozen=True)
class SimConfig:
    model: GraphModel
    lam: float
    steps: int
    replicas: int
    seed: int = 0
    burn_in: int = 0

    def __post_init__(self):
        if self.steps < 1:
            raise DomainError(f"steps must be >= 1, got {self.steps}")
        if self.replicas < 1:
            raise DomainError(f"replicas must be >= 1, got {self.replicas}")
        if not 0 <= self.burn_in <= self.steps:
            raise DomainError(f"burn-in must lie in [0, steps], got {self.burn_in}")


@dataclass
class PathSummary:
    """Aggregates of a single trajectory.

    ``type_counts[i]`` counts states X_k (k = burn_in..steps) whose current
    letter is from factor i; index 0 counts visits to the root, so the
    counts add up to steps + 1 - burn_in.  ``run_extensions[i][j]`` counts
    completed maximal same-type runs of length j+1; the final, censored run
    is not recorded.
    """

    steps: int
    final_level: int
    first_letter: tuple[int, int] | None
    type_counts: dict[int, int]
    origin_visits: int
    run_extensions: dict[int, dict[int, int]] = field(default_factory=dict)
    levels: np.ndarray | None = None
    types: np.ndarray | None = None


def _flat_targets(model: FreeProductComplete):
    root = [(fac, a) for fac, m in enumerate(model.ms, 1) for a in range(1, m + 1)]
    per_type = {}
    for fac in range(1, model.r + 1):
        per_type[fac] = [
            (j, a)
            for j, m in enumerate(model.ms, 1)
            if j != fac
            for a in range(1, m + 1)
        ]
    return root, per_type


def simulate_path(
    model: GraphModel,
    lam: float,
    steps: int,
    seed: int,
    start: VertexAddr | None = None,
    burn_in: int = 0,
    trace: bool = False,
) -> PathSummary:
    """Sample one trajectory of the biased walk and summarize it."""
    if lam < 0:
        raise NegativeBias(f"bias must be >= 0, got {lam}")
    rng = np.random.Generator(np.random.PCG64(seed))
    word: list[tuple[int, int]] = list(start.letters) if start is not None else []

    is_tree = isinstance(model, RegularTree)
    if is_tree:
        d = model.d
        den = d - 1.0 + lam
        p_down = lam / den if lam > 0 else 0.0
        ms = root_targets = up_targets = lat_hi = None
        m = d
    else:
        m = model.m
        den = m - 1.0 + lam
        p_down = lam / den if lam > 0 else 0.0
        root_targets, up_targets_map = _flat_targets(model)
        ms = (0,) + model.ms
        up_targets = [None] + [up_targets_map[fac] for fac in range(1, model.r + 1)]
        lat_hi = [0.0] + [
            p_down + (model.ms[fac - 1] - 1) / den for fac in range(1, model.r + 1)
        ]

    n_types = 1 if is_tree else model.r
    counts = [0] * (n_types + 1)
    origin_visits = 0
    run_hist: dict[int, dict[int, int]] = {i: {} for i in range(1, n_types + 1)}
    cur_type = word[-1][0] if word else 0
    run_len = 1
    if trace:
        levels = np.empty(steps + 1, dtype=np.int32)
        types = np.empty(steps + 1, dtype=np.int8)
        levels[0] = len(word)
        types[0] = cur_type

    if burn_in == 0:
        counts[cur_type] += 1
    if not word:
        origin_visits += 1

    append = word.append
    pop = word.pop
    draw = rng.random
    buf = draw(8192)
    bi = 0
    for k in range(1, steps + 1):
        if bi == 8192:
            buf = draw(8192)
            bi = 0
        u = buf[bi]
        bi += 1

        if is_tree:
            if not word:
                append((0, int(u * d) + 1))
            elif u < p_down:
                pop()
            else:
                child = int((u - p_down) * den)
                append((0, (child if child < d - 1 else d - 2) + 1))
            new_type = 0
        else:
            if not word:
                idx = int(u * m)
                append(root_targets[idx if idx < m else m - 1])
                new_type = word[-1][0]
            elif u < p_down:
                pop()
                new_type = word[-1][0] if word else 0
            else:
                fac = word[-1][0]
                hi = lat_hi[fac]
                if u < hi:
                    mi = ms[fac]
                    idx = int((u - p_down) * den)
                    if idx > mi - 2:
                        idx = mi - 2
                    letter = idx + 1 if idx + 1 < word[-1][1] else idx + 2
                    word[-1] = (fac, letter)
                else:
                    ups = up_targets[fac]
                    idx = int((u - hi) * den)
                    if idx >= len(ups):
                        idx = len(ups) - 1
                    append(ups[idx])
                new_type = word[-1][0]

        if new_type != cur_type:
            if cur_type != 0:
                hist = run_hist[cur_type]
                hist[run_len - 1] = hist.get(run_len - 1, 0) + 1
            cur_type = new_type
            run_len = 1
        else:
            run_len += 1

        if k >= burn_in:
            counts[new_type] += 1
        if not word:
            origin_visits += 1
        if trace:
            levels[k] = len(word)
            types[k] = new_type

    return PathSummary(
        steps=steps,
        final_level=len(word),
        first_letter=tuple(word[0]) if word else None,
        type_counts={i: counts[i] for i in range(n_types + 1)},
        origin_visits=origin_visits,
        run_extensions=run_hist,
        levels=levels if trace else None,
        types=types if trace else None,
    )


def _require_two_complete(config: SimConfig, allow_degenerate: bool = False):
    model = config.model
    if not isinstance(model, FreeProductComplete) or model.r != 2:
        raise HypothesisViolated(
            "estimator is stated for free products of two complete graphs"
        )
    if model.degenerate_line and not allow_degenerate:
        raise HypothesisViolated(
            "K_2 * K_2 (the line) is outside the two-complete hypotheses; "
            "pass allow_degenerate=True for sanity runs"
        )
    lam_c = two_complete_critical_bias(*model.ms)
    if config.lam >= lam_c:
        raise HypothesisViolated(
            f"transient regime requires lam < lam_c = {lam_c}, got {config.lam}"
        )
    return model


def run_replicas(config: SimConfig) -> list[PathSummary]:
    """Simulate all replicas of a config with the documented seed expansion."""
    return [
        simulate_path(
            config.model,
            config.lam,
            config.steps,
            replica_seed(config.seed, r),
            burn_in=config.burn_in,
        )
        for r in range(config.replicas)
    ]


@dataclass(frozen=True)
class SpeedEstimate:
    mean: float
    se: float
    replicas: int
    steps: int


def speed_from_summaries(summaries: list[PathSummary], steps: int) -> SpeedEstimate:
    vals = np.array([s.final_level / steps for s in summaries])
    se = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
    return SpeedEstimate(float(vals.mean()), se, len(vals), steps)


def estimate_speed(config: SimConfig, allow_degenerate: bool = False) -> SpeedEstimate:
    """Mean of |X_n|/n over replicas with its standard error."""
    _require_two_complete(config, allow_degenerate)
    return speed_from_summaries(run_replicas(config), config.steps)


@dataclass(frozen=True)
class OccupationEstimate:
    fractions: dict[int, float]
    se: dict[int, float]
    origin_fraction: float


def occupation_from_summaries(
    summaries: list[PathSummary], steps: int, burn_in: int = 0
) -> OccupationEstimate:
    denom = steps + 1 - burn_in
    n_types = max(s for summary in summaries for s in summary.type_counts)
    reps = len(summaries)
    per_type = {
        i: np.array([s.type_counts.get(i, 0) / denom for s in summaries])
        for i in range(n_types + 1)
    }
    se = {
        i: float(v.std(ddof=1) / np.sqrt(reps)) if reps > 1 else 0.0
        for i, v in per_type.items()
    }
    return OccupationEstimate(
        fractions={i: float(per_type[i].mean()) for i in range(1, n_types + 1)},
        se={i: se[i] for i in range(1, n_types + 1)},
        origin_fraction=float(per_type[0].mean()),
    )


def occupation_fractions(
    config: SimConfig, allow_degenerate: bool = False
) -> OccupationEstimate:
    """Empirical per-type time fractions; the root's share is kept separate."""
    _require_two_complete(config, allow_degenerate)
    return occupation_from_summaries(run_replicas(config), config.steps, config.burn_in)


@dataclass(frozen=True)
class ExcursionFit:
    type_index: int
    continue_prob: float
    n_runs: int
    mean_extension: float
    p_value: float
    counts: dict[int, int]


def excursions_from_summaries(
    model: FreeProductComplete, lam: float, summaries: list[PathSummary]
) -> dict[int, ExcursionFit]:
    combined: dict[int, dict[int, int]] = {1: {}, 2: {}}
    for summary in summaries:
        for i in (1, 2):
            for ext, cnt in summary.run_extensions[i].items():
                combined[i][ext] = combined[i].get(ext, 0) + cnt
    out: dict[int, ExcursionFit] = {}
    for i in (1, 2):
        p_cont = excursion_continue_prob(*model.ms, lam, i)
        counts = combined[i]
        n_runs = sum(counts.values())
        total_ext = sum(j * c for j, c in counts.items())
        mean_ext = total_ext / n_runs if n_runs else 0.0
        if n_runs == 0:
            p_value = float("nan")
        elif p_cont == 0.0:
            p_value = 1.0 if set(counts) <= {0} else 0.0
        else:
            p_value = _geometric_chisquare(counts, p_cont, n_runs)
        out[i] = ExcursionFit(i, p_cont, n_runs, mean_ext, p_value, dict(counts))
    return out


def excursion_stats(config: SimConfig) -> dict[int, ExcursionFit]:
    """Same-type run-extension histograms with geometric goodness-of-fit.

    Run extensions (length minus one) of type-i runs are i.i.d. geometric
    with success probability (m_i - 1)/(m - 1 + lam).  Types with m_i = 1
    can never extend, so their fit degenerates to checking that every run
    has length one.
    """
    model = config.model
    if not isinstance(model, FreeProductComplete) or model.r != 2:
        raise HypothesisViolated("excursion law is stated for two-factor products")
    return excursions_from_summaries(model, config.lam, run_replicas(config))


def _geometric_chisquare(counts: dict[int, int], p: float, n_runs: int) -> float:
    """Chi-square p-value of observed extensions against Geometric(p).

    Bins are pooled from the right until every expected count is >= 5.
    """
    max_j = max(counts)
    j_cap = max_j
    while j_cap > 0 and n_runs * (1 - p) * p**j_cap < 5.0:
        j_cap -= 1
    observed = np.zeros(j_cap + 2)
    for j, c in counts.items():
        observed[min(j, j_cap + 1)] += c
    expected = np.array(
        [n_runs * (1 - p) * p**j for j in range(j_cap + 1)] + [n_runs * p ** (j_cap + 1)]
    )
    keep = expected > 0
    stat, p_value = stats.chisquare(observed[keep], expected[keep])
    return float(p_value)


@dataclass(frozen=True)
class BranchEstimate:
    start: VertexAddr
    prob: float
    se: float


@dataclass(frozen=True)
class HarmonicSplit:
    estimates: list[BranchEstimate]
    z_score: float
    steps: int
    replicas: int


def harmonic_split_estimate(
    model: GraphModel,
    lam: float,
    steps: int = 400,
    replicas: int = 4000,
    seed: int = 0,
    starts: list[VertexAddr] | None = None,
    require_z: float | None = 3.0,
) -> HarmonicSplit:
    """Estimate, per start, the probability of settling in the marked branch.

    The marked branch is everything above the first type-2 neighbor of the
    root.  Settling is proxied by membership at the fixed horizon: the walk
    is transient, so the branch of X_N is eventually constant and the bias
    of the proxy can be probed by doubling N.  The first two starts are
    z-tested against each other; a bounded harmonic function separating the
    root from a type-1 neighbor must make the difference positive.

    Raises:
        Inconclusive: if ``require_z`` is set and the z-score falls below it.
    """
    if not isinstance(model, FreeProductComplete) or model.r != 2:
        raise HypothesisViolated("branch construction is stated for two factors")
    if model.degenerate_line:
        raise HypothesisViolated("the line has no marked-branch split")
    lam_c = two_complete_critical_bias(*model.ms)
    if not 0 <= lam < lam_c:
        raise HypothesisViolated(f"requires 0 <= lam < lam_c = {lam_c}")
    if starts is None:
        starts = [VertexAddr(), VertexAddr(((1, 1),))]
    marked = (2, 1)

    estimates = []
    for s_idx, start in enumerate(starts):
        hits = np.empty(replicas)
        for r in range(replicas):
            seed_r = replica_seed(seed, s_idx * replicas + r)
            summary = simulate_path(model, lam, steps, seed_r, start=start)
            hits[r] = 1.0 if summary.first_letter == marked else 0.0
        se = float(hits.std(ddof=1) / np.sqrt(replicas)) if replicas > 1 else 0.0
        estimates.append(BranchEstimate(start, float(hits.mean()), se))

    z = float("nan")
    if len(estimates) >= 2:
        a, b = estimates[0], estimates[1]
        denom = float(np.hypot(a.se, b.se))
        z = (a.prob - b.prob) / denom if denom > 0 else float("inf")
    if require_z is not None and not z >= require_z:
        raise Inconclusive(
            f"split z-score {z:.2f} below {require_z}; increase replicas"
        )
    return HarmonicSplit(estimates, z, steps, replicas)
