"""Monte Carlo estimation of the selection risk P(selected != planted).

One planted support suffices: by symmetry of the noise law the miss
probability of the scan selector does not depend on where the block sits, so
the canonical top-left block is planted (and the invariance itself is covered
by tests rather than assumed).  All supported cells get mean exactly a, the
least favorable configuration.

Trials are independent, draw from streams keyed by (seed, tag, trial index),
and are aggregated in trial order, so estimates are bit-identical for any
worker count.  Failure is exact set mismatch; the average overlap fraction is
reported as a diagnostic only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.stats import norm

from .errors import ValidationError
from .model import Dims, SignalSpec, Support, canonical_support, generate
from .parallel import map_indexed
from .selector import (
    EXACT_ENUMERATION_BUDGET,
    scan_brute_force,
    scan_exact,
    scan_heuristic,
    vector_select,
)
from .streams import derive_seed, gaussian_stream
from .thresholds import critical_value

_NOISE_TAG = 0
_SELECT_TAG = 1

SELECTOR_METHODS = ("exact", "heuristic", "brute_force")

_Z95 = float(norm.ppf(0.975))


@dataclass(frozen=True)
class RiskEstimate:
    trials: int
    failures: int
    risk: float
    ci_low: float
    ci_high: float
    mean_overlap: float
    selector_method: str
    dims: Dims
    a: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "failures": self.failures,
            "risk": self.risk,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "mean_overlap": self.mean_overlap,
            "selector_method": self.selector_method,
            "dims": {"N": self.dims.N, "M": self.dims.M, "n": self.dims.n, "m": self.dims.m},
            "a": self.a,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class SweepResult:
    grid: tuple[tuple[float, RiskEstimate], ...]
    multipliers: tuple[float, ...]
    dims: Dims
    a_star_used: float

    def to_dict(self) -> dict:
        return {
            "a_star_used": self.a_star_used,
            "dims": {"N": self.dims.N, "M": self.dims.M, "n": self.dims.n, "m": self.dims.m},
            "grid": [
                {"multiplier": mult, "a": a, **est.to_dict()}
                for mult, (a, est) in zip(self.multipliers, self.grid)
            ],
        }

    def csv_rows(self) -> list[str]:
        """Plot-ready flat table, one line per grid point (with header)."""
        lines = ["a,multiplier,risk,ci_low,ci_high,mean_overlap,trials"]
        for mult, (a, est) in zip(self.multipliers, self.grid):
            lines.append(
                f"{a:.17g},{mult:.17g},{est.risk:.17g},{est.ci_low:.17g},"
                f"{est.ci_high:.17g},{est.mean_overlap:.17g},{est.trials}"
            )
        return lines


def wilson_interval(failures: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion; well-behaved at 0 and 1."""
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    if not 0 <= failures <= trials:
        raise ValidationError(f"failures must lie in [0, {trials}], got {failures}")
    phat = failures / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2.0 * trials)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / trials + z * z / (4.0 * trials * trials)) / denom
    # at the boundary counts the endpoints are exactly 0 and 1; don't let
    # rounding in the half-width smear them
    low = 0.0 if failures == 0 else max(0.0, center - half)
    high = 1.0 if failures == trials else min(1.0, center + half)
    return low, high


def _run_selector(obs, n, m, method, restarts, seed, budget, workers):
    if method == "exact":
        return scan_exact(obs, n, m, budget=budget, workers=workers)
    if method == "heuristic":
        return scan_heuristic(obs, n, m, restarts=restarts, seed=seed)
    if method == "brute_force":
        return scan_brute_force(obs, n, m)
    raise ValidationError(f"selector_method must be one of {SELECTOR_METHODS}, got {method!r}")


def estimate_risk(
    dims: Dims,
    a: float,
    trials: int,
    seed: int,
    selector_method: str = "exact",
    restarts: int = 20,
    budget: int = EXACT_ENUMERATION_BUDGET,
    workers: int | None = None,
    support: Support | None = None,
) -> RiskEstimate:
    """Fraction of trials in which the selector misses the planted support.

    The planted support defaults to the canonical top-left block; passing
    another one is only useful for checking that the estimate is invariant to
    the block's location.
    """
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    if selector_method not in SELECTOR_METHODS:
        raise ValidationError(
            f"selector_method must be one of {SELECTOR_METHODS}, got {selector_method!r}"
        )
    planted = support if support is not None else canonical_support(dims)
    signal = SignalSpec(a)
    nm = dims.n * dims.m

    def one_trial(t: int) -> tuple[bool, float]:
        obs = generate(dims, planted, signal, derive_seed(seed, (_NOISE_TAG, t)))
        # trials parallelize; the selector inside each trial stays serial
        res = _run_selector(
            obs, dims.n, dims.m, selector_method, restarts,
            derive_seed(seed, (_SELECT_TAG, t)), budget, 1,
        )
        return res.support != planted, res.support.overlap(planted) / nm

    outcomes = map_indexed(one_trial, trials, workers)
    failures = sum(1 for missed, _ in outcomes if missed)
    mean_overlap = math.fsum(ov for _, ov in outcomes) / trials
    low, high = wilson_interval(failures, trials)
    return RiskEstimate(
        trials=trials,
        failures=failures,
        risk=failures / trials,
        ci_low=low,
        ci_high=high,
        mean_overlap=mean_overlap,
        selector_method=selector_method,
        dims=dims,
        a=a,
        seed=seed,
    )


def sweep(
    dims: Dims,
    a_multipliers,
    trials: int,
    seed: int,
    selector_method: str = "heuristic",
    restarts: int = 20,
    budget: int = EXACT_ENUMERATION_BUDGET,
    workers: int | None = None,
) -> SweepResult:
    """Risk curve across multiples of the critical level a_star.

    Every grid point shares the master seed, and the noise streams are keyed
    by trial index only, so the same noise matrices are re-used at every
    signal level (common random numbers): the phase transition shows up
    without Monte Carlo jitter between points.
    """
    mults = [float(x) for x in a_multipliers]
    if not mults:
        raise ValidationError("need at least one multiplier")
    if any(x <= 0 for x in mults):
        raise ValidationError(f"multipliers must be positive, got {mults}")
    if sorted(mults) != mults:
        raise ValidationError(f"multipliers must be sorted ascending, got {mults}")
    a_star = critical_value(dims)
    grid = []
    for mult in mults:
        est = estimate_risk(
            dims, mult * a_star, trials, seed,
            selector_method=selector_method, restarts=restarts,
            budget=budget, workers=workers,
        )
        grid.append((mult * a_star, est))
    return SweepResult(
        grid=tuple(grid), multipliers=tuple(mults), dims=dims, a_star_used=a_star
    )


def vector_risk(
    N: int, n: int, a: float, trials: int, seed: int, workers: int | None = None
) -> RiskEstimate:
    """Selection risk for the vector case: top-n picking of a length-N vector
    with n coordinates elevated by a."""
    if n < 2 or n >= N:
        raise ValidationError(f"vector case needs 2 <= n < N, got n={n}, N={N}")
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    planted = list(range(n))

    def one_trial(t: int) -> tuple[bool, float]:
        x = gaussian_stream(derive_seed(seed, (_NOISE_TAG, t))).standard_normal(N)
        x[:n] += a
        picked = vector_select(x, n)
        overlap = len(set(picked) & set(planted)) / n
        return picked != planted, overlap

    outcomes = map_indexed(one_trial, trials, workers)
    failures = sum(1 for missed, _ in outcomes if missed)
    mean_overlap = math.fsum(ov for _, ov in outcomes) / trials
    low, high = wilson_interval(failures, trials)
    return RiskEstimate(
        trials=trials,
        failures=failures,
        risk=failures / trials,
        ci_low=low,
        ci_high=high,
        mean_overlap=mean_overlap,
        selector_method="vector",
        dims=Dims(N, 1, n, 1),
        a=a,
        seed=seed,
    )


def max_gauss_exceedance(J: int, t: float, trials: int, seed: int,
                         workers: int | None = None) -> float:
    """Estimate P(max of J standard normals >= t * sqrt(2 log J)) by simulation.

    For J = 1 the scaling factor is 0, so this is P(Z >= 0) = 1/2 for any t.
    """
    if J < 1:
        raise ValidationError(f"J must be >= 1, got {J}")
    if trials < 100:
        raise ValidationError(f"need trials >= 100, got {trials}")
    threshold = float(t) * math.sqrt(2.0 * math.log(J))

    def one_trial(tr: int) -> bool:
        draws = gaussian_stream(derive_seed(seed, (_NOISE_TAG, tr))).standard_normal(J)
        return bool(draws.max() >= threshold)

    hits = map_indexed(one_trial, trials, workers)
    return sum(hits) / trials
