"""Fitting Beta-Kotz shapes from data.

Method of moments inverts the mean/variance formulas in closed form;
maximum likelihood runs a damped Newton-Raphson on the two score
equations, with digamma/trigamma supplying the gradient and Hessian.
Both consume the same sufficient statistics, so a sample is reduced
once and fitted many ways.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .distribution import BetaKotzParams
from .specfun import digamma, trigamma

__all__ = [
    "SampleStats",
    "FitResult",
    "InfeasibleMomentsError",
    "StepFailureError",
    "stats_from_samples",
    "fit_moments",
    "log_likelihood",
    "fit_mle",
]

DEFAULT_GRAD_TOL = 1e-10
DEFAULT_MAX_ITERS = 100
_MAX_HALVINGS = 30


class InfeasibleMomentsError(ValueError):
    """Sample variance is incompatible with any Beta-Kotz shape pair."""


class StepFailureError(RuntimeError):
    """Newton-Raphson could not produce a usable step; carries the iterate."""

    def __init__(self, message, params):
        super().__init__(message)
        self.params = params


@dataclass(frozen=True)
class SampleStats:
    """Sufficient statistics of a sample from (0, 1).

    Moment feasibility (variance < mean*(1-mean)) is deliberately not a
    construction invariant: degenerate samples must be representable so
    fit_moments can reject them with a meaningful error.
    """

    n: int
    mean: float
    variance: float
    sum_log_x: float
    sum_log_1mx: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 observations, got n={self.n}")
        if not 0.0 < self.mean < 1.0:
            raise ValueError(f"sample mean must lie in (0, 1), got {self.mean}")
        if not (math.isfinite(self.variance) and self.variance >= 0.0):
            raise ValueError(f"sample variance must be >= 0, got {self.variance}")
        if not (math.isfinite(self.sum_log_x) and math.isfinite(self.sum_log_1mx)):
            raise ValueError("log-sums must be finite")


@dataclass(frozen=True)
class FitResult:
    """Estimator output with convergence diagnostics."""

    params: BetaKotzParams
    iterations: int
    converged: bool
    log_likelihood: float
    gradient_norm: float


def stats_from_samples(xs: Sequence[float]) -> SampleStats:
    """Reduce a sample to SampleStats in one numerically stable pass.

    Welford's recurrence for mean/variance (unbiased, n-1 divisor) plus
    running log-sums.  Values at or outside (0, 1) are rejected with the
    offending index, since the log-likelihood is undefined there.
    """
    n = 0
    running_mean = 0.0
    m2 = 0.0
    sum_log_x = 0.0
    sum_log_1mx = 0.0
    for i, x in enumerate(xs):
        if not (isinstance(x, (int, float)) and math.isfinite(x)) or not 0.0 < x < 1.0:
            raise ValueError(
                f"sample value at index {i} must lie strictly in (0, 1), got {x!r}"
            )
        n += 1
        delta = x - running_mean
        running_mean += delta / n
        m2 += delta * (x - running_mean)
        sum_log_x += math.log(x)
        sum_log_1mx += math.log1p(-x)
    if n < 2:
        raise ValueError(f"need at least 2 observations, got {n}")
    return SampleStats(
        n=n,
        mean=running_mean,
        variance=m2 / (n - 1),
        sum_log_x=sum_log_x,
        sum_log_1mx=sum_log_1mx,
    )


def fit_moments(stats: SampleStats) -> BetaKotzParams:
    """Method-of-moments shapes from the sample mean and variance.

    a = m (m(1-m)/s^2 - 1), b = (1-m) (m(1-m)/s^2 - 1); the inversion
    is exact, so the fitted distribution reproduces the sample moments.
    """
    m = stats.mean
    bound = m * (1.0 - m)
    if stats.variance <= 0.0 or stats.variance >= bound:
        raise InfeasibleMomentsError(
            f"sample variance {stats.variance} must lie in (0, "
            f"{bound}) = (0, mean*(1-mean)) for a moment fit"
        )
    common = bound / stats.variance - 1.0
    return BetaKotzParams(m * common, (1.0 - m) * common)


def log_likelihood(p: BetaKotzParams, stats: SampleStats) -> float:
    """Sample log-likelihood from the sufficient statistics."""
    return (
        stats.n * p.log_norm_const
        + (p.a - 1.0) * stats.sum_log_x
        + (p.b - 1.0) * stats.sum_log_1mx
    )


def _score_and_hessian(a, b, stats):
    n = stats.n
    psi_ab = digamma(a + b)
    g1 = n * (psi_ab - digamma(a)) + stats.sum_log_x
    g2 = n * (psi_ab - digamma(b)) + stats.sum_log_1mx
    tri_ab = trigamma(a + b)
    h11 = n * (tri_ab - trigamma(a))
    h22 = n * (tri_ab - trigamma(b))
    h12 = n * tri_ab
    return (g1, g2), (h11, h12, h22)


def fit_mle(
    stats: SampleStats,
    init: Optional[BetaKotzParams] = None,
    grad_tol: float = DEFAULT_GRAD_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> FitResult:
    """Maximum-likelihood shapes by damped Newton-Raphson on the scores.

    Convergence is declared on the per-observation-scaled score,
    max(|g1|, |g2|)/n <= grad_tol.  Steps that would leave (0, inf)^2 or
    lower the likelihood are halved (up to 30 times); an exhausted
    iteration budget returns converged=False rather than raising.
    """
    if not grad_tol > 0.0:
        raise ValueError(f"grad_tol must be > 0, got {grad_tol}")
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    if init is None:
        try:
            init = fit_moments(stats)
        except InfeasibleMomentsError:
            init = BetaKotzParams(1.0, 1.0)
    a, b = init.a, init.b
    ll = log_likelihood(BetaKotzParams(a, b), stats)

    iterations = 0
    (g1, g2), (h11, h12, h22) = _score_and_hessian(a, b, stats)
    gn = max(abs(g1), abs(g2)) / stats.n
    while gn > grad_tol and iterations < max_iters:
        det = h11 * h22 - h12 * h12
        if det == 0.0 or not math.isfinite(det):
            raise StepFailureError(
                f"singular Hessian at (a={a}, b={b})", BetaKotzParams(a, b)
            )
        # Newton step: -H^{-1} g for the 2x2 symmetric Hessian.
        da = -(h22 * g1 - h12 * g2) / det
        db = -(h11 * g2 - h12 * g1) / det
        scale = 1.0
        for _ in range(_MAX_HALVINGS + 1):
            a_new = a + scale * da
            b_new = b + scale * db
            if a_new > 0.0 and b_new > 0.0:
                ll_new = log_likelihood(BetaKotzParams(a_new, b_new), stats)
                # Plateau slack: a sub-rounding "decrease" is not a real one.
                if ll_new >= ll - 1e-13 * max(1.0, abs(ll)):
                    break
            scale *= 0.5
        else:
            raise StepFailureError(
                f"step damping floor reached at (a={a}, b={b})",
                BetaKotzParams(a, b),
            )
        a, b, ll = a_new, b_new, ll_new
        iterations += 1
        (g1, g2), (h11, h12, h22) = _score_and_hessian(a, b, stats)
        gn = max(abs(g1), abs(g2)) / stats.n

    params = BetaKotzParams(a, b)
    return FitResult(
        params=params,
        iterations=iterations,
        converged=gn <= grad_tol,
        log_likelihood=ll,
        gradient_norm=gn,
    )
