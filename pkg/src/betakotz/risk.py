"""Tail-risk measures for the Beta-Kotz distribution.

Quantiles come from two routes that must agree: a safeguarded Newton
solver on the CDF (whose root in (0, 1) is unique), and closed-form
radicals / polynomial resolvents for the shape pairs that admit them.
CVaR likewise: the tail-expectation identity is what gets returned, and
Gauss-Legendre quadrature of the quantile function cross-checks it on
every call.  Normal and Student-t baselines round out the surface.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .distribution import BetaKotzParams, ConfidenceLevel, cdf, mean, pdf
from .specfun import (
    ConvergenceError,
    EvalTolerances,
    ln_gamma,
    reg_inc_beta,
    std_normal_quantile,
)

__all__ = [
    "SolveMethod",
    "RiskReport",
    "RootSolveConfig",
    "DEFAULT_ROOT_CONFIG",
    "InternalConsistencyError",
    "RootConvergenceError",
    "var_numeric",
    "var_closed",
    "cvar",
    "cvar_closed",
    "ec",
    "report",
    "var_normal",
    "cvar_normal",
    "var_student",
    "cvar_student",
]


class InternalConsistencyError(RuntimeError):
    """Two supposedly-equivalent computations disagreed: a kernel bug."""


class RootConvergenceError(ConvergenceError):
    """Root finder ran out of iterations; carries the best bracket."""

    def __init__(self, message, bracket, best):
        super().__init__(message, partial_sum=best)
        self.bracket = bracket


class SolveMethod(enum.Enum):
    CLOSED_FORM = "closed_form"
    NUMERIC = "numeric"
    BOTH_AGREEING = "both_agreeing"


@dataclass(frozen=True)
class RootSolveConfig:
    """Budget and bracket for CDF root solves."""

    abs_tol: float = 1e-13
    max_iters: int = 200
    bracket_lo: float = 0.0
    bracket_hi: float = 1.0

    def __post_init__(self):
        if not self.abs_tol > 0.0:
            raise ValueError(f"abs_tol must be > 0, got {self.abs_tol}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not 0.0 <= self.bracket_lo < self.bracket_hi <= 1.0:
            raise ValueError(
                f"need 0 <= bracket_lo < bracket_hi <= 1, got "
                f"[{self.bracket_lo}, {self.bracket_hi}]"
            )


DEFAULT_ROOT_CONFIG = RootSolveConfig()

_BRACKET_EPS = 1e-15
_CLOSED_VS_NUMERIC_TOL = 1e-10
_CVAR_CROSSCHECK_TOL = 1e-8
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def _alpha_value(alpha) -> float:
    if isinstance(alpha, ConfidenceLevel):
        return alpha.alpha
    return ConfidenceLevel(float(alpha)).alpha


def _bracketed_newton(f, df, lo, hi, abs_tol, max_iters, x0=None):
    """Root of f on [lo, hi] by Newton steps safeguarded by the bracket.

    f(lo) <= 0 <= f(hi) is required; any Newton step that would leave
    the current bracket is replaced by bisection, so the single sign
    change guarantees progress.  If the bracket collapses to adjacent
    floats before the residual tolerance is met, the representable
    point closest to the root is returned.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo > 0.0 or fhi < 0.0:
        raise ValueError(
            f"bracket [{lo}, {hi}] does not straddle the root: "
            f"f(lo)={flo}, f(hi)={fhi}"
        )
    x = x0 if (x0 is not None and lo < x0 < hi) else 0.5 * (lo + hi)
    for _ in range(max_iters):
        fx = f(x)
        if abs(fx) <= abs_tol:
            return x
        if fx > 0.0:
            hi, fhi = x, fx
        else:
            lo, flo = x, fx
        if hi - lo <= 4.0 * max(abs(hi), 1.0) * 2.2e-16:
            # Quantile saturated at the representation limit.
            return lo if abs(flo) <= abs(fhi) else hi
        d = df(x)
        if d > 0.0 and math.isfinite(d):
            x_new = x - fx / d
            if not lo < x_new < hi:
                x_new = 0.5 * (lo + hi)
        else:
            x_new = 0.5 * (lo + hi)
        x = x_new
    raise RootConvergenceError(
        f"root solve exhausted {max_iters} iterations; "
        f"best bracket [{lo}, {hi}]",
        bracket=(lo, hi),
        best=x,
    )


def _quantile(p: BetaKotzParams, prob: float, cfg: RootSolveConfig,
              x0=None, eval_tol: EvalTolerances | None = None) -> float:
    lo = max(cfg.bracket_lo, _BRACKET_EPS)
    hi = min(cfg.bracket_hi, 1.0 - _BRACKET_EPS)
    flo = cdf(p, lo, eval_tol) - prob
    fhi = cdf(p, hi, eval_tol) - prob
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo > 0.0:
        # Root below the clamp: saturated when the caller asked for the
        # full interval, a genuine bracketing mistake otherwise.
        if cfg.bracket_lo <= _BRACKET_EPS:
            return lo
        raise ValueError(
            f"bracket [{cfg.bracket_lo}, {cfg.bracket_hi}] does not "
            f"contain the quantile at level {prob}"
        )
    if fhi < 0.0:
        if cfg.bracket_hi >= 1.0 - _BRACKET_EPS:
            return hi
        raise ValueError(
            f"bracket [{cfg.bracket_lo}, {cfg.bracket_hi}] does not "
            f"contain the quantile at level {prob}"
        )
    return _bracketed_newton(
        lambda x: cdf(p, x, eval_tol) - prob,
        lambda x: pdf(p, x),
        lo,
        hi,
        cfg.abs_tol,
        cfg.max_iters,
        x0=x0 if x0 is not None else prob,
    )


def var_numeric(p: BetaKotzParams, alpha, cfg: RootSolveConfig | None = None,
                eval_tol: EvalTolerances | None = None) -> float:
    """Quantile of the Beta-Kotz law by root finding on the CDF."""
    a = _alpha_value(alpha)
    return _quantile(p, a, cfg or DEFAULT_ROOT_CONFIG, eval_tol=eval_tol)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def _as_small_int(v, limit=1_000_000):
    r = round(v)
    if abs(v - r) <= 1e-12 and 0 <= r <= limit:
        return int(r)
    return None


def _real_cubic_roots(c2, c1, c0):
    """Real roots of x^3 + c2 x^2 + c1 x + c0, by Cardano/trigonometric."""
    shift = c2 / 3.0
    p = c1 - c2 * c2 / 3.0
    q = 2.0 * c2**3 / 27.0 - c2 * c1 / 3.0 + c0
    disc = 0.25 * q * q + p**3 / 27.0
    if disc > 0.0:
        s = math.sqrt(disc)
        u = math.copysign(abs(-0.5 * q + s) ** (1.0 / 3.0), -0.5 * q + s)
        v = math.copysign(abs(-0.5 * q - s) ** (1.0 / 3.0), -0.5 * q - s)
        return [u + v - shift]
    if p == 0.0:
        return [-shift]
    m = 2.0 * math.sqrt(-p / 3.0)
    arg = 3.0 * q / (p * m)
    arg = min(1.0, max(-1.0, arg))
    theta = math.acos(arg) / 3.0
    return [
        m * math.cos(theta - 2.0 * math.pi * k / 3.0) - shift for k in range(3)
    ]


def _real_quartic_roots(c3, c2, c1, c0):
    """Real roots of x^4 + c3 x^3 + c2 x^2 + c1 x + c0, Ferrari resolvent."""
    shift = c3 / 4.0
    p = c2 - 3.0 * c3 * c3 / 8.0
    q = c1 - 0.5 * c3 * c2 + c3**3 / 8.0
    r = c0 - 0.25 * c3 * c1 + c3 * c3 * c2 / 16.0 - 3.0 * c3**4 / 256.0
    roots = []
    if abs(q) < 1e-14:
        # Biquadratic: y^2 solves z^2 + p z + r = 0.
        disc = 0.25 * p * p - r
        if disc >= 0.0:
            s = math.sqrt(disc)
            for z in (-0.5 * p + s, -0.5 * p - s):
                if z >= 0.0:
                    roots.extend([math.sqrt(z), -math.sqrt(z)])
    else:
        resolvent = _real_cubic_roots(2.0 * p, p * p - 4.0 * r, -q * q)
        z0 = max(z for z in resolvent)
        z0 = max(z0, 0.0)
        w = math.sqrt(z0) if z0 > 0.0 else 0.0
        if w == 0.0:
            return []
        s1 = 0.5 * (p + z0 - q / w)
        s2 = 0.5 * (p + z0 + q / w)
        for ww, s in ((w, s1), (-w, s2)):
            disc = ww * ww / 4.0 - s
            if disc >= 0.0:
                sq = math.sqrt(disc)
                roots.extend([-ww / 2.0 + sq, -ww / 2.0 - sq])
    return [y - shift for y in roots]


def _polish_polynomial_root(x, poly, dpoly, steps=3):
    # A few Newton iterations recover the digits the radical formulas
    # lose to cancellation; the starting point is already in the basin.
    for _ in range(steps):
        d = dpoly(x)
        if d == 0.0:
            break
        x -= poly(x) / d
    return min(max(x, 0.0), 1.0)


def _root_in_unit_interval(candidates, poly, dpoly):
    inside = [x for x in candidates if -1e-9 < x < 1.0 + 1e-9]
    if not inside:
        return None
    best = min(inside, key=lambda x: abs(poly(x)))
    return _polish_polynomial_root(best, poly, dpoly)


def var_closed(p: BetaKotzParams, alpha) -> float | None:
    """Closed-form quantile for the supported shape pairs, else None.

    Covered: integer a with b = 1 (pure power), (1,2), (2,2), (3,2),
    (1,3), (2,3), (1,4).  The cubic/quartic cases solve the CDF
    polynomial with standard resolvents and keep the unique root in
    (0, 1).
    """
    a_level = _alpha_value(alpha)
    ia = _as_small_int(p.a)
    ib = _as_small_int(p.b)
    if ib == 1 and ia is not None and ia >= 1:
        return a_level ** (1.0 / ia)
    if ia == 1 and ib == 2:
        return 1.0 - math.sqrt(1.0 - a_level)
    if ia == 2 and ib == 2:
        # F(x) - alpha = -2x^3 + 3x^2 - alpha
        poly = lambda x: (3.0 - 2.0 * x) * x * x - a_level
        dpoly = lambda x: 6.0 * x * (1.0 - x)
        roots = _real_cubic_roots(-1.5, 0.0, 0.5 * a_level)
        return _root_in_unit_interval(roots, poly, dpoly)
    if ia == 3 and ib == 2:
        # F(x) - alpha = -3x^4 + 4x^3 - alpha
        poly = lambda x: (4.0 - 3.0 * x) * x**3 - a_level
        dpoly = lambda x: 12.0 * x * x * (1.0 - x)
        roots = _real_quartic_roots(-4.0 / 3.0, 0.0, 0.0, a_level / 3.0)
        return _root_in_unit_interval(roots, poly, dpoly)
    if ia == 1 and ib == 3:
        return 1.0 - (1.0 - a_level) ** (1.0 / 3.0)
    if ia == 2 and ib == 3:
        # F(x) - alpha = 3x^4 - 8x^3 + 6x^2 - alpha
        poly = lambda x: ((3.0 * x - 8.0) * x + 6.0) * x * x - a_level
        dpoly = lambda x: 12.0 * x * (1.0 - x) ** 2
        roots = _real_quartic_roots(-8.0 / 3.0, 2.0, 0.0, -a_level / 3.0)
        return _root_in_unit_interval(roots, poly, dpoly)
    if ia == 1 and ib == 4:
        return 1.0 - (1.0 - a_level) ** 0.25
    return None


# ---------------------------------------------------------------------------
# CVaR / EC
# ---------------------------------------------------------------------------

def _tail_expectation_cvar(p, a_level, cfg, q, eval_tol=None):
    # E[X | X > q] through I_q(a+1, b); exact up to the quantile itself.
    return mean(p) * (1.0 - reg_inc_beta(p.a + 1.0, p.b, q, eval_tol)) / (1.0 - a_level)


def _quadrature_cvar(p, a_level, cfg, eval_tol=None):
    """(1/(1-alpha)) integral of the quantile over [alpha, 1] by 64-node
    Gauss-Legendre: a plain panel up to the midpoint, then nu = 1 - u^2
    on the last panel to tame the quantile's endpoint steepness."""
    split = a_level + 0.5 * (1.0 - a_level)
    total = 0.0
    guess = None

    half = 0.5 * (split - a_level)
    mid = 0.5 * (split + a_level)
    for xi, w in zip(_GL_NODES, _GL_WEIGHTS):
        nu = mid + half * xi
        guess = _quantile(p, nu, cfg, x0=guess, eval_tol=eval_tol)
        total += half * w * guess

    u_max = math.sqrt(1.0 - split)
    partial = []
    for xi, w in zip(_GL_NODES, _GL_WEIGHTS):
        u = 0.5 * u_max * (xi + 1.0)
        partial.append((u, 0.5 * u_max * w))
    # Walk u downward so nu increases and the warm start stays adjacent.
    for u, w in reversed(partial):
        nu = 1.0 - u * u
        guess = _quantile(p, nu, cfg, x0=guess, eval_tol=eval_tol)
        total += w * 2.0 * u * guess
    return total / (1.0 - a_level)


def cvar(p: BetaKotzParams, alpha, cfg: RootSolveConfig | None = None,
         eval_tol: EvalTolerances | None = None) -> float:
    """Mean of the (1-alpha) tail, computed by two routes that must agree.

    The tail-expectation identity provides the returned value; the
    quadrature of the quantile function over [alpha, 1] is a mandatory
    cross-check, and disagreement beyond 1e-8 signals a kernel bug.
    """
    a_level = _alpha_value(alpha)
    cfg = cfg or DEFAULT_ROOT_CONFIG
    q = _quantile(p, a_level, cfg, eval_tol=eval_tol)
    identity = _tail_expectation_cvar(p, a_level, cfg, q, eval_tol)
    quadrature = _quadrature_cvar(p, a_level, cfg, eval_tol)
    if abs(identity - quadrature) > _CVAR_CROSSCHECK_TOL:
        raise InternalConsistencyError(
            f"CVaR routes disagree: identity={identity!r}, "
            f"quadrature={quadrature!r} for (a={p.a}, b={p.b}, "
            f"alpha={a_level})"
        )
    return identity


def cvar_closed(p: BetaKotzParams, alpha) -> float | None:
    """Closed-form CVaR for the analytic rows, else None.

    Covered: integer a with b = 1, plus (1,1), (1,2), (1,3), (1,4);
    each is the elementary integral of the closed-form quantile.
    """
    a_level = _alpha_value(alpha)
    ia = _as_small_int(p.a)
    ib = _as_small_int(p.b)
    if ib == 1 and ia is not None and ia >= 1:
        if ia == 1:
            return 0.5 * (1.0 + a_level)
        return (
            ia * (1.0 - a_level ** ((ia + 1.0) / ia))
            / ((ia + 1.0) * (1.0 - a_level))
        )
    if ia == 1 and ib == 2:
        return 1.0 - (2.0 / 3.0) * math.sqrt(1.0 - a_level)
    if ia == 1 and ib == 3:
        return 1.0 - 0.75 * (1.0 - a_level) ** (1.0 / 3.0)
    if ia == 1 and ib == 4:
        return 1.0 - 0.8 * (1.0 - a_level) ** 0.25
    return None


def ec(p: BetaKotzParams, alpha, cfg: RootSolveConfig | None = None,
       eval_tol: EvalTolerances | None = None) -> float:
    """Economic capital: quantile minus expected loss."""
    v = var_closed(p, alpha)
    if v is None:
        v = var_numeric(p, alpha, cfg, eval_tol)
    return v - mean(p)


def report(p: BetaKotzParams, alpha, cfg: RootSolveConfig | None = None,
           eval_tol: EvalTolerances | None = None) -> "RiskReport":
    """Bundle VaR, CVaR, EC and the mean, with method provenance."""
    a_level = _alpha_value(alpha)
    cfg = cfg or DEFAULT_ROOT_CONFIG
    numeric = var_numeric(p, a_level, cfg, eval_tol)
    closed = var_closed(p, a_level)
    if closed is None:
        v, method = numeric, SolveMethod.NUMERIC
    else:
        if abs(closed - numeric) > _CLOSED_VS_NUMERIC_TOL:
            raise InternalConsistencyError(
                f"closed-form and numeric quantiles disagree: "
                f"{closed!r} vs {numeric!r} for (a={p.a}, b={p.b}, "
                f"alpha={a_level})"
            )
        v, method = closed, SolveMethod.BOTH_AGREEING
    m = mean(p)
    return RiskReport(
        alpha=ConfidenceLevel(a_level),
        var=v,
        cvar=cvar(p, a_level, cfg, eval_tol),
        ec=v - m,
        mean=m,
        method=method,
    )


@dataclass(frozen=True)
class RiskReport:
    """Risk-measure bundle at one confidence level."""

    alpha: ConfidenceLevel
    var: float
    cvar: float
    ec: float
    mean: float
    method: SolveMethod

    def __post_init__(self):
        if not 0.0 < self.var < 1.0:
            raise ValueError(f"var must lie in (0, 1), got {self.var}")
        if self.cvar < self.var:
            raise ValueError(
                f"cvar must dominate var, got cvar={self.cvar} < var={self.var}"
            )
        if self.ec != self.var - self.mean:
            raise ValueError("ec must equal var - mean exactly")

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha.alpha,
            "var": self.var,
            "cvar": self.cvar,
            "ec": self.ec,
            "mean": self.mean,
            "method": self.method.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RiskReport":
        return cls(
            alpha=ConfidenceLevel(d["alpha"]),
            var=d["var"],
            cvar=d["cvar"],
            ec=d["ec"],
            mean=d["mean"],
            method=SolveMethod(d["method"]),
        )


# ---------------------------------------------------------------------------
# location-scale baselines
# ---------------------------------------------------------------------------

_LN_SQRT_2PI = 0.9189385332046727


def _std_normal_pdf(z):
    return math.exp(-0.5 * z * z - _LN_SQRT_2PI)


def var_normal(mu: float, sigma: float, alpha) -> float:
    """Normal quantile mu + sigma * Phi^{-1}(alpha)."""
    if not sigma > 0.0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    return mu + sigma * std_normal_quantile(_alpha_value(alpha))


def cvar_normal(mu: float, sigma: float, alpha) -> float:
    """Normal expected shortfall mu + sigma * phi(z_alpha)/(1-alpha)."""
    if not sigma > 0.0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    a_level = _alpha_value(alpha)
    z = std_normal_quantile(a_level)
    return mu + sigma * _std_normal_pdf(z) / (1.0 - a_level)


def _t_cdf(x, nu):
    if x == 0.0:
        return 0.5
    w = reg_inc_beta(0.5 * nu, 0.5, nu / (nu + x * x))
    return 1.0 - 0.5 * w if x > 0.0 else 0.5 * w


def _t_pdf(x, nu):
    return math.exp(
        ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu)
        - 0.5 * math.log(nu * math.pi)
        - 0.5 * (nu + 1.0) * math.log1p(x * x / nu)
    )


def _t_quantile(prob, nu):
    if prob == 0.5:
        return 0.0
    if prob < 0.5:
        return -_t_quantile(1.0 - prob, nu)
    hi = 1.0
    while _t_cdf(hi, nu) < prob:
        hi *= 2.0
        if hi > 1e12:
            raise RootConvergenceError(
                f"t-quantile bracket expansion failed for alpha={prob}, nu={nu}",
                bracket=(0.0, hi),
                best=hi,
            )
    return _bracketed_newton(
        lambda x: _t_cdf(x, nu) - prob,
        lambda x: _t_pdf(x, nu),
        0.0,
        hi,
        DEFAULT_ROOT_CONFIG.abs_tol,
        DEFAULT_ROOT_CONFIG.max_iters,
    )


def var_student(mu: float, sigma: float, nu: float, alpha) -> float:
    """Student-t quantile mu + sigma * t_nu^{-1}(alpha).

    The t CDF is expressed through the regularized incomplete beta and
    inverted with the same bracketed root finder used for Beta-Kotz.
    """
    if not sigma > 0.0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    if not nu > 0.0:
        raise ValueError(f"degrees of freedom must be > 0, got {nu}")
    return mu + sigma * _t_quantile(_alpha_value(alpha), nu)


def cvar_student(mu: float, sigma: float, nu: float, alpha) -> float:
    """Student-t expected shortfall; requires nu > 1 for a finite mean."""
    if not sigma > 0.0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    if not nu > 1.0:
        raise ValueError(f"cvar_student requires nu > 1, got {nu}")
    a_level = _alpha_value(alpha)
    t = _t_quantile(a_level, nu)
    es = _t_pdf(t, nu) / (1.0 - a_level) * (nu + t * t) / (nu - 1.0)
    return mu + sigma * es
