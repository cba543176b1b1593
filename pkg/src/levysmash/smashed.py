"""The smashed-gamma family: the multiplicative (Mellin) blend of a
one-sided stable law with a gamma(shape) law, i.e. the density of
W * T for independent W ~ stable(alpha), T ~ gamma(shape).

Closed forms short-circuit the two anchor cases:

* alpha = 1   -- the blend is the gamma density itself;
* alpha = 1/2 -- 4 Gamma(g+1/2) (4x)^(g-1) (1+4x)^(-g-1/2) /
  (sqrt(pi) Gamma(g)), an algebraic-tail family whose CDF is the
  regularized incomplete beta I_{4x/(1+4x)}(g, 1/2).

Every other alpha in (0, 1) goes through adaptive quadrature of the
blend integral over the series density engine.  alpha > 1 is accepted
as a best-effort extension via the transform's residue series (the
only route there -- no stable density exists); such reports carry
precision_loss=True and promise nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from scipy.integrate import quad
from scipy.special import betainc, gammainc

from .density import LevyIndex, density, resolve_index
from .errors import (
    ConvergenceGateError,
    DomainError,
    QuadratureFailure,
    TermCapExceeded,
)
from .series import EvalReport, SeriesConfig, WrightSpec, as_extended, eval_wright

__all__ = [
    "SmashedGammaParams",
    "LevySmirnovParams",
    "smashed_density",
    "smashed_laplace",
    "process_cdf",
    "attraction_check",
    "levy_smirnov_pdf",
]

_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class SmashedGammaParams:
    """(alpha, gamma_shape); gamma_shape doubles as the process time."""

    alpha: float
    gamma_shape: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")
        if not (math.isfinite(self.gamma_shape) and self.gamma_shape > 0.0):
            raise DomainError(
                f"gamma_shape must be positive, got {self.gamma_shape!r}")

    @property
    def experimental(self) -> bool:
        """True outside the certified alpha range (0, 1]."""
        return self.alpha > 1.0


@dataclass(frozen=True)
class LevySmirnovParams:
    mu: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mu) and self.mu > 0.0):
            raise DomainError(f"mu must be positive, got {self.mu!r}")


def _index_for(alpha: float) -> LevyIndex:
    frac = Fraction(alpha).limit_denominator(64)
    if not 0 < frac < 1 or abs(float(frac) - alpha) > 1e-12 * alpha:
        raise DomainError(
            f"general-alpha blend needs a rational alpha p/q with q <= 64, "
            f"got {alpha!r}")
    return resolve_index(frac.numerator, frac.denominator, 1, 1)


def _half_closed_form(g: float, x: float) -> float:
    """4 Gamma(g+1/2) (4x)^(g-1) (1+4x)^(-g-1/2) / (sqrt(pi) Gamma(g))."""
    logmag = (math.lgamma(g + 0.5) - math.lgamma(g)
              + (g - 1.0) * math.log(4.0 * x)
              - (g + 0.5) * math.log1p(4.0 * x))
    return 4.0 / math.sqrt(math.pi) * math.exp(logmag)


def _gamma_pdf(g: float, x: float) -> float:
    return math.exp((g - 1.0) * math.log(x) - x - math.lgamma(g))


def smashed_density(params: SmashedGammaParams, x: float,
                    method: str = "auto") -> EvalReport:
    """Density of the blended law at x > 0.

    method: "auto" (default) prefers the residue series of the
    transform where it converges and certifies (alpha > ~0.55), since
    it is orders of magnitude cheaper than the blend quadrature;
    "blend" forces the convolution over the stable-density engine;
    "series" forces the residue series (gate errors propagate).  The
    two routes are cross-checked against each other in the test suite.
    """
    if not (math.isfinite(x) and x > 0.0):
        raise DomainError(f"smashed_density requires finite x > 0, got {x!r}")
    if method not in ("auto", "blend", "series"):
        raise DomainError(f"unknown method {method!r}")
    a, g = params.alpha, params.gamma_shape
    if method == "auto":
        if a == 1.0:
            v = _gamma_pdf(g, x)
            return EvalReport(v, abs(v) * 8.0 * _EPS, 1, abs(v), 1.0, "standard")
        if a == 0.5:
            v = _half_closed_form(g, x)
            return EvalReport(v, abs(v) * 8.0 * _EPS, 1, abs(v), 1.0, "standard")
    if a > 1.0:
        rpt = _residue_series_density(params, x)
        # accepted but uncertified: flag best-effort status
        return EvalReport(rpt.value, rpt.abs_err_estimate, rpt.terms_used,
                          rpt.max_term_magnitude, rpt.cancellation_ratio,
                          rpt.precision_path, precision_loss=True)
    if method == "series" or (method == "auto" and a > 0.55):
        try:
            rpt = _residue_series_density(params, x)
            if rpt.certifies(1e-9, 1e-14 * max(1.0, rpt.value)):
                return rpt
        except TermCapExceeded:
            pass
        if method == "series":
            raise QuadratureFailure(
                f"residue series cannot certify at alpha={a!r}, x={x!r}")
    return _blend_density(params, x)


def _blend_density(params: SmashedGammaParams, x: float) -> EvalReport:
    """Convolution route: int f_alpha(x/t) t^(g-2) e^(-t) / Gamma(g) dt
    over the series density engine, split at the gamma mode with the
    tail truncated where its bound is negligible."""
    a, g = params.alpha, params.gamma_shape
    idx = _index_for(a)

    def integrand(t: float) -> float:
        inner = density(idx, x / t, rel_tol=1e-11, abs_floor=1e-16)
        return inner.value * math.exp((g - 2.0) * math.log(t) - t
                                      - math.lgamma(g))

    upper = g + 40.0 + 12.0 * math.sqrt(g)
    pts = sorted({max(g - 1.0, 0.05), g + 2.0, min(max(x, 0.02), upper * 0.5)})
    val, err = quad(integrand, 0.0, upper, points=pts, limit=300,
                    epsabs=1e-13, epsrel=1e-9)
    return EvalReport(val, max(err, abs(val) * 1e-9), 0, abs(val),
                      1.0, "standard")


def _residue_series_density(params: SmashedGammaParams, x: float) -> EvalReport:
    """Density from the transform's residue series x^(g-1) /
    (alpha Gamma(g)) * sum_n Gamma((g+n)/alpha) / (Gamma(g+n) n!)
    (-x)^n; passes the convergence gate exactly when alpha > 1/2."""
    a, g = params.alpha, params.gamma_shape
    spec = WrightSpec(((g / a, 1.0 / a),), ((g, 1.0),), -x)
    rpt = eval_wright(spec, log_scale=-math.lgamma(g))
    if rpt.precision_loss or not rpt.certifies(1e-10, 1e-16):
        rpt = eval_wright(spec, as_extended(SeriesConfig()),
                          log_scale=-math.lgamma(g))
    w = x ** (g - 1.0) / a
    return EvalReport(rpt.value * w, rpt.abs_err_estimate * w, rpt.terms_used,
                      rpt.max_term_magnitude * w, rpt.cancellation_ratio,
                      rpt.precision_path)


def smashed_laplace(params: SmashedGammaParams, y: float) -> float:
    """Laplace transform sum_k (-1)^k Gamma(g + alpha k) / (k! Gamma(g))
    * y^(alpha k); falls back to direct quadrature of
    exp(-y x) * density when the series is outside its certified range
    (alpha >= 1, or a term cap hit).
    """
    if not (math.isfinite(y) and y >= 0.0):
        raise DomainError(f"smashed_laplace requires y >= 0, got {y!r}")
    if y == 0.0:
        return 1.0
    a, g = params.alpha, params.gamma_shape
    try:
        spec = WrightSpec(((g, a),), (), -(y**a))
        rpt = eval_wright(spec, log_scale=-math.lgamma(g))
        if rpt.precision_loss:
            rpt = eval_wright(spec, as_extended(SeriesConfig()),
                              log_scale=-math.lgamma(g))
        return rpt.value
    except (ConvergenceGateError, TermCapExceeded):
        return _laplace_by_quadrature(params, y)


def _laplace_by_quadrature(params: SmashedGammaParams, y: float) -> float:
    g = params.gamma_shape
    upper = (g + 60.0) / min(1.0, 1.0 + y) + 60.0 / max(y, 0.25)

    def integrand(x: float) -> float:
        return math.exp(-y * x) * smashed_density(params, x).value

    pts = sorted({max(g - 1.0, 0.05), min(5.0 / y, upper / 2.0)})
    val, _ = quad(integrand, 0.0, upper, points=pts, limit=300,
                  epsabs=1e-11, epsrel=1e-9)
    return val


def process_cdf(params: SmashedGammaParams, x: float) -> float:
    """Distribution function of the blend, shape slot read as time."""
    if not (math.isfinite(x) and x > 0.0):
        raise DomainError(f"process_cdf requires finite x > 0, got {x!r}")
    a, g = params.alpha, params.gamma_shape
    if a == 1.0:
        return float(gammainc(g, x))
    if a == 0.5:
        # antiderivative of the closed form: substituting v = 4x/(1+4x)
        # turns it into the Beta(g, 1/2) integrand exactly
        return float(betainc(g, 0.5, 4.0 * x / (1.0 + 4.0 * x)))
    val, _ = quad(lambda u: smashed_density(params, u).value, 0.0, x,
                  points=[x * 0.5] if x > 0.2 else None, limit=300,
                  epsabs=1e-11, epsrel=1e-9)
    return min(max(val, 0.0), 1.0)


def attraction_check(params: SmashedGammaParams, y: float, n: int) -> float:
    """The rescaled transform sum_k (-1)^k Gamma(n + alpha k) /
    (k! Gamma(n)) (y/n)^(alpha k), whose n -> inf limit is
    exp(-y^alpha).  Only alpha is read from params; the shape slot is
    what n replaces.
    """
    if not (math.isfinite(y) and y > 0.0):
        raise DomainError(f"attraction_check requires y > 0, got {y!r}")
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    a = params.alpha
    if a == 1.0:
        # the series is the binomial expansion of (1 + y/n)^(-n) exactly
        return (1.0 + y / n) ** (-n)
    spec = WrightSpec(((float(n), a),), (), -((y / n) ** a))
    rpt = eval_wright(spec, log_scale=-math.lgamma(n))
    if rpt.precision_loss:
        rpt = eval_wright(spec, as_extended(SeriesConfig()),
                          log_scale=-math.lgamma(n))
    return rpt.value


def levy_smirnov_pdf(params: LevySmirnovParams, t: float) -> float:
    """sqrt(mu) / (sqrt(2 pi) t^(3/2)) * exp(-mu/(2t)); equals the
    alpha = 1/2 stable density when mu = 1/2."""
    if not (math.isfinite(t) and t > 0.0):
        raise DomainError(f"levy_smirnov_pdf requires t > 0, got {t!r}")
    mu = params.mu
    arg = -mu / (2.0 * t)
    if arg < -745.0:
        return 0.0
    return math.sqrt(mu) / (math.sqrt(2.0 * math.pi) * t**1.5) * math.exp(arg)
