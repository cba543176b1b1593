"""Truncated-series evaluation of generalized Wright functions and
hypergeometric pFq, with convergence gating, a past-peak stopping rule,
and cancellation diagnostics.

Two precision paths share one control flow:

* standard -- binary64 with error-free (Neumaier) compensated summation
  and per-term gamma factors assembled in log space, so individual
  factors can be astronomically large without overflow;
* extended -- ~50 significant decimal digits via :mod:`.extended`,
  entered when cancellation would eat the standard path's accuracy.

The Wright path calls log-gamma per term (the coefficients A_i, B_j are
not unit steps, so no exact recurrence exists); the pFq path uses the
exact Pochhammer ratio recurrence and never touches gamma ratios.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass, replace
from decimal import Decimal

from . import extended
from .errors import (
    ConvergenceGateError,
    DomainError,
    PoleError,
    TermCapExceeded,
)
from .gammakit import is_nonpositive_integer, log_gamma

__all__ = [
    "SeriesConfig",
    "EvalReport",
    "WrightSpec",
    "HypSpec",
    "convergence_margin",
    "eval_wright",
    "eval_hyp",
    "NeumaierSum",
]

_EPS = 2.220446049250313e-16
_EPS_EXT = Decimal(10) ** (-(extended.DEC_PREC - 4))
_REL_TOL_EXT = 1e-42
_CONSECUTIVE_SMALL = 3


class NeumaierSum:
    """Running compensated sum (Kahan-Babuska-Neumaier variant).

    Tracks the rounding remainder of every addition, so the recovered
    sum is accurate to ~1 ulp of the true value regardless of interim
    cancellation between addends.
    """

    __slots__ = ("_s", "_c")

    def __init__(self) -> None:
        self._s = 0.0
        self._c = 0.0

    def add(self, v: float) -> None:
        t = self._s + v
        if abs(self._s) >= abs(v):
            self._c += (self._s - t) + v
        else:
            self._c += (v - t) + self._s
        self._s = t

    @property
    def value(self) -> float:
        return self._s + self._c


@dataclass(frozen=True)
class SeriesConfig:
    """Knobs for the series evaluators.

    rel_tol drives the stopping rule (terms must fall below
    rel_tol * |partial sum| for three consecutive terms, past the term
    magnitude peak).  cancellation_threshold is the max-term-to-value
    ratio beyond which the standard path flags PrecisionLoss.
    """

    rel_tol: float = 1e-13
    term_cap: int = 10_000
    cancellation_threshold: float = 1e12
    precision: str = "standard"  # or "extended"

    def __post_init__(self) -> None:
        if self.rel_tol <= 0.0:
            raise DomainError("rel_tol must be positive")
        if self.term_cap < 1:
            raise DomainError("term_cap must be >= 1")
        if self.precision not in ("standard", "extended"):
            raise DomainError(f"unknown precision path {self.precision!r}")


DEFAULT_CONFIG = SeriesConfig()


@dataclass(frozen=True)
class EvalReport:
    """Value plus the diagnostics needed to decide whether to trust it."""

    value: float
    abs_err_estimate: float
    terms_used: int
    max_term_magnitude: float
    cancellation_ratio: float
    precision_path: str
    precision_loss: bool = False

    def certifies(self, rel_tol: float, abs_floor: float = 0.0) -> bool:
        """True when the error estimate meets rel_tol (or the floor)."""
        bound = max(rel_tol * abs(self.value), abs_floor)
        return not self.precision_loss and self.abs_err_estimate <= bound


@dataclass(frozen=True)
class WrightSpec:
    """Parameter lists ((a_i, A_i)), ((b_j, B_j)) and argument z of one
    generalized Wright series sum_n prod Gamma(a_i + A_i n) /
    (prod Gamma(b_j + B_j n) n!) z^n.

    Construction enforces nonzero coefficients and the absolute
    convergence margin sum B_j - sum A_i > -1; specs on the wrong side
    of the gate are rejected outright rather than special-cased.
    """

    upper: tuple[tuple[float, float], ...]
    lower: tuple[tuple[float, float], ...]
    z: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "upper", tuple((float(a), float(A)) for a, A in self.upper))
        object.__setattr__(self, "lower", tuple((float(b), float(B)) for b, B in self.lower))
        for _, A in self.upper:
            if A == 0.0:
                raise DomainError("upper coefficients A_i must be nonzero")
        for _, B in self.lower:
            if B == 0.0:
                raise DomainError("lower coefficients B_j must be nonzero")
        mu = convergence_margin(self)
        if mu <= -1.0:
            raise ConvergenceGateError(
                f"convergence margin {mu!r} fails the > -1 gate"
            )


@dataclass(frozen=True)
class HypSpec:
    """Upper/lower parameter lists and argument of a pFq series."""

    upper: tuple[float, ...]
    lower: tuple[float, ...]
    z: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "upper", tuple(float(a) for a in self.upper))
        object.__setattr__(self, "lower", tuple(float(b) for b in self.lower))
        if len(self.upper) > len(self.lower):
            raise ConvergenceGateError(
                f"{len(self.upper)}F{len(self.lower)} is not entire; need p <= q"
            )
        for b in self.lower:
            if is_nonpositive_integer(b):
                raise DomainError(f"lower parameter {b!r} is a gamma pole")


def convergence_margin(spec: WrightSpec) -> float:
    """sum B_j - sum A_i with the coefficients' stored signs."""
    return math.fsum(B for _, B in spec.lower) - math.fsum(A for _, A in spec.upper)


# ---------------------------------------------------------------------------
# shared stopping rule


class _StopRule:
    """Three consecutive sub-tolerance terms, strictly past the peak.

    Exact-zero terms (denominator gamma on a pole) count as small
    without consulting the peak, so identically vanishing series
    terminate instead of running to the cap.
    """

    __slots__ = ("rel_tol", "run", "max_mag")

    def __init__(self, rel_tol) -> None:
        self.rel_tol = rel_tol
        self.run = 0
        self.max_mag = None

    def update(self, mag, partial_mag) -> bool:
        if self.max_mag is None or mag > self.max_mag:
            self.max_mag = mag
        if mag == 0:
            self.run += 1
        elif mag < self.max_mag and mag <= self.rel_tol * partial_mag:
            self.run += 1
        else:
            self.run = 0
        return self.run >= _CONSECUTIVE_SMALL


# ---------------------------------------------------------------------------
# Wright series


def _wright_term_log(spec: WrightSpec, n: int, log_scale: float) -> tuple[float, int] | None:
    """(log|term_n| - n log|z| part, sign); None when a denominator gamma
    sits on a pole (term is exactly zero).  Numerator poles are hard
    errors: valid assemblies never produce them."""
    logmag = log_scale
    sign = 1
    for a, A in spec.upper:
        arg = a + A * n
        if is_nonpositive_integer(arg):
            raise PoleError(
                f"numerator gamma pole at term {n}: a={a!r}, A={A!r}"
            )
        lg, sg = log_gamma(arg)
        logmag += lg
        sign *= sg
    for b, B in spec.lower:
        arg = b + B * n
        if is_nonpositive_integer(arg):
            return None
        lg, sg = log_gamma(arg)
        logmag -= lg
        sign *= sg
    return logmag - math.lgamma(n + 1.0), sign


def _sum_wright_standard(spec: WrightSpec, config: SeriesConfig, log_scale: float) -> EvalReport:
    if spec.z == 0.0:
        t = _wright_term_log(spec, 0, log_scale)
        value = 0.0 if t is None else t[1] * math.exp(t[0])
        return EvalReport(value, abs(value) * 4.0 * _EPS, 1, abs(value),
                          0.0 if value == 0.0 else 1.0, "standard")

    ln_z = math.log(abs(spec.z))
    neg = spec.z < 0.0
    acc = NeumaierSum()
    abs_sum = 0.0
    max_mag = 0.0
    rule = _StopRule(config.rel_tol)
    nfac = len(spec.upper) + len(spec.lower)
    stopped_at = None
    for n in range(config.term_cap):
        t = _wright_term_log(spec, n, log_scale)
        if t is None:
            term = 0.0
        else:
            logmag, sign = t
            term = sign * math.exp(logmag + n * ln_z)
            if neg and (n % 2):
                term = -term
        acc.add(term)
        mag = abs(term)
        abs_sum += mag
        if mag > max_mag:
            max_mag = mag
        if rule.update(mag, abs(acc.value)):
            stopped_at = n
            break
    if stopped_at is None:
        raise TermCapExceeded(
            f"stopping rule never fired within {config.term_cap} terms"
        )
    # first omitted term, for the truncation part of the error estimate
    t = _wright_term_log(spec, stopped_at + 1, log_scale)
    omitted = 0.0 if t is None else math.exp(t[0] + (stopped_at + 1) * ln_z)
    value = acc.value
    round_err = abs_sum * _EPS * (nfac + 3)
    abs_err = 2.0 * omitted + round_err + abs(value) * 2.0 * _EPS
    if value == 0.0:
        ratio = 0.0 if max_mag == 0.0 else math.inf
    else:
        ratio = max_mag / abs(value)
    loss = ratio > config.cancellation_threshold
    return EvalReport(value, abs_err, stopped_at + 1, max_mag, ratio,
                      "standard", precision_loss=loss)


def _wright_term_ext(uppers, lowers, n, z_pow, inv_fact, scale):
    """Extended-precision term from prepared Decimal parameter pairs;
    Decimal z_pow = z^n, inv_fact = 1/n!."""
    num = scale
    for a, A in uppers:
        arg = a + A * n
        if extended.is_nonpositive_integer_dec(arg):
            raise PoleError(f"numerator gamma pole at term {n}: a={a}, A={A}")
        num *= extended.gamma_ext(arg)
    for b, B in lowers:
        arg = b + B * n
        rg = extended.recip_gamma_ext(arg)
        if rg == 0:
            return Decimal(0)
        num *= rg
    return num * z_pow * inv_fact


def _sum_wright_extended(spec: WrightSpec, config: SeriesConfig, log_scale: float,
                         z_dec: Decimal | None = None,
                         params_dec=None):
    """Decimal-path summation; returns (value, abs_err, terms, max_mag)
    as Decimals so callers can combine blocks before rounding.

    z_dec overrides spec.z when the true argument needs more precision
    or range than a float carries; params_dec, when given, is
    (uppers, lowers) as Decimal pairs built from exact rationals, which
    is what preserves deep block-level cancellation.
    """
    with decimal.localcontext(extended.CONTEXT):
        scale = extended.to_decimal(log_scale).exp() if log_scale else Decimal(1)
        z = extended.to_decimal(spec.z) if z_dec is None else z_dec
        if params_dec is None:
            uppers = tuple((extended.to_decimal(a), extended.to_decimal(A))
                           for a, A in spec.upper)
            lowers = tuple((extended.to_decimal(b), extended.to_decimal(B))
                           for b, B in spec.lower)
        else:
            uppers, lowers = params_dec
        if z == 0:
            v = _wright_term_ext(uppers, lowers, 0, Decimal(1), Decimal(1), scale)
            return v, abs(v) * _EPS_EXT, 1, abs(v)
        total = Decimal(0)
        abs_sum = Decimal(0)
        max_mag = Decimal(0)
        z_pow = Decimal(1)
        inv_fact = Decimal(1)
        rule = _StopRule(Decimal(repr(_REL_TOL_EXT)))
        stopped_at = None
        for n in range(config.term_cap):
            if n:
                z_pow *= z
                inv_fact /= n
            term = _wright_term_ext(uppers, lowers, n, z_pow, inv_fact, scale)
            total += term
            mag = abs(term)
            abs_sum += mag
            if mag > max_mag:
                max_mag = mag
            if rule.update(mag, abs(total)):
                stopped_at = n
                break
        if stopped_at is None:
            raise TermCapExceeded(
                f"stopping rule never fired within {config.term_cap} terms (extended)"
            )
        omitted = abs(_wright_term_ext(
            uppers, lowers, stopped_at + 1, z_pow * z,
            inv_fact / (stopped_at + 1), scale))
        abs_err = 2 * omitted + abs_sum * _EPS_EXT
        return total, abs_err, stopped_at + 1, max_mag


def eval_wright(spec: WrightSpec, config: SeriesConfig | None = None,
                *, log_scale: float = 0.0) -> EvalReport:
    """Evaluate a generalized Wright series per the configured path.

    log_scale adds a constant to every term's log magnitude: callers
    normalizing by a huge external gamma factor (e.g. 1/Gamma(n) with n
    in the thousands) pass its negative log here so individual terms
    stay inside the float range.

    Raises ConvergenceGateError at spec construction for margin <= -1,
    TermCapExceeded if the stopping rule never fires, PoleError on a
    numerator gamma pole.  Cancellation past the configured threshold is
    reported via ``precision_loss`` (standard path only); the caller
    decides whether to retry on the extended path.
    """
    config = config or DEFAULT_CONFIG
    if config.precision == "standard":
        return _sum_wright_standard(spec, config, log_scale)
    value, err, terms, max_mag = _sum_wright_extended(spec, config, log_scale)
    return _extended_report(value, err, terms, max_mag)


def _extended_report(value: Decimal, err: Decimal, terms: int,
                     max_mag: Decimal) -> EvalReport:
    fval = _to_float(value)
    if max_mag == 0:
        ratio = 0.0
    elif fval == 0.0:
        ratio = math.inf
    else:
        with decimal.localcontext(extended.CONTEXT):
            ratio = _to_float(max_mag / abs(value)) if value != 0 else math.inf
    return EvalReport(fval, _to_float(err) + abs(fval) * _EPS, terms,
                      _to_float(max_mag), ratio, "extended")


def _to_float(d: Decimal) -> float:
    try:
        return float(d)
    except OverflowError:
        return math.inf if d > 0 else -math.inf


# ---------------------------------------------------------------------------
# hypergeometric pFq


def _hyp_prefactor_ratio(spec: HypSpec, n: int) -> float:
    r = 1.0
    for a in spec.upper:
        r *= a + n
    for b in spec.lower:
        r /= b + n
    return r / (n + 1.0)


def _sum_hyp_standard(spec: HypSpec, config: SeriesConfig) -> EvalReport:
    acc = NeumaierSum()
    term = 1.0
    abs_sum = 0.0
    max_mag = 0.0
    rule = _StopRule(config.rel_tol)
    stopped_at = None
    for n in range(config.term_cap):
        acc.add(term)
        mag = abs(term)
        abs_sum += mag
        if mag > max_mag:
            max_mag = mag
        if rule.update(mag, abs(acc.value)):
            stopped_at = n
            break
        term *= _hyp_prefactor_ratio(spec, n) * spec.z
    if stopped_at is None:
        raise TermCapExceeded(
            f"stopping rule never fired within {config.term_cap} terms"
        )
    omitted = abs(term * _hyp_prefactor_ratio(spec, stopped_at) * spec.z)
    value = acc.value
    round_err = abs_sum * _EPS * (len(spec.upper) + len(spec.lower) + 3)
    abs_err = 2.0 * omitted + round_err + abs(value) * 2.0 * _EPS
    if value == 0.0:
        ratio = 0.0 if max_mag == 0.0 else math.inf
    else:
        ratio = max_mag / abs(value)
    loss = ratio > config.cancellation_threshold
    return EvalReport(value, abs_err, stopped_at + 1, max_mag, ratio,
                      "standard", precision_loss=loss)


def _sum_hyp_extended(spec: HypSpec, config: SeriesConfig,
                      z_dec: Decimal | None = None,
                      params_dec=None):
    with decimal.localcontext(extended.CONTEXT):
        z = extended.to_decimal(spec.z) if z_dec is None else z_dec
        if params_dec is None:
            uppers = [extended.to_decimal(a) for a in spec.upper]
            lowers = [extended.to_decimal(b) for b in spec.lower]
        else:
            uppers, lowers = params_dec
        term = Decimal(1)
        total = Decimal(0)
        abs_sum = Decimal(0)
        max_mag = Decimal(0)
        rule = _StopRule(Decimal(repr(_REL_TOL_EXT)))
        stopped_at = None
        for n in range(config.term_cap):
            total += term
            mag = abs(term)
            abs_sum += mag
            if mag > max_mag:
                max_mag = mag
            if rule.update(mag, abs(total)):
                stopped_at = n
                break
            for a in uppers:
                term *= a + n
            for b in lowers:
                term /= b + n
            term *= z / (n + 1)
        if stopped_at is None:
            raise TermCapExceeded(
                f"stopping rule never fired within {config.term_cap} terms (extended)"
            )
        nxt = term
        for a in uppers:
            nxt *= a + stopped_at
        for b in lowers:
            nxt /= b + stopped_at
        omitted = abs(nxt * z / (stopped_at + 1))
        abs_err = 2 * omitted + abs_sum * _EPS_EXT
        return total, abs_err, stopped_at + 1, max_mag


def eval_hyp(spec: HypSpec, config: SeriesConfig | None = None) -> EvalReport:
    """Evaluate pFq by the exact coefficient recurrence
    t_{n+1} = t_n * prod(a_i + n) / prod(b_j + n) * z / (n + 1).

    Always convergent for p <= q (enforced at construction), so there is
    no gate; everything else matches :func:`eval_wright`'s contract.
    """
    config = config or DEFAULT_CONFIG
    if config.precision == "standard":
        return _sum_hyp_standard(spec, config)
    value, err, terms, max_mag = _sum_hyp_extended(spec, config)
    return _extended_report(value, err, terms, max_mag)


def as_extended(config: SeriesConfig) -> SeriesConfig:
    """The same configuration switched onto the extended path."""
    return replace(config, precision="extended")
