"""Real-argument gamma machinery: log-gamma with sign, total reciprocal
gamma, Pochhammer symbols, the jump function used to build series
parameter lists, and the multiplication-formula residual check.

All functions are pure and operate on binary64 scalars.  Negative
arguments always go through the reflection formula, which keeps accuracy
uniform near the poles instead of degrading the way a naive Stirling
continuation would.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DomainError, PoleError

__all__ = [
    "sinpi",
    "cospi",
    "is_nonpositive_integer",
    "log_gamma",
    "gamma_fn",
    "recip_gamma",
    "pochhammer",
    "negated_gamma_ratio",
    "levy_jump",
    "gauss_legendre_check",
]

_LOG_PI = math.log(math.pi)


def is_nonpositive_integer(x: float) -> bool:
    """True when x is exactly 0, -1, -2, ... (a pole of the gamma function)."""
    return x <= 0.0 and x == math.floor(x) and math.isfinite(x)


def sinpi(x: float) -> float:
    """sin(pi*x) with exact integer range reduction.

    Reducing x by its nearest integer before multiplying by pi keeps the
    result accurate for large |x|, where sin(math.pi * x) loses all
    digits.
    """
    n = round(x)
    r = x - n  # exact: |r| <= 0.5
    s = math.sin(math.pi * r)
    return -s if n % 2 else s


def cospi(x: float) -> float:
    """cos(pi*x) with the same exact reduction as :func:`sinpi`."""
    n = round(x)
    r = x - n
    c = math.cos(math.pi * r)
    return -c if n % 2 else c


def log_gamma(x: float) -> tuple[float, int]:
    """Return (log|Gamma(x)|, sign) with sign in {+1, -1}.

    For x >= 0.5 this defers to the C library lgamma.  For x < 0.5 the
    reflection formula Gamma(x)*Gamma(1-x) = pi/sin(pi*x) is applied, so
    accuracy holds arbitrarily close to the poles.

    Raises PoleError when x is a nonpositive integer.
    """
    if not math.isfinite(x):
        raise DomainError(f"log_gamma requires a finite argument, got {x!r}")
    if is_nonpositive_integer(x):
        raise PoleError(f"gamma pole at x={x!r}")
    if x >= 0.5:
        return math.lgamma(x), 1
    s = sinpi(x)
    logmag = _LOG_PI - math.log(abs(s)) - math.lgamma(1.0 - x)
    return logmag, (1 if s > 0.0 else -1)


def gamma_fn(x: float) -> float:
    """Gamma(x) as a float; overflows to +/-inf past |Gamma| ~ 1.8e308."""
    logmag, sign = log_gamma(x)
    if logmag > 709.78:
        return math.inf * sign
    return sign * math.exp(logmag)


def recip_gamma(x: float) -> float:
    """1/Gamma(x), total on the reals: exactly 0.0 at every pole.

    The zero return is what makes series terms with a pole in a
    denominator gamma vanish silently, mirroring the residue calculus
    the parameter lists are built from.  For very negative non-integer x
    the true value exceeds the float range and +/-inf is returned.
    """
    if not math.isfinite(x):
        raise DomainError(f"recip_gamma requires a finite argument, got {x!r}")
    if is_nonpositive_integer(x):
        return 0.0
    logmag, sign = log_gamma(x)
    if logmag < -709.78:
        return math.inf * sign
    return sign * math.exp(-logmag)


def pochhammer(b: float, k: int) -> float:
    """Rising factorial (b)_k = b (b+1) ... (b+k-1), with (b)_0 = 1.

    Computed by the literal product, which is total (no poles) and exact
    for exactly representable factors.
    """
    if k < 0:
        raise DomainError(f"pochhammer order must be >= 0, got {k}")
    out = 1.0
    for i in range(k):
        out *= b + i
    return out


def negated_gamma_ratio(beta: float, v: int) -> float:
    """Gamma(beta+1-v) evaluated as (-1)^v * Gamma(beta+1) / (-beta)_v.

    This is the downward-shift identity used to convert gamma factors at
    negatively shifted arguments into Pochhammer coefficients.  Raises
    PoleError when the left-hand side sits on a gamma pole (equivalently
    when the Pochhammer denominator vanishes).
    """
    if v < 0:
        raise DomainError(f"shift count must be >= 0, got {v}")
    if is_nonpositive_integer(beta + 1.0):
        raise PoleError(f"gamma pole at beta+1={beta + 1.0!r}")
    denom = pochhammer(-beta, v)
    if denom == 0.0:
        # (-beta)_v = 0 exactly when beta+1-v, ..., beta are integers
        # crossing zero, i.e. the target argument is itself a pole.
        raise PoleError(f"gamma pole at beta+1-v={beta + 1.0 - v!r}")
    logmag, sign = log_gamma(beta + 1.0)
    value = sign * math.exp(logmag) / denom
    return -value if v % 2 else value


def levy_jump(j: int, q: int, n: int) -> Fraction:
    """Piecewise index map: j/q when j < n, (j+1)/q when j >= n.

    Exact rational output; the callers convert to float only when the
    final series parameter has been assembled.  The map skips the value
    that would put a series parameter on top of its own pole.
    """
    if q < 2:
        raise DomainError(f"denominator q must be >= 2, got {q}")
    if n < 1:
        raise DomainError(f"threshold n must be >= 1, got {n}")
    if not 1 <= j <= q - 1:
        raise DomainError(f"j must lie in 1..{q - 1}, got {j}")
    return Fraction(j, q) if j < n else Fraction(j + 1, q)


def gauss_legendre_check(m: int, z: float) -> float:
    """Relative residual of the gamma multiplication formula of order m.

    Evaluates |Gamma(mz) - (2*pi)^((1-m)/2) * m^(mz-1/2) * prod_r
    Gamma(z + r/m)| / |Gamma(mz)| entirely in log space, so large
    arguments do not overflow.  Intended for tests; m = 1 returns 0.
    """
    if m < 1:
        raise DomainError(f"order m must be >= 1, got {m}")
    if m == 1:
        return 0.0
    lhs_log, lhs_sign = log_gamma(m * z)
    rhs_log = 0.5 * (1 - m) * math.log(2.0 * math.pi) + (m * z - 0.5) * math.log(m)
    rhs_sign = 1
    for r in range(m):
        lg, sg = log_gamma(z + r / m)
        rhs_log += lg
        rhs_sign *= sg
    return abs(1.0 - (rhs_sign * lhs_sign) * math.exp(rhs_log - lhs_log))
