"""Extended-precision backend for the series evaluators.

Built on the stdlib ``decimal`` module: a dedicated 50-digit context
(well above the 30 significant digits the escalation path must deliver)
with a huge exponent range, so gamma factors of order Gamma(1e5) and
worse never overflow the way binary64 does.

Only what the series kernels need lives here: gamma at arbitrary real
non-pole arguments (Stirling series after an upward shift, reflection
below 1/2), sin(pi*x) with exact reduction, and pi.
"""

from __future__ import annotations

import decimal
from decimal import Decimal
from fractions import Fraction

from .errors import DomainError, PoleError

__all__ = [
    "CONTEXT",
    "DEC_PREC",
    "PI_D",
    "to_decimal",
    "is_nonpositive_integer_dec",
    "sinpi_ext",
    "gamma_ext",
    "recip_gamma_ext",
]

#: Working precision (decimal digits) of the escalation path.
DEC_PREC = 50

CONTEXT = decimal.Context(prec=DEC_PREC, Emax=10**8, Emin=-(10**8))

PI_D = Decimal("3.14159265358979323846264338327950288419716939937511")

# B_2 .. B_30; enough for ~1e-44 Stirling truncation once the argument
# has been shifted above 40.
_BERNOULLI: tuple[Fraction, ...] = (
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
    Fraction(-3617, 510),
    Fraction(43867, 798),
    Fraction(-174611, 330),
    Fraction(854513, 138),
    Fraction(-236364091, 2730),
    Fraction(8553103, 6),
    Fraction(-23749461029, 870),
    Fraction(8615841276005, 14322),
)

_STIRLING_MIN = 40

_LOG_2PI_HALF = None  # ln(2*pi)/2, computed lazily inside CONTEXT


def to_decimal(x) -> Decimal:
    """Exact conversion of a float/int/Fraction/Decimal to Decimal."""
    if isinstance(x, Decimal):
        return x
    if isinstance(x, Fraction):
        return CONTEXT.divide(Decimal(x.numerator), Decimal(x.denominator))
    return Decimal(x)  # float -> Decimal is exact


def is_nonpositive_integer_dec(x: Decimal) -> bool:
    return x <= 0 and x == x.to_integral_value()


def sinpi_ext(x: Decimal) -> Decimal:
    """sin(pi*x) to full working precision, reduced by the nearest integer."""
    with decimal.localcontext(CONTEXT) as ctx:
        ctx.prec += 8
        n = int(x.to_integral_value(rounding=decimal.ROUND_HALF_EVEN))
        f = x - n  # exact, |f| <= 1/2
        pf = PI_D * f
        term = pf
        total = Decimal(0)
        k = 0
        stop = Decimal(10) ** (-(DEC_PREC + 6))
        while True:
            total += term
            k += 1
            term *= -pf * pf / ((2 * k) * (2 * k + 1))
            if abs(term) < stop:
                break
        if n % 2:
            total = -total
        total = +total  # round inside the widened context
    return total


def _log_gamma_shifted(y: Decimal) -> Decimal:
    """ln Gamma(y) by the Stirling series; requires y >= _STIRLING_MIN."""
    global _LOG_2PI_HALF
    if _LOG_2PI_HALF is None:
        with decimal.localcontext(CONTEXT) as c2:
            c2.prec += 10
            _LOG_2PI_HALF = (2 * PI_D).ln() / 2
    out = (y - Decimal("0.5")) * y.ln() - y + _LOG_2PI_HALF
    y2 = y * y
    yp = y
    for m, b in enumerate(_BERNOULLI, start=1):
        out += to_decimal(b) / ((2 * m) * (2 * m - 1) * yp)
        yp *= y2
    return out


def gamma_ext(x: Decimal) -> Decimal:
    """Gamma(x) to ~DEC_PREC digits for any real non-pole x."""
    with decimal.localcontext(CONTEXT) as ctx:
        ctx.prec += 10
        if is_nonpositive_integer_dec(x):
            raise PoleError(f"gamma pole at x={x}")
        if x < Decimal("0.5"):
            s = sinpi_ext(x)
            result = PI_D / (s * gamma_ext(1 - x))
        else:
            shift = Decimal(1)
            y = x
            while y < _STIRLING_MIN:
                shift *= y
                y += 1
            result = _log_gamma_shifted(y).exp() / shift
        result = +result
    return result


def recip_gamma_ext(x: Decimal) -> Decimal:
    """1/Gamma(x); exactly 0 on the poles (total, like the float version)."""
    if is_nonpositive_integer_dec(x):
        return Decimal(0)
    with decimal.localcontext(CONTEXT):
        return +(1 / gamma_ext(x))
