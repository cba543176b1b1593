"""One-sided stable densities f(x) with Laplace transform exp(-t^alpha),
for indices of the form alpha = (p/q)^(l2/l1) in (0, 1).

An index resolves to one of three series assemblies, keyed by the
auxiliary exponent ell = (p/q)^(l2/l1 - 1) (note alpha = (p/q) * ell):

* ell not a positive integer -- q blocks of generalized Wright series
  with coefficient steps (-1, -ell), argument -p^(p*ell)/(x^(p*ell) q^q);
* ell = 1 (so alpha = p/q in lowest terms) -- q-1 blocks that collapse
  to gamma-weighted (p-1)F(q-2) series with argument
  (-1)^(q-p) p^p/(x^p q^q);
* ell in {2, 3, ...} -- q-1 blocks of Wright series picking up extra
  unit-step lower entries from splitting Gamma(ell*s) by the gamma
  multiplication formula, argument gaining an ell^ell factor.

All rational parameter offsets are assembled in exact Fraction
arithmetic and converted to float once, so parameters that should sit
exactly on a gamma pole (vanishing blocks) really do.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from . import extended
from .errors import AccuracyError, ConstructionError, DomainError
from .gammakit import levy_jump, log_gamma
from .series import (
    DEFAULT_CONFIG,
    EvalReport,
    HypSpec,
    SeriesConfig,
    WrightSpec,
    as_extended,
    eval_hyp,
    eval_wright,
    _extended_report,
    _sum_hyp_extended,
    _sum_wright_extended,
    _to_float,
    NeumaierSum,
)

__all__ = [
    "Branch",
    "LevyIndex",
    "Block",
    "Representation",
    "resolve_index",
    "build_representation",
    "density",
    "enumerate_representations",
]

_EPS = 2.220446049250313e-16


class Branch(Enum):
    """Which of the three series assemblies an index resolves to."""

    NON_INTEGER_ELL = "non_integer_ell"
    UNIT_ELL = "unit_ell"
    INTEGER_ELL = "integer_ell"


def _iroot(n: int, k: int) -> int | None:
    """Exact integer k-th root of n >= 1, or None."""
    if n < 1 or k < 1:
        return None
    if n == 1 or k == 1:
        return n
    r = round(n ** (1.0 / k))
    for c in (r - 1, r, r + 1):
        if c >= 1 and c**k == n:
            return c
    return None


@dataclass(frozen=True)
class LevyIndex:
    """A resolved index alpha = (p/q)^(l2/l1) with its derived data.

    p, q, l1, l2 are stored after exponent reduction (gcd(l1, l2) pulled
    out) and, for the unit branch only, base reduction (gcd(p, q) pulled
    out): unreduced bases such as (2, 8) with exponent 1/2 are kept, as
    they define genuinely distinct series for the same alpha.
    """

    p: int
    q: int
    l1: int
    l2: int
    alpha: float
    ell: float
    branch: Branch
    ell_int: int | None = None
    alpha_frac: Fraction | None = None

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return f"({self.p},{self.q},{self.l1},{self.l2})[alpha={self.alpha:.12g}]"


def resolve_index(p: int, q: int, l1: int, l2: int) -> LevyIndex:
    """Validate and classify an index tuple.

    Raises DomainError unless all inputs are positive integers with
    p < q (which already forces alpha into (0, 1)).
    """
    for name, v in (("p", p), ("q", q), ("l1", l1), ("l2", l2)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise DomainError(f"{name} must be a positive integer, got {v!r}")
    if p >= q:
        raise DomainError(f"need p < q for an index in (0, 1), got p={p}, q={q}")
    g = math.gcd(l1, l2)
    l1, l2 = l1 // g, l2 // g

    if l1 == l2:  # exponent 1: alpha = p/q itself; canonical lowest terms
        g = math.gcd(p, q)
        p, q = p // g, q // g
        alpha_frac = Fraction(p, q)
        return LevyIndex(p, q, 1, 1, p / q, 1.0, Branch.UNIT_ELL,
                         alpha_frac=alpha_frac)

    exponent = Fraction(l2, l1)
    alpha = (p / q) ** float(exponent)
    if not 0.0 < alpha < 1.0:  # unreachable given p < q; guard anyway
        raise DomainError(f"alpha={alpha!r} outside (0, 1)")

    # alpha is rational iff p^l2 and q^l2 are both perfect l1-th powers.
    alpha_frac = None
    rn = _iroot(p**l2, l1)
    rd = _iroot(q**l2, l1)
    if rn is not None and rd is not None:
        alpha_frac = Fraction(rn, rd)

    # integer ell detection, in exact arithmetic: ell = (q/p)^((l1-l2)/l1)
    ell_int = None
    if l2 < l1:
        e_num, e_den = l1 - l2, l1
        g2 = math.gcd(e_num, e_den)
        e_num, e_den = e_num // g2, e_den // g2
        t, s = q**e_num, p**e_num
        g3 = math.gcd(t, s)
        t, s = t // g3, s // g3
        if s == 1:
            r = _iroot(t, e_den)
            if r is not None and r >= 2:
                ell_int = r

    if ell_int is not None:
        if q % p != 0 or q // p <= ell_int:
            # impossible for genuine integer ell; see the structural
            # argument in resolve tests
            raise ConstructionError(
                f"integer ell={ell_int} without q = k*p, k > ell (p={p}, q={q})"
            )
        return LevyIndex(p, q, l1, l2, alpha, float(ell_int),
                         Branch.INTEGER_ELL, ell_int=ell_int,
                         alpha_frac=alpha_frac)

    ell = (p / q) ** (float(exponent) - 1.0)
    return LevyIndex(p, q, l1, l2, alpha, ell, Branch.NON_INTEGER_ELL,
                     alpha_frac=alpha_frac)


@dataclass(frozen=True)
class Block:
    """One additive block of a representation.

    Contributes coeff * u^power * S(sign_z * u) to the density sum,
    where u is the positive series argument magnitude at the evaluation
    point and S is either a Wright series (wright_upper/wright_lower
    filled) or a pFq series (hyp_upper/hyp_lower filled).

    The *_exact fields mirror the float data as exact rationals where
    the branch admits them (coeff as gamma-argument lists).  The
    extended path rebuilds everything from these at working precision:
    blocks can cancel to 25+ digits in the deep left tail, which
    float-rounded constants cannot survive.
    """

    coeff: float
    power: Fraction
    kind: str  # "wright" | "hyp"
    wright_upper: tuple[tuple[float, float], ...] = ()
    wright_lower: tuple[tuple[float, float], ...] = ()
    hyp_upper: tuple[float, ...] = ()
    hyp_lower: tuple[float, ...] = ()
    coeff_gamma_num: tuple[Fraction, ...] = ()
    coeff_gamma_den: tuple[Fraction, ...] = ()
    wright_upper_exact: tuple[tuple[Fraction, Fraction], ...] | None = None
    wright_lower_exact: tuple[tuple[Fraction, Fraction], ...] | None = None
    hyp_upper_exact: tuple[Fraction, ...] | None = None
    hyp_lower_exact: tuple[Fraction, ...] | None = None

    def series_spec(self, z: float):
        if self.kind == "wright":
            return WrightSpec(self.wright_upper, self.wright_lower, z)
        return HypSpec(self.hyp_upper, self.hyp_lower, z)

    def params_dec(self):
        """(uppers, lowers) as Decimal pairs/values for the extended
        path, from the exact mirrors when present."""
        td = extended.to_decimal
        if self.kind == "wright":
            if self.wright_upper_exact is not None:
                return (tuple((td(a), td(A)) for a, A in self.wright_upper_exact),
                        tuple((td(b), td(B)) for b, B in self.wright_lower_exact))
            return (tuple((td(a), td(A)) for a, A in self.wright_upper),
                    tuple((td(b), td(B)) for b, B in self.wright_lower))
        if self.hyp_upper_exact is not None:
            return ([td(a) for a in self.hyp_upper_exact],
                    [td(b) for b in self.hyp_lower_exact])
        return ([td(a) for a in self.hyp_upper],
                [td(b) for b in self.hyp_lower])

    def coeff_dec(self) -> Decimal:
        if not (self.coeff_gamma_num or self.coeff_gamma_den):
            return extended.to_decimal(self.coeff)
        out = Decimal(1)
        for a in self.coeff_gamma_num:
            out *= extended.gamma_ext(extended.to_decimal(a))
        for a in self.coeff_gamma_den:
            out /= extended.gamma_ext(extended.to_decimal(a))
        return out

    @property
    def exact(self) -> bool:
        """True when every constant has an exact rational mirror."""
        if self.kind == "wright":
            return self.wright_upper_exact is not None
        return self.hyp_upper_exact is not None


@dataclass(frozen=True)
class Representation:
    """A fully assembled series form of one density.

    density(x) = (scale / x) * sum_j coeff_j * u^power_j * S_j(sign_z*u)
    with u = arg_const / x^arg_power.
    """

    idx: LevyIndex
    scale: float
    arg_const: float
    arg_power: float
    sign_z: float
    blocks: tuple[Block, ...]
    arg_const_frac: Fraction | None = None  # exact for rational branches
    arg_power_int: int | None = None

    def argument(self, x: float) -> float:
        return self.arg_const / x**self.arg_power

    def argument_dec(self, x_d: Decimal) -> Decimal:
        """Series argument magnitude at working precision; exact-rational
        ingredients when the branch has them."""
        if self.arg_const_frac is not None and self.arg_power_int is not None:
            return extended.to_decimal(self.arg_const_frac) / x_d**self.arg_power_int
        return (extended.to_decimal(self.arg_const)
                / x_d ** extended.to_decimal(self.arg_power))

    def scale_dec(self) -> Decimal:
        """Overall scale at working precision.

        ell * sqrt(p*q*[ell]) / (2*pi)^(half-integer); every ingredient
        is exact except a non-integer ell, whose float rounding is a
        uniform factor and cannot disturb block cancellation.
        """
        idx = self.idx
        two_pi = 2 * extended.PI_D
        if idx.branch is Branch.INTEGER_ELL:
            root = Decimal(idx.p * idx.q * idx.ell_int).sqrt()
            expo2 = idx.q + 1 - idx.p - idx.ell_int  # twice the exponent
            lead = Decimal(1)
        else:
            root = Decimal(idx.p * idx.q).sqrt()
            expo2 = idx.q - idx.p
            lead = extended.to_decimal(idx.ell)
        out = lead * root / two_pi ** (expo2 // 2)
        if expo2 % 2:
            out /= two_pi.sqrt()
        return out


def _jump_offsets(j: int, q: int) -> list[Fraction]:
    """The q-2 exact upper offsets k/q - [j/q]_k for k = 2..q-1."""
    return [Fraction(k, q) - levy_jump(j, q, k) for k in range(2, q)]


def _build_non_integer(idx: LevyIndex) -> Representation:
    p, q, ell = idx.p, idx.q, idx.ell
    scale = ell * math.sqrt(p * q) / (2.0 * math.pi) ** ((q - p) / 2.0)
    arg_const = p ** (p * ell) / q**q
    blocks = []
    # residue block of the integer-offset lower entry: power u^1
    upper = tuple((float(-Fraction(i, q)), -1.0) for i in range(1, q))
    lower = ((1.0 - ell, -ell),) + tuple(
        (float(Fraction(k, p)) - ell, -ell) for k in range(1, p))
    blocks.append(Block(1.0, Fraction(1), "wright", upper, lower))
    for j in range(1, q):
        upper = ((float(1 - Fraction(j, q)), -1.0),) + tuple(
            (float(off), -1.0) for off in _jump_offsets(j, q))
        jl = ell * j / q
        lower = ((1.0 - jl, -ell),) + tuple(
            (float(Fraction(k, p)) - jl, -ell) for k in range(1, p))
        blocks.append(Block(1.0, Fraction(j, q), "wright", upper, lower))
    return Representation(idx, scale, arg_const, p * ell, -1.0, tuple(blocks))


def _build_unit(idx: LevyIndex) -> Representation:
    p, q = idx.p, idx.q
    scale = math.sqrt(p * q) / (2.0 * math.pi) ** ((q - p) / 2.0)
    sign_z = -1.0 if (q - p) % 2 else 1.0
    blocks = []
    for j in range(1, q):
        num_args = tuple(_jump_offsets(j, q))
        den_args = tuple(Fraction(i * q - j * p, p * q) for i in range(1, p))
        logmag = 0.0
        sign = 1
        for off in num_args:
            lg, sg = log_gamma(float(off))
            logmag += lg
            sign *= sg
        for arg in den_args:
            lg, sg = log_gamma(float(arg))
            logmag -= lg
            sign *= sg
        coeff = sign * math.exp(logmag)
        upper_exact = tuple(1 - a for a in den_args)
        lower_exact = tuple(1 - off for off in num_args)
        blocks.append(Block(coeff, Fraction(j, q), "hyp",
                            hyp_upper=tuple(float(a) for a in upper_exact),
                            hyp_lower=tuple(float(b) for b in lower_exact),
                            coeff_gamma_num=num_args,
                            coeff_gamma_den=den_args,
                            hyp_upper_exact=upper_exact,
                            hyp_lower_exact=lower_exact))
    arg_frac = Fraction(p**p, q**q)
    return Representation(idx, scale, float(arg_frac), float(p), sign_z,
                          tuple(blocks), arg_const_frac=arg_frac,
                          arg_power_int=p)


def _build_integer(idx: LevyIndex) -> Representation:
    p, q, ell = idx.p, idx.q, idx.ell_int
    scale = math.sqrt(p * q * ell) / (2.0 * math.pi) ** ((q + 1 - p - ell) / 2.0)
    blocks = []
    for j in range(1, q):
        upper_exact = tuple((off, Fraction(-1)) for off in _jump_offsets(j, q))
        lower_exact = tuple(
            (Fraction(k, ell) - Fraction(j, q), Fraction(-1))
            for k in range(1, ell)) + tuple(
            (Fraction(k, p) - Fraction(j * ell, q), Fraction(-ell))
            for k in range(1, p))
        blocks.append(Block(
            1.0, Fraction(j, q), "wright",
            wright_upper=tuple((float(a), float(A)) for a, A in upper_exact),
            wright_lower=tuple((float(b), float(B)) for b, B in lower_exact),
            wright_upper_exact=upper_exact,
            wright_lower_exact=lower_exact))
    arg_frac = Fraction(p ** (p * ell) * ell**ell, q**q)
    return Representation(idx, scale, float(arg_frac), float(p * ell), -1.0,
                          tuple(blocks), arg_const_frac=arg_frac,
                          arg_power_int=p * ell)


@lru_cache(maxsize=256)
def build_representation(idx: LevyIndex, *, force_generic: bool = False) -> Representation:
    """Assemble the series form for an index.

    force_generic evaluates a unit-ell index through the generic
    non-integer assembly (its extra block vanishes identically and the
    duplicated gamma factors cancel); used to cross-check the two
    assemblies against each other.

    Raises ConstructionError if any assembled series fails the
    convergence gate -- impossible for a valid index, by the same
    inequality chain that puts alpha in (0, 1).
    """
    if force_generic and idx.branch is Branch.UNIT_ELL:
        rep = _build_non_integer(idx)
    elif idx.branch is Branch.NON_INTEGER_ELL:
        rep = _build_non_integer(idx)
    elif idx.branch is Branch.UNIT_ELL:
        rep = _build_unit(idx)
    else:
        rep = _build_integer(idx)
    try:
        for b in rep.blocks:
            b.series_spec(rep.sign_z)  # gate check with a harmless argument
    except Exception as exc:  # noqa: BLE001 - re-raise with context
        raise ConstructionError(
            f"assembled series for {idx} failed validation: {exc}"
        ) from exc
    return rep


# ---------------------------------------------------------------------------
# evaluation


def _eval_blocks_standard(rep: Representation, x: float,
                          config: SeriesConfig) -> EvalReport:
    u = rep.argument(x)
    z = rep.sign_z * u
    outer = rep.scale / x
    acc = NeumaierSum()
    err = 0.0
    terms = 0
    max_contrib = 0.0
    loss = False
    for b in rep.blocks:
        rpt = (eval_wright if b.kind == "wright" else eval_hyp)(
            b.series_spec(z), config)
        w = b.coeff * u ** float(b.power) * outer
        acc.add(rpt.value * w)
        err += rpt.abs_err_estimate * abs(w)
        terms += rpt.terms_used
        max_contrib = max(max_contrib, rpt.max_term_magnitude * abs(w),
                          abs(rpt.value * w))
        loss = loss or rpt.precision_loss
    value = acc.value
    err += max_contrib * 4.0 * _EPS
    if value == 0.0:
        ratio = 0.0 if max_contrib == 0.0 else math.inf
    else:
        ratio = max_contrib / abs(value)
    loss = loss or ratio > config.cancellation_threshold
    return EvalReport(value, err, terms, max_contrib, ratio, "standard",
                      precision_loss=loss)


def _dec_pow_frac(u: Decimal, fr: Fraction) -> Decimal:
    """u^(num/den) for u > 0 via exp(ln(u) * num / den); keeps the
    full working precision that Decimal ** float-exponent would lose."""
    if fr.denominator == 1:
        return u**fr.numerator
    return (u.ln() * fr.numerator / fr.denominator).exp()


def _eval_blocks_extended(rep: Representation, x: float,
                          config: SeriesConfig) -> EvalReport:
    cfg = as_extended(config)
    with decimal.localcontext(extended.CONTEXT):
        x_d = extended.to_decimal(x)
        u = rep.argument_dec(x_d)
        z_dec = extended.to_decimal(rep.sign_z) * u
        z_f = _to_float(z_dec)
        # float z only seeds spec validation; the Decimal argument is
        # what actually feeds the summation
        z_safe = z_f if math.isfinite(z_f) else rep.sign_z
        outer = rep.scale_dec() / x_d
        total = Decimal(0)
        err = Decimal(0)
        terms = 0
        max_contrib = Decimal(0)
        all_exact = True
        for b in rep.blocks:
            spec = b.series_spec(z_safe)
            pd = b.params_dec()
            if b.kind == "wright":
                v, e, t, mm = _sum_wright_extended(spec, cfg, 0.0,
                                                   z_dec=z_dec, params_dec=pd)
            else:
                v, e, t, mm = _sum_hyp_extended(spec, cfg,
                                                z_dec=z_dec, params_dec=pd)
            w = b.coeff_dec() * _dec_pow_frac(u, b.power) * outer
            total += v * w
            err += e * abs(w)
            terms += t
            max_contrib = max(max_contrib, mm * abs(w), abs(v * w))
            all_exact = all_exact and b.exact
        if all_exact:
            err += max_contrib * Decimal(10) ** (-(extended.DEC_PREC - 6))
        else:
            # float-rounded irrational constants cap what block-level
            # cancellation can recover
            err += max_contrib * Decimal("1e-14")
        return _extended_report(total, err, terms, max_contrib)


def density(idx: LevyIndex, x: float, config: SeriesConfig | None = None,
            *, rel_tol: float | None = None, abs_floor: float = 0.0,
            allow_oracle: bool = True) -> EvalReport:
    """Evaluate the density at x > 0 through its series representation.

    Precision ladder: the standard path is kept when its error estimate
    meets rel_tol (default: the config's rel_tol) relative to the value,
    or the abs_floor absolute target.  Otherwise the whole evaluation is
    redone on the extended path; if even that cannot certify eight
    significant digits (deep left tail, where the series argument
    explodes), the independent quadrature oracle takes over and the
    report is marked precision_path="oracle".

    abs_floor lets integrators state the absolute accuracy they need, so
    points carrying negligible mass do not trigger pointless escalation.

    Raises DomainError for x <= 0 and AccuracyError when no path can
    certify the result.
    """
    try:
        x = float(x)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"density requires a real x > 0, got {x!r}") from exc
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"density requires finite x > 0, got {x!r}")
    config = config or DEFAULT_CONFIG
    rtol = config.rel_tol if rel_tol is None else rel_tol
    rep = build_representation(idx)

    try:
        rpt = _eval_blocks_standard(rep, x, config)
    except (OverflowError, ZeroDivisionError):
        rpt = None
    if rpt is not None and math.isfinite(rpt.value) and rpt.certifies(rtol, abs_floor):
        return _clamped(rpt)

    ext = _eval_blocks_extended(rep, x, config)
    if ext.certifies(max(rtol, 1e-8), abs_floor):
        return _clamped(ext)
    if abs(ext.value) + ext.abs_err_estimate <= abs_floor:
        return _clamped(ext)

    if allow_oracle:
        from .oracle import OracleConfig, density_oracle

        # scale the oracle tolerance off the extended estimate only when
        # that estimate carries at least one meaningful digit
        tol = max(abs_floor, 1e-13)
        if ext.abs_err_estimate <= 0.1 * abs(ext.value):
            tol = max(tol, 1e-9 * abs(ext.value))
        # request a factor under the target so the delivered error
        # estimate lands inside it
        orc = density_oracle(idx.alpha, x, OracleConfig(abs_tol=tol / 4.0))
        ok_rel = (not orc.precision_loss
                  and orc.abs_err_estimate <= 1e-8 * abs(orc.value))
        ok_abs = abs_floor > 0.0 and orc.abs_err_estimate <= abs_floor
        if ok_rel or ok_abs:
            return _clamped(EvalReport(orc.value, orc.abs_err_estimate,
                                       orc.terms_used, orc.max_term_magnitude,
                                       orc.cancellation_ratio, "oracle",
                                       precision_loss=orc.precision_loss))
    raise AccuracyError(
        f"cannot certify 8 significant digits at x={x!r} for {idx} "
        f"(extended estimate {ext.value!r} +/- {ext.abs_err_estimate!r})"
    )


def _clamped(rpt: EvalReport) -> EvalReport:
    """Clamp tiny negative round-off to zero; anything worse is an error."""
    if rpt.value >= 0.0:
        return rpt
    if abs(rpt.value) < rpt.abs_err_estimate:
        return EvalReport(0.0, rpt.abs_err_estimate, rpt.terms_used,
                          rpt.max_term_magnitude, rpt.cancellation_ratio,
                          rpt.precision_path, rpt.precision_loss)
    raise AccuracyError(
        f"negative density {rpt.value!r} beyond error bound {rpt.abs_err_estimate!r}"
    )


def enumerate_representations(alpha_rational: tuple[int, int],
                              max_forms: int) -> list[LevyIndex]:
    """Distinct index tuples whose alpha equals p0/q0 exactly.

    Yields the unit-ell base form first, then the power-tower forms
    (p0^k, q0^k) with exponent 1/k for k = 2, 3, ...: each has
    alpha = p0/q0 exactly, and is an integer-ell form whenever q0/p0 is
    an integer.  Bases are capped at 256 to keep the series block
    counts sane.
    """
    p0, q0 = alpha_rational
    if p0 < 1 or q0 < 1 or p0 >= q0:
        raise DomainError(f"need 0 < p0/q0 < 1, got {p0}/{q0}")
    g = math.gcd(p0, q0)
    p0, q0 = p0 // g, q0 // g
    target = Fraction(p0, q0)
    out: list[LevyIndex] = []
    if max_forms < 1:
        return out
    out.append(resolve_index(p0, q0, 1, 1))
    k = 2
    while len(out) < max_forms and q0**k <= 256:
        idx = resolve_index(p0**k, q0**k, k, 1)
        if idx.alpha_frac != target:  # cannot happen; keep the guarantee hard
            raise ConstructionError(f"enumerated form {idx} drifted off {target}")
        out.append(idx)
        k += 1
    return out
