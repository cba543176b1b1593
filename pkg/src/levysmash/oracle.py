"""Ground-truth evaluation of the density with Laplace transform
exp(-s^alpha), by two quadratures that share no code with the series
engine:

* bromwich_real -- the inversion contour wrapped onto the negative real
  axis: f(x) = (1/pi) * int_0^inf exp(-x r - r^alpha cos(pi alpha))
  * sin(r^alpha sin(pi alpha)) dr, integrated panel by panel between
  consecutive zeros of the sine factor;
* mellin_line -- the vertical-line integral of the gamma-ratio
  transform, f(x) = (x^(alpha c - 1)/pi) * int_0^inf
  Re[Gamma(c+it) / Gamma(alpha c + i alpha t) x^(i alpha t)] dt with
  c = 1/alpha - 1/2, truncated where the Stirling decay
  exp(-pi (1-alpha) t / 2) kills the integrand.

A value is certified only when both methods agree.  For alpha > 1/2 at
small x the real-axis integrand grows like exp(|cos(pi alpha)| r^alpha)
before the exp(-x r) factor wins; once that envelope tops ~e^22 the
cancellation exceeds binary64 and bromwich_real is skipped, the line
integral's value is returned, and the report carries precision_loss to
mark it uncertified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import loggamma

from .errors import DivergentMoment, DomainError, OracleDisagreement, QuadratureFailure
from .gammakit import cospi, sinpi
from .series import EvalReport

__all__ = [
    "OracleConfig",
    "density_oracle",
    "moment_oracle",
    "tail_mass",
]

_BROMWICH_FEASIBLE_LOG = 22.0  # max tolerable log of the oscillation envelope


@dataclass(frozen=True)
class OracleConfig:
    method: str = "bromwich_real"  # which method's value gets reported
    abs_tol: float = 1e-11
    max_nodes: int = 4000

    def __post_init__(self) -> None:
        if self.method not in ("bromwich_real", "mellin_line"):
            raise DomainError(f"unknown oracle method {self.method!r}")
        if self.abs_tol <= 0.0:
            raise DomainError("abs_tol must be positive")
        if self.max_nodes < 16:
            raise DomainError("max_nodes too small to integrate anything")


def _bromwich_envelope_peak(alpha: float, x: float) -> float:
    """Max over r of (-x r - cos(pi alpha) r^alpha); 0 when the cosine
    term only decays."""
    ca = cospi(alpha)
    if ca >= 0.0:
        return 0.0
    rm = (alpha * (-ca) / x) ** (1.0 / (1.0 - alpha))
    return -x * rm - ca * rm**alpha


def _bromwich_real(alpha: float, x: float, abs_tol: float,
                   max_nodes: int) -> tuple[float, float, int] | None:
    """(value, err, evals), or None when cancellation is infeasible."""
    sa, ca = sinpi(alpha), cospi(alpha)
    peak = _bromwich_envelope_peak(alpha, x)
    if peak > _BROMWICH_FEASIBLE_LOG:
        return None

    def f(r: float) -> float:
        ra = r**alpha
        return math.exp(-x * r - ra * ca) * math.sin(ra * sa)

    # truncation point: envelope below abs_tol/50
    lt = math.log(min(abs_tol, 1e-2)) - math.log(50.0)
    r_max = max(1.0, -lt / x)
    for _ in range(60):
        r_new = max(1.0, (-lt + max(0.0, -ca) * r_max**alpha) / x)
        if abs(r_new - r_max) < 1e-9 * r_max:
            break
        r_max = r_new

    pts = [0.0]
    k = 1
    while True:
        r_k = (k * math.pi / sa) ** (1.0 / alpha)
        if r_k >= r_max or k > max_nodes // 8:
            break
        pts.append(r_k)
        k += 1
    pts.append(r_max)

    total = 0.0
    err = 0.0
    evals = 0
    trouble = False
    per_panel = abs_tol / (10.0 * len(pts))
    for a, b in zip(pts[:-1], pts[1:]):
        res = quad(f, a, b, epsabs=per_panel, epsrel=1e-13, limit=200,
                   full_output=1)
        total += res[0]
        err += res[1]
        evals += res[2].get("neval", 0)
        if len(res) > 3:
            trouble = True
    # residual rounding from the oscillation envelope
    err += math.exp(peak) * 1e-15 * len(pts)
    if trouble and err > 10.0 * abs_tol:
        raise QuadratureFailure(
            f"bromwich_real did not converge at alpha={alpha!r}, x={x!r}"
        )
    return total / math.pi, err / math.pi, evals


def _mellin_line(alpha: float, x: float, abs_tol: float,
                 max_nodes: int) -> tuple[float, float, int]:
    c = 1.0 / alpha - 0.5
    pre = x ** (alpha * c - 1.0) / math.pi
    lg_c = loggamma(complex(c, 0.0))
    ln_x = math.log(x)

    def h(t: float) -> float:
        g = loggamma(complex(c, t)) - loggamma(complex(alpha * c, alpha * t))
        return float(np.exp(g + 1j * alpha * t * ln_x).real)

    decay = 0.5 * math.pi * (1.0 - alpha)
    # head magnitude sets the scale the tail must drop below
    head = abs(math.exp(lg_c.real - math.lgamma(alpha * c)))
    target = abs_tol / (50.0 * max(pre, 1e-300))
    T = max(8.0, (-math.log(target / max(head, 1e-300))) / decay)
    for _ in range(40):
        T_new = (math.log(max(head, 1e-300)) - math.log(target)
                 + (1.0 - alpha) * c * math.log(1.0 + T)) / decay
        T_new = max(8.0, T_new)
        if abs(T_new - T) < 1e-6 * T:
            break
        T = T_new

    total = 0.0
    err = 0.0
    evals = 0
    trouble = False
    for a, b in ((0.0, T / 8.0), (T / 8.0, T)):
        res = quad(h, a, b, epsabs=abs_tol / (10.0 * max(pre, 1e-300)),
                   epsrel=1e-13, limit=max_nodes // 8, full_output=1)
        total += res[0]
        err += res[1]
        evals += res[2].get("neval", 0)
        if len(res) > 3:
            trouble = True
    if trouble and err * pre > 10.0 * abs_tol:
        raise QuadratureFailure(
            f"mellin_line did not converge at alpha={alpha!r}, x={x!r}"
        )
    return pre * total, pre * err + abs(pre * total) * 1e-14, evals


def density_oracle(alpha: float, x: float,
                   cfg: OracleConfig | None = None) -> EvalReport:
    """Dual-quadrature evaluation of the density at x.

    Both methods run and must agree within 3 * abs_tol, else
    OracleDisagreement.  When the real-axis method is infeasible (see
    module docstring) the line-integral value is returned alone with
    precision_loss=True: callers needing certification must treat such
    reports as best-effort.
    """
    cfg = cfg or OracleConfig()
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"oracle covers 0 < alpha < 1, got {alpha!r}")
    if not (math.isfinite(x) and x > 0.0):
        raise DomainError(f"oracle requires finite x > 0, got {x!r}")

    m_val, m_err, m_evals = _mellin_line(alpha, x, cfg.abs_tol, cfg.max_nodes)
    bres = _bromwich_real(alpha, x, cfg.abs_tol, cfg.max_nodes)
    peak = math.exp(_bromwich_envelope_peak(alpha, x))

    if bres is None:
        value = m_val
        err = max(m_err, cfg.abs_tol)
        ratio = math.inf if value == 0.0 else max(1.0, peak / abs(value))
        return EvalReport(value, err, m_evals, peak, ratio, "oracle",
                          precision_loss=True)

    b_val, b_err, b_evals = bres
    dev = abs(b_val - m_val)
    if dev > 3.0 * cfg.abs_tol + b_err + m_err:
        raise OracleDisagreement(
            f"methods disagree at alpha={alpha!r}, x={x!r}: "
            f"bromwich_real={b_val!r} +/- {b_err!r}, "
            f"mellin_line={m_val!r} +/- {m_err!r}"
        )
    if cfg.method == "bromwich_real":
        value, err = b_val, max(b_err, dev)
    else:
        value, err = m_val, max(m_err, dev)
    ratio = math.inf if value == 0.0 else max(1.0, peak / abs(value))
    return EvalReport(value, err, m_evals + b_evals, peak, ratio, "oracle")


def moment_oracle(alpha: float, nu: float) -> float:
    """Fractional moment int x^nu f(x) dx = Gamma(1 - nu/alpha) /
    Gamma(1 - nu), finite exactly when 0 <= nu < alpha.

    The closed form is read off the gamma-ratio structure of the
    density's line-integral transform; the test suite re-derives it by
    direct quadrature before trusting it.  Raises DivergentMoment for
    nu >= alpha.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"moment oracle covers 0 < alpha < 1, got {alpha!r}")
    if nu < 0.0:
        raise DomainError(f"moment order must be >= 0, got {nu!r}")
    if nu >= alpha:
        raise DivergentMoment(
            f"moment of order nu={nu!r} diverges for alpha={alpha!r} "
            f"(finite only for nu < alpha)"
        )
    if nu == 0.0:
        return 1.0
    return math.exp(math.lgamma(1.0 - nu / alpha) - math.lgamma(1.0 - nu))


def tail_mass(alpha: float, x_from: float, tol: float = 1e-13) -> float:
    """int_{x_from}^inf f(x) dx via the convergent power-tail series
    (1/pi) sum_{k>=1} (-1)^(k+1) Gamma(alpha k) sin(k pi alpha) / k!
    * x_from^(-alpha k).

    Comes from summing the transform's right-half-plane residues; for
    alpha = 1/2 it reduces to erf(1/(2 sqrt(x_from))), which the tests
    pin.  Accurate once x_from^alpha is a few, i.e. x_from >~ 2.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"tail series covers 0 < alpha < 1, got {alpha!r}")
    if x_from <= 0.0:
        raise DomainError(f"need x_from > 0, got {x_from!r}")
    w = x_from ** (-alpha)
    total = 0.0
    for k in range(1, 500):
        s = sinpi(k * alpha)
        if s != 0.0:
            term = math.exp(math.lgamma(alpha * k) - math.lgamma(k + 1.0)
                            + k * math.log(w)) * s
            if k % 2 == 0:
                term = -term
            total += term
            if k > 2 and abs(term) < tol * max(abs(total), 1e-300):
                return total / math.pi
        elif k > 2 and math.exp(math.lgamma(alpha * k) - math.lgamma(k + 1.0)
                                + k * math.log(w)) < tol * max(abs(total), 1e-300):
            return total / math.pi
    raise QuadratureFailure(
        f"tail series did not settle for alpha={alpha!r}, x_from={x_from!r}"
    )
