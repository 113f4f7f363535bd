"""Near-extremal test functions and sweeps showing the constants are sharp.

The test functions are ``x^s xi_N(x)`` with ``s = ell - 1/p`` (Birman) or
``s = 1 - (alpha+1)/p`` (Copson), where the cut-off ``xi_N`` equals 1 on
``[2/N, 1]`` and vanishes off ``[1/N, 2]``.  On the plateau both integrands of
the Rayleigh quotient are multiples of ``1/x``, so with ``L = log(N/2)`` the
quotient equals ``(B L + a) / (L + b)`` for N-independent ``a, b``.

The smooth step is the polynomial of degree ``2m+1`` whose derivatives
through order ``m`` vanish at 0 and 1; all derivatives are exact.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

from .constants import birman_constant, copson_constant
from .inequalities import (RatioReport, SupportError, birman_report,
                           copson_report, weighted_hardy_report)
from .records import SweepRecord
from .seq import Seq, check_p

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-10


@lru_cache(maxsize=None)
def _step_poly(order: int, deriv: int) -> Polynomial:
    t = Polynomial([0.0, 1.0])
    base = sum((comb(order + k, k) * (1 - t) ** k for k in range(order + 1)), Polynomial([0.0]))
    return (t ** (order + 1) * base).deriv(deriv) if deriv else t ** (order + 1) * base


def smoothstep(x, order: int = 3, deriv: int = 0):
    """C^order step: 0 for ``x <= 0``, 1 for ``x >= 1``, polynomial in between."""
    if order < 1:
        raise ValueError("smoothstep order must be >= 1")
    x = np.asarray(x, dtype=np.float64)
    inner = _step_poly(order, deriv)(np.clip(x, 0.0, 1.0))
    right = 1.0 if deriv == 0 else 0.0
    out = np.where(x <= 0, 0.0, np.where(x >= 1, right, inner))
    return out if out.ndim else float(out)


@lru_cache(maxsize=None)
def smoothstep_sup(order: int, deriv: int) -> float:
    """``max |eta^(deriv)|`` over ``[0, 1]`` from the critical points."""
    P = _step_poly(order, deriv)
    pts = [0.0, 1.0]
    crit = P.deriv().roots() if P.degree() > 0 else []
    pts += [float(r.real) for r in np.atleast_1d(crit) if abs(r.imag) < 1e-12 and 0 <= r.real <= 1]
    return float(max(abs(P(t)) for t in pts))


@dataclass(frozen=True)
class CutoffSpec:
    N: float
    order: int = 3

    def __post_init__(self):
        if not self.N > 2:
            raise ValueError("cut-off scale N must exceed 2")
        if self.order < 1:
            raise ValueError("cut-off order must be >= 1")

    @property
    def bound_constant(self) -> float:
        """C with ``|xi^(j)| <= C N^j`` on ``[1/N, 2/N]`` and ``<= C`` on ``[1, 2]``, ``j <= order``."""
        return max(smoothstep_sup(self.order, j) for j in range(self.order + 1))


def cutoff_xi(x, spec: CutoffSpec, deriv: int = 0):
    """``eta(N x - 1) eta(2 - x)`` and its derivatives (Leibniz rule)."""
    if deriv > spec.order:
        raise ValueError(f"derivative order {deriv} exceeds cut-off smoothness {spec.order}")
    x = np.asarray(x, dtype=np.float64)
    N, m = spec.N, spec.order
    out = np.zeros_like(x)
    for i in range(deriv + 1):
        left = N ** i * smoothstep(N * x - 1, m, i)
        right = (-1) ** (deriv - i) * smoothstep(2 - x, m, deriv - i)
        out = out + comb(deriv, i) * left * right
    return out if out.ndim else float(out)


def extremal_exponent(p, ell: int, kind: str, alpha=None) -> float:
    if kind == "birman":
        return ell - 1 / p
    if kind == "copson":
        return 1 - (alpha + 1) / p
    raise ValueError(f"unknown test-function kind {kind!r}")


def _falling(s: float, i: int) -> float:
    out = 1.0
    for k in range(i):
        out *= s - k
    return out


def phi_test(x, p, ell: int, spec: CutoffSpec, kind: str = "birman", alpha=None, deriv: int = 0):
    """``x^s xi_N(x)`` and its derivatives, exact up to rounding (``x > 0``)."""
    s = extremal_exponent(p, ell, kind, alpha)
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0):
        raise ValueError("test functions live on x > 0")
    out = np.zeros_like(x)
    for i in range(deriv + 1):
        out = out + comb(deriv, i) * _falling(s, i) * x ** (s - i) * cutoff_xi(x, spec, deriv - i)
    return out if out.ndim else float(out)


# continuous Rayleigh quotients ------------------------------------------------

def _quad_log(f, a: float, b: float):
    """``int_a^b f(x) dx`` after ``x = e^t``; returns (value, error, clean)."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        val, err = integrate.quad(lambda t: f(math.exp(t)) * math.exp(t), math.log(a), math.log(b),
                                  epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=400)
    return val, err, not caught


def sharp_constant(p, ell: int, kind: str, alpha=None) -> float:
    if kind == "birman":
        return birman_constant(p, ell)
    return copson_constant(p, alpha)


def continuous_rayleigh(p, ell: int, spec: CutoffSpec, kind: str = "birman", alpha=None) -> RatioReport:
    """Rayleigh quotient of the test function by adaptive quadrature.

    Birman: ``int |phi^(ell)|^p / int |phi|^p x^(-ell p)``.
    Copson: ``int x^alpha |phi'|^p / int x^(alpha-p) |phi|^p`` (``ell`` is 1).
    The integrals are split at ``1/N, 2/N, 1, 2``; per-piece values land in
    ``extra`` (``num_plateau`` / ``den_plateau`` cover ``[2/N, 1]``).
    """
    check_p(p)
    if kind == "copson":
        if alpha is None or not alpha < p - 1:
            raise ValueError("copson test functions need alpha < p-1")
        ell = 1
    if spec.order < ell + 1:
        raise ValueError(f"cut-off order {spec.order} too low for ell={ell}; need >= ell+1")
    if kind == "birman":
        def num(x):
            return abs(phi_test(x, p, ell, spec, kind, alpha, ell)) ** p

        def den(x):
            return abs(phi_test(x, p, ell, spec, kind, alpha)) ** p * x ** (-ell * p)
    else:
        def num(x):
            return x ** alpha * abs(phi_test(x, p, 1, spec, kind, alpha, 1)) ** p

        def den(x):
            return x ** (alpha - p) * abs(phi_test(x, p, 1, spec, kind, alpha)) ** p

    N = spec.N
    pieces = {"left": (1 / N, 2 / N), "plateau": (2 / N, 1.0), "right": (1.0, 2.0)}
    extra, flags = {}, []
    total_num = total_den = err_tot = 0.0
    for name, (a, b) in pieces.items():
        vn, en, ok_n = _quad_log(num, a, b)
        vd, ed, ok_d = _quad_log(den, a, b)
        extra[f"num_{name}"], extra[f"den_{name}"] = vn, vd
        total_num += vn
        total_den += vd
        err_tot += en + ed
        if not (ok_n and ok_d):
            flags.append(f"quadrature_unconverged:{name}")
    extra["quad_error"] = err_tot
    return RatioReport(total_num, total_den, sharp_constant(p, ell, kind, alpha), flags, extra)


# discrete near-extremizers -------------------------------------------------

def discrete_extremal(p, ell: int, N: int, kind: str = "birman", alpha=None,
                      mesh: float | None = None, order: int | None = None) -> Seq:
    """``n -> M^s phi_N(n / M)`` with mesh ``M`` (default ``N``) and ``s`` the test exponent."""
    if kind == "copson":
        ell = 1
    spec = CutoffSpec(N, order if order is not None else ell + 2)
    M = N if mesh is None else mesh
    s = extremal_exponent(p, ell, kind, alpha)
    n = np.arange(1, int(math.ceil(2 * M)) + 1, dtype=np.float64)
    vals = M ** s * phi_test(n / M, p, ell, spec, kind, alpha)
    u = Seq(1, vals)
    if not u.is_zero and u.offset < ell:
        raise SupportError(f"sample is nonzero at n={u.offset} < ell={ell}; increase N or the mesh")
    return u


def discrete_report(u: Seq, p, ell: int, kind: str = "birman", alpha=None) -> RatioReport:
    if kind == "birman":
        return birman_report(u, p, ell)
    if alpha < 0:
        return weighted_hardy_report(u, p, alpha)
    return copson_report(u, p, alpha)


# sweeps and fits -------------------------------------------------------------

@dataclass
class SharpnessResult:
    records: list
    bound: float
    B_fit: float
    c_fit: float
    residual: float
    A0: float
    A1: float
    flags: list = field(default_factory=list)
    b_fit: float = 0.0
    B_plain: float = math.nan
    residual_plain: float = math.nan

    def upper(self, N: float, p: float) -> float:
        """Upper end of the sandwich ``(B^(1/p) (A0+L)^(1/p) + A1)^p / L``, ``L = log(N/2)``."""
        L = math.log(N / 2)
        return (self.bound ** (1 / p) * (self.A0 + L) ** (1 / p) + self.A1) ** p / L

    def fit_json(self) -> dict:
        return {"B_fit": self.B_fit, "c_fit": self.c_fit, "b_fit": self.b_fit,
                "residual": self.residual, "B_plain": self.B_plain,
                "residual_plain": self.residual_plain, "A0": self.A0, "A1": self.A1,
                "bound": self.bound, "flags": list(self.flags)}


def fit_inverse_log(Ns, values, shifted: bool = True):
    """Least squares ``value ~ B + c / (log(N/2) + b)``; returns (B, c, b, rms residual).

    The transition pieces of the cut-off add N-independent constants to both
    integrals, so the quotient is exactly ``(B L + a) / (L + b)``; ``b`` is
    that denominator offset.  Multiplying through gives the linear problem
    ``value L = B L + k - b value`` with ``k = B b + c``.  ``shifted=False``
    pins ``b = 0`` (plain ``B + c/L``).
    """
    L = np.log(np.asarray(Ns, dtype=np.float64) / 2)
    y = np.asarray(values, dtype=np.float64)
    if shifted:
        X = np.column_stack([L, np.ones_like(L), -y])
        (B, k, b), *_ = np.linalg.lstsq(X, y * L, rcond=None)
        c = k - B * b
    else:
        X = np.column_stack([np.ones_like(L), 1 / L])
        (B, c), *_ = np.linalg.lstsq(X, y, rcond=None)
        b = 0.0
    resid = y - (B + c / (L + b))
    return float(B), float(c), float(b), float(np.sqrt(np.mean(resid ** 2)))


def fit_sandwich(Ns, numerators, bound: float, p: float):
    """Constants ``A0, A1`` of ``num^(1/p) <= B^(1/p) (A0 + L)^(1/p) + A1``.

    ``A0`` is the largest excess ``num/B - L``; ``A1`` then only absorbs
    rounding and stays 0 unless a point still sticks out.
    """
    L = np.log(np.asarray(Ns, dtype=np.float64) / 2)
    num = np.asarray(numerators, dtype=np.float64)
    A0 = float(np.max(num / bound - L))
    excess = num ** (1 / p) - bound ** (1 / p) * (A0 + L) ** (1 / p)
    return A0, float(max(0.0, np.max(excess)))


def sharpness_point(p, ell: int, N: float, kind: str = "birman", alpha=None,
                    mode: str = "continuous", order: int | None = None) -> SweepRecord:
    if kind == "copson":
        ell = 1
    if mode == "continuous":
        rep = continuous_rayleigh(p, ell, CutoffSpec(N, order or ell + 2), kind, alpha)
    elif mode == "discrete":
        u = discrete_extremal(p, ell, int(round(N)), kind, alpha, order=order)
        rep = discrete_report(u, p, ell, kind, alpha)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return SweepRecord(N, rep.ratio, rep.constant, rep.ratio - rep.constant, 0,
                       float(rep.lhs), float(rep.rhs))


def sharpness_sweep(p, ell: int, grid, kind: str = "birman", alpha=None,
                    mode: str = "continuous", order: int | None = None,
                    executor=None) -> SharpnessResult:
    """Rayleigh quotients along ``grid`` with the ``B + c/log(N/2)`` fit and sandwich constants."""
    grid = [float(N) for N in grid]
    if grid != sorted(grid):
        raise ValueError("grid must be ascending")
    if kind == "copson":
        ell = 1
    mapper = executor.map if executor is not None else map
    records = list(mapper(lambda N: sharpness_point(p, ell, N, kind, alpha, mode, order), grid))
    bound = sharp_constant(p, ell, kind, alpha)
    flags = []
    if len(grid) < 4 or math.log(grid[-1] / grid[0]) < math.log(100):
        flags.append("fit_degenerate")
    Ns, vals = [r.N for r in records], [r.value for r in records]
    B_fit, c_fit, b_fit, resid = fit_inverse_log(Ns, vals)
    B_plain, c_plain, _, resid_plain = fit_inverse_log(Ns, vals, shifted=False)
    A0, A1 = fit_sandwich(Ns, [r.numerator for r in records], bound, p)
    return SharpnessResult(records, bound, B_fit, c_fit, resid, A0, A1, flags,
                           b_fit, B_plain, resid_plain)
