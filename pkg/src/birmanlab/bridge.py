"""Passage from the discrete inequalities to the continuous ones.

A smooth test function ``phi`` on ``(0, inf)`` is sampled as ``v_n = phi(n/N)``.
Scaled differences ``N^ell nabla^ell v_n`` approach ``phi^(ell)(n/N)`` at rate
``1/N`` uniformly in ``n``, and the discrete Rayleigh quotients of the scaled
samples are Riemann sums of the continuous ones.

Test functions implement :class:`SmoothFunction`: exact derivatives up to a
declared order, a compact support and optional breakpoints for quadrature.
"""
from __future__ import annotations

import math
import warnings
from math import comb, factorial
from typing import NamedTuple, Protocol

import numpy as np
from scipy import integrate

from .records import SweepRecord
from .seq import Seq, check_p, nabla_pow
from .sharpness import CutoffSpec, discrete_report, phi_test, sharp_constant


class SmoothFunction(Protocol):
    order: int
    support: tuple
    breakpoints: tuple

    def __call__(self, x, deriv: int = 0): ...


class PlateauFunction:
    """Near-extremal test function ``x^s xi_N(x)`` with cut-off scale ``N``."""

    def __init__(self, p, ell: int, N: float = 4.0, order: int | None = None,
                 kind: str = "birman", alpha=None):
        self.p, self.ell, self.kind, self.alpha = p, ell, kind, alpha
        self.spec = CutoffSpec(N, order if order is not None else ell + 2)
        self.order = self.spec.order
        self.support = (1 / N, 2.0)
        self.breakpoints = (1 / N, 2 / N, 1.0, 2.0)

    def __call__(self, x, deriv: int = 0):
        _check_deriv(self, deriv)
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros_like(x)
        inside = (x > self.support[0]) & (x < self.support[1])
        if np.any(inside):
            out[inside] = phi_test(x[inside], self.p, self.ell, self.spec, self.kind, self.alpha, deriv)
        return out if out.ndim else float(out)


class PolyBump:
    """``((x-a)(b-x))^m`` on ``(a, b)``, normalized to peak 1; class ``C^(m-1)``.

    Derivatives come from the Leibniz rule on the two factors, which avoids
    the cancellation of the expanded monomial form.
    """

    def __init__(self, a: float, b: float, m: int = 6):
        if not 0 < a < b:
            raise ValueError("bump support must be an interval (a, b) with 0 < a")
        self.a, self.b, self.m = a, b, m
        self.order = m - 1
        self.support = (a, b)
        self.breakpoints = (a, b)
        self._scale = ((b - a) / 2) ** (-2 * m)

    def __call__(self, x, deriv: int = 0):
        _check_deriv(self, deriv)
        x = np.asarray(x, dtype=np.float64)
        inside = (x > self.a) & (x < self.b)
        left = np.where(inside, x - self.a, 0.0)
        right = np.where(inside, self.b - x, 0.0)
        m = self.m
        out = np.zeros_like(x)
        for i in range(deriv + 1):
            k = deriv - i
            out = out + (comb(deriv, i) * _falling(m, i) * _falling(m, k) * (-1) ** k
                         * left ** (m - i) * right ** (m - k))
        out = self._scale * out
        return out if out.ndim else float(out)


def _falling(m: int, i: int) -> float:
    out = 1.0
    for k in range(i):
        out *= m - k
    return out


class Rescaled:
    """``x -> f(scale * x)``; moves the support of ``f`` by a factor ``1/scale``."""

    def __init__(self, f: SmoothFunction, scale: float):
        self.f, self.scale = f, scale
        self.order = f.order
        self.support = tuple(s / scale for s in f.support)
        self.breakpoints = tuple(s / scale for s in f.breakpoints)

    def __call__(self, x, deriv: int = 0):
        return self.scale ** deriv * self.f(self.scale * np.asarray(x, dtype=np.float64), deriv)


def _check_deriv(f, deriv: int) -> None:
    if deriv > f.order:
        raise ValueError(f"derivative of order {deriv} not available (function is C^{f.order})")


def sample(phi: SmoothFunction, N: int) -> Seq:
    """``n -> phi(n / N)`` on the indices inside the support of ``phi``."""
    a, b = phi.support
    if a <= 0:
        raise ValueError("test function support must stay away from 0")
    lo, hi = max(int(math.floor(a * N)), 0), int(math.ceil(b * N))
    n = np.arange(lo, hi + 1)
    return Seq(lo, phi(n / N))


def binomial_identity_check(ell: int, j: int) -> int:
    """``|sum_k (-1)^k C(ell,k) k^j - target|`` in exact integers.

    ``target`` is 0 for ``j < ell`` and ``(-1)^ell ell!`` for ``j = ell``.
    """
    if not 0 <= j <= ell:
        raise ValueError("need 0 <= j <= ell")
    total = sum((-1) ** k * comb(ell, k) * k ** j for k in range(ell + 1))
    target = (-1) ** ell * factorial(ell) if j == ell else 0
    return abs(total - target)


class BridgeReport(NamedTuple):
    N: int
    max_abs_error: float
    argmax_n: int
    slope_fit: float = math.nan


def loglog_slope(Ns, errors) -> float:
    return float(np.polyfit(np.log(np.asarray(Ns, dtype=np.float64)),
                            np.log(np.asarray(errors, dtype=np.float64)), 1)[0])


def lemma_point(phi: SmoothFunction, ell: int, N: int) -> BridgeReport:
    """Sup over ``n >= ell`` of ``|N^ell nabla^ell v_n - phi^(ell)(n/N)|``."""
    if phi.order < ell + 1:
        raise ValueError(f"function is C^{phi.order}; the comparison needs C^{ell + 1}")
    d = nabla_pow(sample(phi, N), ell)
    n = np.arange(ell, d.end + 1)
    err = np.abs(N ** ell * d.window(ell, d.end + 1) - phi(n / N, ell))
    k = int(np.argmax(err))
    return BridgeReport(N, float(err[k]), int(n[k]))


def lemma_convergence(phi: SmoothFunction, ell: int, grid, executor=None):
    """Errors of the scaled differences along ``grid`` and their log-log slope."""
    grid = [int(N) for N in grid]
    if grid != sorted(grid):
        raise ValueError("grid must be ascending")
    mapper = executor.map if executor is not None else map
    reps = list(mapper(lambda N: lemma_point(phi, ell, N), grid))
    slope = loglog_slope(grid, [r.max_abs_error for r in reps])
    return [r._replace(slope_fit=slope) for r in reps], slope


def _quad_pieces(f, pts):
    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for a, b in zip(pts[:-1], pts[1:]):
            total += integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
    return total


def continuous_ratio(phi: SmoothFunction, p, ell: int, kind: str = "birman", alpha=None):
    """(numerator, denominator) of the continuous Rayleigh quotient of ``phi``."""
    a, b = phi.support
    pts = sorted(set(np.linspace(a, b, 9)) | set(phi.breakpoints))
    pts = [t for t in pts if a <= t <= b]
    if kind == "birman":
        num = _quad_pieces(lambda x: abs(phi(x, ell)) ** p, pts)
        den = _quad_pieces(lambda x: abs(phi(x)) ** p * x ** (-ell * p), pts)
    else:
        num = _quad_pieces(lambda x: x ** alpha * abs(phi(x, 1)) ** p, pts)
        den = _quad_pieces(lambda x: x ** (alpha - p) * abs(phi(x)) ** p, pts)
    return num, den


def scaled_sample(phi: SmoothFunction, p, ell: int, N: int, kind: str = "birman", alpha=None) -> Seq:
    """``N^(ell-1/p) v`` (Birman) or ``N^(1-(alpha+1)/p) v`` (Copson)."""
    s = ell - 1 / p if kind == "birman" else 1 - (alpha + 1) / p
    return N ** s * sample(phi, N)


def riemann_point(phi: SmoothFunction, p, ell: int, N: int, kind: str = "birman", alpha=None) -> SweepRecord:
    """``value`` is the discrete quotient, ``bound`` the continuous one, ``gap`` their distance."""
    check_p(p)
    if kind == "copson":
        ell = 1
    if phi.support[1] > 1:
        raise ValueError("Riemann bridge needs phi supported in (0, 1)")
    u = scaled_sample(phi, p, ell, N, kind, alpha)
    rep = discrete_report(u, p, ell, kind, alpha)
    num, den = continuous_ratio(phi, p, ell, kind, alpha)
    cont = num / den
    return SweepRecord(N, rep.ratio, cont, abs(rep.ratio - cont), 0, float(rep.lhs), float(rep.rhs))


def riemann_bridge(phi: SmoothFunction, p, ell: int, grid, kind: str = "birman", alpha=None,
                   executor=None) -> list:
    grid = [int(N) for N in grid]
    if grid != sorted(grid):
        raise ValueError("grid must be ascending")
    mapper = executor.map if executor is not None else map
    return list(mapper(lambda N: riemann_point(phi, p, ell, N, kind, alpha), grid))


def bridge_constant(p, ell: int, kind: str = "birman", alpha=None) -> float:
    return sharp_constant(p, 1 if kind == "copson" else ell, kind, alpha)
