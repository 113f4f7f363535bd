"""Evaluators for the Hardy, Copson, weighted Hardy and Birman inequalities.

Every evaluator returns a :class:`RatioReport` with both sides of the
inequality, the sharp constant and the margin ``lhs - constant * rhs``.
A margin below ``-tol`` (``tol = 1e-12 * lhs``, or ``1e-24 * lhs`` for
extended-precision input) means the inequality failed, which can only be a bug.
"""
from __future__ import annotations

import math
from math import comb
from dataclasses import dataclass, field

import mpmath
import numpy as np
from numpy.polynomial import polynomial as P
from scipy import special

from . import hardy_op
from .constants import birman_constant, copson_constant
from .seq import Seq, check_p, nabla, nabla_pow, power_sum
from .weights import WeightTable

TOL_DOUBLE = 1e-12
TOL_EXTENDED = 1e-24


class PreconditionError(ValueError):
    """Input sequence or weights violate a hypothesis of the inequality."""


class SupportError(PreconditionError):
    pass


class NegativeWeightError(PreconditionError):
    pass


class MonotonicityError(PreconditionError):
    pass


@dataclass
class RatioReport:
    lhs: float
    rhs: float
    constant: float
    flags: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    extended: bool = False

    @property
    def ratio(self) -> float:
        if self.rhs == 0:
            return math.inf if self.lhs > 0 else math.nan
        return float(self.lhs / self.rhs)

    @property
    def margin(self):
        return self.lhs - self.constant * self.rhs

    @property
    def tol(self):
        return (TOL_EXTENDED if self.extended else TOL_DOUBLE) * abs(self.lhs)

    @property
    def holds(self) -> bool:
        return self.margin >= -self.tol

    @property
    def degenerate(self) -> bool:
        return "degenerate" in self.flags

    def to_dict(self) -> dict:
        out = {
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "ratio": _json_float(self.ratio),
            "constant": float(self.constant),
            "margin": float(self.margin),
            "flags": list(self.flags),
        }
        out.update({k: float(v) for k, v in self.extra.items()})
        return out


def _json_float(x):
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf"
    return float(x)


def _report(lhs, rhs, constant, extended, flags=None, extra=None) -> RatioReport:
    flags = list(flags or [])
    if lhs == 0 and rhs == 0:
        flags.append("degenerate")
    return RatioReport(lhs, rhs, constant, flags, dict(extra or {}), extended)


def _prep(u: Seq, p):
    check_p(p)
    if u.is_extended:
        p = mpmath.mpf(p)
    return p


def _index_weights(start: int, stop: int, exponent, extended: bool, add: int = 0):
    n = np.arange(start + add, stop + add)
    if extended:
        return np.array([mpmath.mpf(int(k)) ** exponent for k in n], dtype=object)
    return n.astype(np.float64) ** exponent


def _power_sum_from(u: Seq, p, exponent, start: int, add: int = 0):
    """``sum_{n >= start} (n + add)^exponent |u_n|^p``."""
    lo = max(start, u.offset)
    if u.is_zero or lo >= u.end:
        return 0.0
    vals = u.values[lo - u.offset:]
    if exponent == 0:
        return power_sum(vals, p)
    return power_sum(vals, p, _index_weights(lo, u.end, exponent, u.is_extended, add))


def _require_zero_below(u: Seq, start: int, name: str) -> None:
    if not u.is_zero and u.offset < start:
        bad = next(n for n in range(u.offset, start) if u.entry(n) != 0)
        raise SupportError(f"{name} needs u_n = 0 for n < {start}; u_{bad} = {u.entry(bad)}")


# pointwise ingredients ------------------------------------------------------

def pointwise_lemma_check(z, t, p):
    """``|z - t|^p - (1-t)^(p-1) (|z|^p - t)``; nonnegative for ``t`` in ``[0, 1]``.

    Broadcasts over array arguments.
    """
    check_p(p)
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0) or np.any(t > 1):
        raise ValueError("t must lie in [0, 1]")
    z = np.asarray(z)
    out = np.abs(z - t) ** p - (1 - t) ** (p - 1) * (np.abs(z) ** p - t)
    return out if out.ndim else float(out)


def ground_state_step_check(u: Seq, g: WeightTable, p, n: int):
    """Margin of the one-step ground-state inequality at index ``n >= 1``.

    ``|u_n - u_{n-1}|^p - (|u_n|^p/g_n^(p-1) - |u_{n-1}|^p/g_{n-1}^(p-1)) (g_n - g_{n-1})^(p-1)``
    with ``|u_0|^p / g_0^(p-1)`` read as 0.
    """
    check_p(p)
    if n < 1:
        raise ValueError("step index must be >= 1")
    gv = g.slice(0, n + 1)
    if gv[0] != 0 or np.any(np.diff(gv) < 0) or np.any(gv[1:] <= 0):
        raise MonotonicityError("ground state must satisfy g_0 = 0 < g_1 <= g_2 <= ...")
    if u.entry(0) != 0:
        raise SupportError("ground state step needs u_0 = 0")
    un, um = u.entry(n), u.entry(n - 1)
    gn, gm = gv[n], gv[n - 1]
    prev = 0.0 if n == 1 else abs(um) ** p / gm ** (p - 1)
    return abs(un - um) ** p - (abs(un) ** p / gn ** (p - 1) - prev) * (gn - gm) ** (p - 1)


def abstract_hardy_report(u: Seq, V: WeightTable, g: WeightTable, p) -> RatioReport:
    """``sum V_n |nabla u_n|^p >= -sum div(V (nabla g)^(p-1))_n / g_n^(p-1) |u_n|^p``.

    The right side is reported with constant 1, so ``margin = lhs - rhs``.
    """
    p = _prep(u, p)
    if u.entry(0) != 0:
        raise SupportError("abstract Hardy inequality needs u_0 = 0")
    _require_zero_below(u, 0, "abstract Hardy inequality")
    if u.is_zero:
        return _report(0.0, 0.0, 1.0, u.is_extended)
    stop = u.end + 1
    Vv = V.slice(1, stop + 1)
    gv = g.slice(0, stop + 1)
    if np.any(Vv < 0):
        raise NegativeWeightError("weights V_n must be nonnegative")
    if gv[0] != 0:
        raise MonotonicityError("ground state must vanish at n = 0")
    if np.any(gv[1:] <= 0) or np.any(np.diff(gv[1:]) < 0):
        raise MonotonicityError("ground state must be positive and nondecreasing for n >= 1")
    du = nabla(u)
    lhs = power_sum(du.values, p, V.slice(du.offset, du.end))
    # flux_n = V_n (g_n - g_{n-1})^(p-1) on n = 1..stop
    flux = Vv * np.diff(gv) ** (p - 1)
    rho = (flux[:-1] - flux[1:]) / gv[1:stop] ** (p - 1)  # n = 1..stop-1
    lo = max(u.offset, 1)
    rhs = power_sum(u.values[lo - u.offset:], p, rho[lo - 1:u.end - 1])
    return _report(lhs, rhs, 1.0, u.is_extended)


# concrete inequalities ------------------------------------------------------

def hardy_report(u: Seq, p) -> RatioReport:
    """Discrete p-Hardy inequality with constant ``((p-1)/p)^p``."""
    p = _prep(u, p)
    if u.entry(0) != 0:
        raise SupportError(f"Hardy inequality needs u_0 = 0, got u_0 = {u.entry(0)}")
    lhs = _power_sum_from(nabla(u), p, 0, 1)
    rhs = _power_sum_from(u, p, -p, 1)
    return _report(lhs, rhs, birman_constant(p, 1), u.is_extended)


def weighted_hardy_report(u: Seq, p, alpha) -> RatioReport:
    """``sum n^alpha |nabla u_n|^p >= C_p(alpha) sum (n+1)^(alpha-p) |u_n|^p`` for ``alpha < 0``.

    Inputs with ``u_1 != 0`` are accepted but flagged ``u1_nonzero``: the
    statement only asks for ``u_0 = 0`` while its proof also uses ``u_1 = 0``.
    """
    p = _prep(u, p)
    if not alpha < 0:
        raise ValueError(f"weighted Hardy inequality needs alpha < 0 (use copson_report), got {alpha}")
    if u.entry(0) != 0:
        raise SupportError(f"weighted Hardy inequality needs u_0 = 0, got u_0 = {u.entry(0)}")
    flags = ["u1_nonzero"] if u.entry(1) != 0 else []
    lhs = _power_sum_from(nabla(u), p, alpha, 1)
    rhs = _power_sum_from(u, p, alpha - p, 1, add=1)
    return _report(lhs, rhs, copson_constant(p, alpha), u.is_extended, flags)


def copson_report(u: Seq, p, alpha) -> RatioReport:
    """Copson inequality for ``0 <= alpha < p-1``.

    ``extra['improved_margin']`` is the margin against the improved weight
    ``rho_n`` of the Copson ground state (constant 1).
    """
    from .weights import rho_weight

    p = _prep(u, p)
    if not 0 <= alpha < p - 1:
        raise ValueError(f"Copson inequality needs 0 <= alpha < p-1, got alpha={alpha}, p={p}")
    if u.entry(0) != 0:
        raise SupportError(f"Copson inequality needs u_0 = 0, got u_0 = {u.entry(0)}")
    lhs = _power_sum_from(nabla(u), p, alpha, 1)
    rhs = _power_sum_from(u, p, alpha - p, 1)
    extra = {}
    if not u.is_zero and not u.is_extended:
        lo = max(u.offset, 1)
        rho = rho_weight(np.arange(lo, u.end), float(p), alpha, "copson")
        extra["improved_rhs"] = power_sum(u.values[lo - u.offset:], p, rho)
        extra["improved_margin"] = lhs - extra["improved_rhs"]
    return _report(lhs, rhs, copson_constant(p, alpha), u.is_extended, extra=extra)


def birman_report(u: Seq, p, ell: int) -> RatioReport:
    """Discrete p-Birman inequality ``sum |nabla^ell u|^p >= B sum |u_n|^p / n^(ell p)``."""
    p = _prep(u, p)
    _require_zero_below(u, ell, f"Birman inequality of order {ell}")
    lhs = _power_sum_from(nabla_pow(u, ell), p, 0, ell)
    rhs = _power_sum_from(u, p, -ell * p, ell)
    return _report(lhs, rhs, birman_constant(p, ell), u.is_extended)


# integral form ---------------------------------------------------------------

def birman_integral_report(v: Seq, p, ell: int, head: int = 4096) -> RatioReport:
    """Integral form ``sum |v_n|^p >= B sum_{n>=ell} |n^-ell sum_k C(n+ell-1-k, ell-1) v_k|^p``.

    Entries of ``v`` below index ``ell`` are ignored (the sums start at ``ell``).
    Past the support of ``v`` the inner sum is a polynomial of degree
    ``ell - 1`` in ``n``, so the right side has an infinite tail.  It is summed
    exactly for ``head`` further indices and the rest is bracketed with the
    Hurwitz zeta function (see :func:`_polynomial_tail`).  ``rhs`` is the upper
    end of the bracket (so ``margin`` is conservative), ``extra['rhs_lower']``
    the lower end and ``extra['tail_width']`` their difference.
    """
    check_p(p)
    if v.is_extended:
        raise ValueError("birman_integral_report works in double precision only")
    if head < ell:
        raise ValueError("head must be at least ell")
    vv = Seq(ell, v.window(ell, max(v.end, ell)))
    const = birman_constant(p, ell)
    if vv.is_zero:
        return _report(0.0, 0.0, const, False, extra={"rhs_lower": 0.0, "tail_width": 0.0})
    lhs = power_sum(vv.values, p)
    m = vv.end - 1
    stop = m + 1 + head
    u = hardy_op.solve_difference_eq(vv, ell, stop=stop)
    body = _power_sum_from(u, p, -ell * p, ell)
    lo_tail, hi_tail, flags = _polynomial_tail(u, m, p, ell, stop)
    return _report(lhs, body + hi_tail, const, False, flags,
                   {"rhs_lower": body + lo_tail, "tail_width": hi_tail - lo_tail})


def _polynomial_tail(u: Seq, m: int, p, ell: int, start: int):
    """Bracket ``sum_{n >= start} |u_n|^p n^(-ell p)`` where ``u`` is a polynomial on ``n >= m``.

    Writing ``u_n = n^(ell-1) R(1/n)`` with ``R`` a polynomial, each term is
    ``|R(1/n)|^p n^-p``; bounding ``|R|`` on ``(0, 1/start]`` through its
    critical points and summing ``n^-p`` with the Hurwitz zeta function gives
    the bracket.  For ``ell = 1`` ``R`` is constant and the bracket is exact.
    """
    vals = u.window(m, m + ell)
    scale = max(float(np.max(np.abs(u.values))), 1.0)
    if np.all(np.abs(u.window(m, start)) <= 1e-12 * scale):
        return 0.0, 0.0, ["tail_zero"]
    parts = [vals.real, vals.imag] if np.iscomplexobj(vals) else [vals]
    y = np.arange(ell, dtype=np.float64)
    S = np.zeros(1)
    for part in parts:
        # u_n = P(n - m) = Q(n); R has the coefficients of Q in reverse order
        pc = P.polyfit(y, part, ell - 1) if ell > 1 else part[:1]
        q = np.zeros(ell)
        for j, c in enumerate(pc):
            for k in range(j + 1):
                q[k] += c * comb(j, k) * (-m) ** (j - k)
        R = q[::-1]
        S = P.polyadd(S, P.polymul(R, R))
    tmax = 1.0 / start
    pts = [0.0, tmax]
    if len(S) > 2:
        pts += [float(r.real) for r in P.polyroots(P.polyder(S))
                if abs(r.imag) <= 1e-12 and 0 < r.real < tmax]
    svals = np.maximum(P.polyval(np.array(pts), S), 0.0)
    zeta = float(special.zeta(p, start))
    lo = float(np.min(svals)) ** (p / 2) * zeta * (1 - 1e-12)
    hi = float(np.max(svals)) ** (p / 2) * zeta * (1 + 1e-12)
    return lo, hi, ["tail_bracketed"]


def integral_rhs_direct(v: Seq, p, ell: int, horizon: int) -> float:
    """Truncated right side of the integral form by direct kernel sums over the support of ``v``."""
    n = np.arange(ell, horizon + 1)
    inner = np.zeros(len(n), dtype=np.result_type(v.values, np.float64))
    for k in range(max(ell, v.offset), v.end):
        inner += np.where(n >= k, special.comb(n + ell - 1 - k, ell - 1), 0.0) * v.entry(k)
    return math.fsum(np.abs(inner / n.astype(np.float64) ** ell) ** p)
