"""Ground-state weights behind the weighted Hardy and improved Copson inequalities.

``g_n = Gamma(n+1-a)/Gamma(n)`` with ``a = (alpha+1)/p`` is the ground state
fed to the abstract Hardy inequality.  Two weight families ``V`` are used:

* ``negative_alpha`` (``alpha < 0``): ``V_1 = 0`` and ``V_n = (n-1)^alpha``;
* ``copson`` (``0 <= alpha < p-1``): ``V_n = n^alpha``.

Each produces an improved weight ``rho_n`` that factors as
``c^(p-1) n^(alpha-p+1) H(1/n)`` with ``c = (p-alpha-1)/p``.

For the negative-alpha family the factorization only holds for ``n >= 2``.
At ``n = 1`` the divergence quotient equals ``-c^(p-1)`` (the ``V_1 = 0``
term drops out) while ``H`` is singular at ``x = 1``; the proof sidesteps this
by also requiring ``u_1 = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.special import gammaln, gammasgn

from .constants import copson_constant

VARIANTS = ("negative_alpha", "copson")
LABELS = ("classical", "rho_negative_alpha", "rho_copson", "ground_state_g", "power_V")


@dataclass(frozen=True, eq=False)
class WeightTable:
    offset: int
    values: np.ndarray
    label: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"unknown weight label {self.label!r}")
        vals = np.asarray(self.values)
        if vals.dtype != object:
            vals = vals.astype(np.float64)
            if not np.all(np.isfinite(vals)):
                raise ValueError("weight table entries must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def end(self) -> int:
        return self.offset + len(self.values)

    def covers(self, start: int, stop: int) -> bool:
        return self.offset <= start and stop <= self.end

    def slice(self, start: int, stop: int) -> np.ndarray:
        if not self.covers(start, stop):
            raise ValueError(
                f"weight table {self.label} covers [{self.offset}, {self.end}) "
                f"but [{start}, {stop}) is needed")
        return self.values[start - self.offset:stop - self.offset]

    def at(self, n: int):
        return self.slice(n, n + 1)[0]


def _shift_param(p, alpha):
    return (alpha + 1) / p


def ground_state_g(n, p, alpha):
    """``Gamma(n+1-(alpha+1)/p) / Gamma(n)`` for ``n >= 1`` and ``0`` at ``n = 0``.

    Vectorized over ``n``; evaluated as a log-gamma difference so large ``n``
    does not overflow.
    """
    if not p > 1:
        raise ValueError("p must exceed 1")
    n = np.asarray(n, dtype=np.float64)
    if np.any(n < 0) or np.any(n != np.round(n)):
        raise ValueError("ground state index must be a nonnegative integer")
    arg = n + 1 - _shift_param(p, alpha)
    pos = n >= 1
    bad = pos & (arg <= 0) & (arg == np.round(arg))
    if np.any(bad):
        raise ValueError(f"Gamma pole: n+1-(alpha+1)/p is a non-positive integer for alpha={alpha}, p={p}")
    safe_n = np.where(pos, n, 1.0)
    safe_arg = np.where(pos, arg, 1.0)
    val = gammasgn(safe_arg) * np.exp(gammaln(safe_arg) - gammaln(safe_n))
    out = np.where(pos, val, 0.0)
    return out if out.ndim else float(out)


def ground_state_increment(n, p, alpha):
    """``g_n - g_{n-1} = c Gamma(n-a)/Gamma(n)`` for ``n >= 2``, from the closed form."""
    n = np.asarray(n, dtype=np.float64)
    a = _shift_param(p, alpha)
    out = (p - alpha - 1) / p * np.exp(gammaln(n - a) - gammaln(n))
    return out if out.ndim else float(out)


def ground_state_table(p, alpha, n_max: int) -> WeightTable:
    return WeightTable(0, ground_state_g(np.arange(n_max + 1), p, alpha), "ground_state_g")


def power_V_table(alpha, n_max: int, variant: str) -> WeightTable:
    """``V_n`` on ``0..n_max``; ``V_0`` is never read and is stored as 0."""
    n = np.arange(n_max + 1, dtype=np.float64)
    if variant == "negative_alpha":
        vals = np.zeros_like(n)
        vals[2:] = (n[2:] - 1) ** alpha
        meta = {"requires_u1_zero": True}
    elif variant == "copson":
        vals = np.zeros_like(n)
        vals[1:] = n[1:] ** alpha
        meta = {"requires_u1_zero": False}
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return WeightTable(0, vals, "power_V", meta)


# auxiliary H functions ------------------------------------------------------

def h_negative(x, p, alpha):
    """``(1-x)^alpha / (1 - a x)^(p-1) - 1`` on ``[0, 1)``, ``a = (alpha+1)/p``.

    Written as ``expm1`` of a sum of ``log1p`` terms, which keeps full relative
    accuracy as ``x -> 0`` where both powers approach 1.
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0) or np.any(x >= 1):
        raise ValueError("h_negative is defined on [0, 1)")
    a = _shift_param(p, alpha)
    out = np.expm1(alpha * np.log1p(-x) - (p - 1) * np.log1p(-a * x))
    return out if out.ndim else float(out)


def h_copson(x, p, alpha):
    """``(1 - a x)^(1-p) - (1+x)^alpha`` on ``[0, 1]`` for ``0 <= alpha < p-1``."""
    if not 0 <= alpha < p - 1:
        raise ValueError(f"h_copson needs 0 <= alpha < p-1, got alpha={alpha}")
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0) or np.any(x > 1):
        raise ValueError("h_copson is defined on [0, 1]")
    a = _shift_param(p, alpha)
    la = (1 - p) * np.log1p(-a * x)
    lb = alpha * np.log1p(x)
    out = np.exp(lb) * np.expm1(la - lb)
    return out if out.ndim else float(out)


def h_slope(p, alpha):
    """Derivative of either H at the origin."""
    return (p - alpha - 1) / p


def h_second_derivative(x, p, alpha):
    """Closed-form second derivative of :func:`h_negative`."""
    x = np.asarray(x, dtype=np.float64)
    a = _shift_param(p, alpha)
    quad = (p - alpha) * (1 + alpha) ** 2 * x ** 2 - 2 * (1 + alpha) * (p - alpha) * x + p * (1 - alpha)
    out = (p - alpha - 1) / p ** 2 * (1 - x) ** (alpha - 2) / (1 - a * x) ** (p + 1) * quad
    return out if out.ndim else float(out)


def h_discriminant(p, alpha):
    """Discriminant of the quadratic factor of H''; negative for alpha < 0."""
    return 4 * alpha * (1 + alpha) ** 2 * (p - 1) * (p - alpha)


# improved weights -----------------------------------------------------------

def _check_variant(p, alpha, variant):
    if not p > 1:
        raise ValueError("p must exceed 1")
    if variant == "negative_alpha":
        if not alpha < 0:
            raise ValueError("negative_alpha variant needs alpha < 0")
    elif variant == "copson":
        if not 0 <= alpha < p - 1:
            raise ValueError("copson variant needs 0 <= alpha < p-1")
    else:
        raise ValueError(f"unknown variant {variant!r}")


def rho_weight(n, p, alpha, variant: str = "negative_alpha", check: bool = False):
    """Improved weight ``c^(p-1) n^(alpha-p+1) H(1/n)``.

    The negative-alpha variant needs ``n >= 2``.  With ``check=True`` each
    value is recomputed from the divergence quotient (:func:`rho_divergence`)
    and a mismatch beyond ``1e-9`` relative raises ``ArithmeticError``.
    """
    _check_variant(p, alpha, variant)
    n = np.asarray(n, dtype=np.float64)
    lo = 2 if variant == "negative_alpha" else 1
    if np.any(n < lo):
        raise ValueError(f"{variant} closed form needs n >= {lo}")
    h = h_negative if variant == "negative_alpha" else h_copson
    c = h_slope(p, alpha)
    out = c ** (p - 1) * n ** (alpha - p + 1) * h(1 / n, p, alpha)
    if check:
        for k, r in zip(np.atleast_1d(n), np.atleast_1d(out)):
            ref = rho_divergence(int(k), p, alpha, variant)
            if abs(r - ref) > 1e-9 * abs(ref):
                raise ArithmeticError(f"rho mismatch at n={int(k)}: closed form {r}, quotient {ref}")
    return out if out.ndim else float(out)


def rho_divergence(n: int, p, alpha, variant: str = "negative_alpha", dps: int = 40) -> float:
    """``-div(V (nabla g)^(p-1))_n / g_n^(p-1)`` evaluated literally in high precision.

    Differencing the ground state loses about ``2 log10(n)`` digits, hence
    mpmath rather than doubles.
    """
    _check_variant(p, alpha, variant)
    if n < 1:
        raise ValueError("rho is defined for n >= 1")
    with mpmath.workdps(dps):
        P, A = mpmath.mpf(p), mpmath.mpf(alpha)
        a = (A + 1) / P

        def g(k):
            return mpmath.mpf(0) if k == 0 else mpmath.gammaprod([k + 1 - a], [k])

        def V(k):
            if variant == "copson":
                return mpmath.mpf(k) ** A
            return mpmath.mpf(0) if k == 1 else mpmath.mpf(k - 1) ** A

        def flux(k):
            return V(k) * (g(k) - g(k - 1)) ** (P - 1)

        return float(-(flux(n + 1) - flux(n)) / g(n) ** (P - 1))


def classical_weight(n, p, alpha, variant: str = "negative_alpha"):
    """Weight of the plain inequality: ``C (n+1)^(alpha-p)`` or ``C n^(alpha-p)``."""
    n = np.asarray(n, dtype=np.float64)
    base = n + 1 if variant == "negative_alpha" else n
    out = copson_constant(p, alpha) * base ** (alpha - p)
    return out if out.ndim else float(out)


def rho_table(p, alpha, variant: str, n_max: int) -> WeightTable:
    """rho on ``0..n_max``; entries the closed form does not cover are 0.

    Zero is what the abstract inequality effectively uses there: ``u_0 = 0``
    always, and ``u_1 = 0`` is required for the negative-alpha family.
    """
    _check_variant(p, alpha, variant)
    lo = 2 if variant == "negative_alpha" else 1
    vals = np.zeros(n_max + 1)
    if n_max >= lo:
        vals[lo:] = rho_weight(np.arange(lo, n_max + 1), p, alpha, variant)
    label = "rho_negative_alpha" if variant == "negative_alpha" else "rho_copson"
    return WeightTable(0, vals, label, {"requires_u1_zero": variant == "negative_alpha"})


def classical_table(p, alpha, variant: str, n_max: int) -> WeightTable:
    vals = np.zeros(n_max + 1)
    vals[1:] = classical_weight(np.arange(1, n_max + 1), p, alpha, variant)
    return WeightTable(0, vals, "classical")
