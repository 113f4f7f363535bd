"""Finitely supported sequences on the integer half-line and difference operators.

A :class:`Seq` stores a dense window ``values`` starting at index ``offset``;
every entry outside the window is zero, and so is every entry at a negative
index.  Operators act on the window and return new sequences.

Composition follows the half-line convention: a chain of operators is applied
formally on all integers and only the final result is cut back to ``n >= 0``.
Single operators cut immediately, which only matters for ``shift`` and
``divg`` (the two operators that move mass to negative indices).  Use
:func:`compose` (or ``formal=True``) when chaining them with ``nabla``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb
from typing import Callable, Iterable

import mpmath
import numpy as np

EXTENDED_DPS = 32


@dataclass(frozen=True, eq=False)
class Seq:
    offset: int
    values: np.ndarray

    def __init__(self, offset: int = 0, values: Iterable = ()):
        vals = np.asarray(values)
        if vals.dtype == object:
            vals = np.array(list(vals), dtype=object)
        elif np.iscomplexobj(vals):
            vals = vals.astype(np.complex128)
        else:
            vals = vals.astype(np.float64)
        if vals.ndim != 1:
            raise ValueError("sequence values must be one-dimensional")
        offset = int(offset)
        nz = np.flatnonzero(vals != 0)
        if nz.size == 0:
            offset, vals = 0, vals[:0]
        else:
            offset, vals = offset + int(nz[0]), vals[nz[0]:nz[-1] + 1].copy()
        if vals.dtype != object:
            vals.setflags(write=False)
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "values", vals)

    @classmethod
    def delta(cls, n: int, value=1.0) -> "Seq":
        return cls(n, [value])

    @classmethod
    def zero(cls) -> "Seq":
        return cls(0, [])

    @property
    def end(self) -> int:
        """One past the last stored index."""
        return self.offset + len(self.values)

    @property
    def is_zero(self) -> bool:
        return len(self.values) == 0

    @property
    def is_extended(self) -> bool:
        return self.values.dtype == object

    def __len__(self) -> int:
        return len(self.values)

    def entry(self, n: int):
        if self.offset <= n < self.end:
            return self.values[n - self.offset]
        return 0.0

    def window(self, start: int, stop: int) -> np.ndarray:
        """Dense copy of entries ``start .. stop-1`` (zeros outside the support)."""
        dtype = self.values.dtype if len(self.values) else np.float64
        out = np.zeros(max(stop - start, 0), dtype=dtype)
        if dtype == object:
            out[:] = mpmath.mpf(0)
        lo, hi = max(start, self.offset), min(stop, self.end)
        if lo < hi:
            out[lo - start:hi - start] = self.values[lo - self.offset:hi - self.offset]
        return out

    def indices(self) -> np.ndarray:
        return np.arange(self.offset, self.end)

    def restrict(self) -> "Seq":
        """Drop entries at negative indices."""
        if self.offset >= 0:
            return self
        return Seq(0, self.values[-self.offset:])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Seq):
            return NotImplemented
        return self.offset == other.offset and len(self) == len(other) and bool(
            np.all(self.values == other.values))

    def __add__(self, other: "Seq") -> "Seq":
        lo, hi = min(self.offset, other.offset), max(self.end, other.end)
        return Seq(lo, self.window(lo, hi) + other.window(lo, hi))

    def __sub__(self, other: "Seq") -> "Seq":
        return self + (-1.0) * other

    def __rmul__(self, c) -> "Seq":
        return Seq(self.offset, c * self.values)

    def __neg__(self) -> "Seq":
        return Seq(self.offset, -self.values)

    def __repr__(self) -> str:
        return f"Seq(offset={self.offset}, values={self.values.tolist()!r})"

    # serialization -------------------------------------------------------
    def to_json(self) -> dict:
        vals = []
        for x in self.values:
            x = complex(x) if np.iscomplexobj(self.values) else x
            if isinstance(x, complex):
                vals.append([x.real, x.imag])
            else:
                vals.append(float(x))
        return {"offset": self.offset, "values": vals}

    @classmethod
    def from_json(cls, obj) -> "Seq":
        if not isinstance(obj, dict):
            raise ValueError("sequence file must hold a JSON object")
        if "offset" not in obj:
            raise ValueError("missing field 'offset'")
        if "values" not in obj:
            raise ValueError("missing field 'values'")
        offset = obj["offset"]
        if not isinstance(offset, int) or isinstance(offset, bool) or offset < 0:
            raise ValueError("field 'offset' must be a nonnegative integer")
        raw = obj["values"]
        if not isinstance(raw, list):
            raise ValueError("field 'values' must be a list")
        vals = []
        for i, x in enumerate(raw):
            if isinstance(x, list) and len(x) == 2 and all(_is_number(t) for t in x):
                vals.append(complex(x[0], x[1]))
            elif _is_number(x):
                vals.append(x)
            else:
                raise ValueError(f"field 'values[{i}]' is not a number or [re, im] pair")
        if any(isinstance(x, complex) for x in vals):
            return cls(offset, np.array(vals, dtype=np.complex128))
        return cls(offset, np.array(vals, dtype=np.float64))


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def to_extended(u: Seq, dps: int = EXTENDED_DPS) -> Seq:
    """Copy of ``u`` with mpmath entries (about double-double precision by default)."""
    with mpmath.workdps(dps):
        if np.iscomplexobj(u.values):
            vals = [mpmath.mpc(complex(x)) for x in u.values]
        else:
            vals = [mpmath.mpf(float(x)) for x in u.values]
    return Seq(u.offset, np.array(vals, dtype=object))


# difference operators ----------------------------------------------------

def _finish(res: Seq, formal: bool) -> Seq:
    return res if formal else res.restrict()


def nabla(u: Seq, formal: bool = False) -> Seq:
    """Backward difference ``u(n) - u(n-1)``."""
    if u.is_zero:
        return u
    vals = u.window(u.offset, u.end + 1)
    out = vals.copy()
    out[1:] = vals[1:] - vals[:-1]
    return _finish(Seq(u.offset, out), formal)


def shift(u: Seq, formal: bool = False) -> Seq:
    """Forward shift ``u(n+1)``."""
    if u.is_zero:
        return u
    return _finish(Seq(u.offset - 1, u.values), formal)


def divg(u: Seq, formal: bool = False) -> Seq:
    """Forward difference ``u(n+1) - u(n)``."""
    if u.is_zero:
        return u
    vals = u.window(u.offset - 1, u.end)
    out = -vals
    out[:-1] = out[:-1] + vals[1:]
    return _finish(Seq(u.offset - 1, out), formal)


def laplacian(u: Seq, formal: bool = False) -> Seq:
    """``u(n-1) - 2u(n) + u(n+1)``; at the origin this gives ``u(1) - 2u(0)``."""
    return _finish(divg(nabla(u, formal=True), formal=True), formal)


def compose(u: Seq, *ops: Callable[..., Seq]) -> Seq:
    """Apply ``ops`` left to right on all integers, then cut to ``n >= 0``."""
    for op in ops:
        u = op(u, formal=True)
    return u.restrict()


def nabla_pow(u: Seq, ell: int) -> Seq:
    """``ell``-fold backward difference by repeated application of :func:`nabla`."""
    _check_order(ell)
    for _ in range(ell):
        u = nabla(u)
    return u


def nabla_pow_stencil(u: Seq, ell: int) -> Seq:
    """Same as :func:`nabla_pow` via ``sum_k (-1)^k C(ell, k) u(n-k)``."""
    _check_order(ell)
    if u.is_zero:
        return u
    vals = u.window(u.offset, u.end + ell)
    out = vals.copy()
    for k in range(1, ell + 1):
        c = (-1) ** k * comb(ell, k)
        out[k:] = out[k:] + c * vals[:-k]
    return Seq(u.offset, out)


def fractional_laplacian(u: Seq, ell: int) -> Seq:
    """``(-Delta)^{ell/2}``: ``ell//2`` negated Laplacians, plus one ``nabla`` for odd ``ell``."""
    _check_order(ell)
    ops = [lambda s, formal: -laplacian(s, formal=formal)] * (ell // 2)
    if ell % 2:
        ops.append(nabla)
    return compose(u, *ops)


def _check_order(ell) -> None:
    if not isinstance(ell, (int, np.integer)) or isinstance(ell, bool) or ell < 1:
        raise ValueError(f"difference order must be an integer >= 1, got {ell!r}")


def check_p(p) -> None:
    if not p > 1:
        raise ValueError(f"exponent p must exceed 1, got {p!r}")


# sums ----------------------------------------------------------------------

def power_sum(vals: np.ndarray, p, weights=None):
    """Correctly rounded ``sum w_n |x_n|^p`` (mpmath for extended data)."""
    if vals.dtype == object:
        if weights is None:
            return mpmath.fsum(abs(x) ** p for x in vals)
        return mpmath.fsum(w * abs(x) ** p for x, w in zip(vals, weights))
    terms = np.abs(vals) ** p
    if weights is not None:
        terms = terms * weights
    return math.fsum(terms)


def lp_sum(u: Seq, p, w=None):
    """``sum_n w_n |u_n|^p`` with ``w = 1`` when omitted.

    ``w`` is a :class:`~birmanlab.weights.WeightTable` and must cover the
    support of ``u``.
    """
    check_p(p)
    if u.is_zero:
        return 0.0
    if w is None:
        return power_sum(u.values, p)
    return power_sum(u.values, p, w.slice(u.offset, u.end))
