"""The generalized discrete Hardy operator and its l^p norm.

``H v_n = (n+ell-1)^-ell * sum_{k=1}^n C(n+ell-1-k, ell-1) v_k`` on ``n >= 1``.
The binomial kernel is exactly the kernel of ``ell`` nested running sums, so
application costs ``O(ell N)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .constants import hardy_opnorm_bound
from .records import SweepRecord
from .seq import Seq, check_p


@dataclass(frozen=True)
class HardyOpSpec:
    ell: int
    p: float
    size: int

    def __post_init__(self):
        if int(self.ell) != self.ell or self.ell < 1:
            raise ValueError("ell must be an integer >= 1")
        check_p(self.p)
        if self.size < 1:
            raise ValueError("size must be >= 1")

    @property
    def bound(self) -> float:
        return hardy_opnorm_bound(self.p, self.ell)


class OpNormResult(NamedTuple):
    norm: float
    maximizer: Seq
    iters: int
    converged: bool


def kernel(n: int, k: int, ell: int) -> float:
    """``C(n+ell-1-k, ell-1)`` by the multiplicative formula; 0 when ``k > n``."""
    if k > n:
        return 0.0
    top = n + ell - 1 - k
    out = 1.0
    for i in range(1, ell):
        out = out * (top - ell + 1 + i) / i
    return out


def _running_sums(x: np.ndarray, times: int) -> np.ndarray:
    for _ in range(times):
        x = np.cumsum(x)
    return x


def apply_array(x: np.ndarray, ell: int) -> np.ndarray:
    """``H`` on a dense vector indexed ``1..len(x)``."""
    n = np.arange(1, len(x) + 1, dtype=np.float64)
    return _running_sums(x, ell) / (n + ell - 1) ** ell


def adjoint_array(w: np.ndarray, ell: int) -> np.ndarray:
    """Transpose of :func:`apply_array` on the same truncation."""
    n = np.arange(1, len(w) + 1, dtype=np.float64)
    return _running_sums((w / (n + ell - 1) ** ell)[::-1], ell)[::-1]


def apply(v: Seq, spec: HardyOpSpec) -> Seq:
    """Truncated operator applied to ``v`` (support must lie in ``[1, size]``)."""
    if not v.is_zero and (v.offset < 1 or v.end - 1 > spec.size):
        raise ValueError(f"v must be supported in [1, {spec.size}], got [{v.offset}, {v.end - 1}]")
    return Seq(1, apply_array(v.window(1, spec.size + 1), spec.ell))


def dense_matrix(spec: HardyOpSpec) -> np.ndarray:
    """Explicit kernel matrix of the truncation (for small sizes)."""
    N, ell = spec.size, spec.ell
    A = np.zeros((N, N))
    for n in range(1, N + 1):
        for k in range(1, n + 1):
            A[n - 1, k - 1] = kernel(n, k, ell)
        A[n - 1] /= (n + ell - 1) ** ell
    return A


def solve_difference_eq(v: Seq, ell: int, stop: int | None = None) -> Seq:
    """Solution of ``nabla^ell u = v`` with ``u_n = 0`` for ``n < ell``.

    ``u_n = sum_{j=ell}^n C(n+ell-1-j, ell-1) v_j`` is computed by ``ell``
    running sums up to index ``stop - 1`` (default: the end of ``v``'s
    support, beyond which ``u`` keeps growing polynomially).
    """
    if v.is_zero:
        return v
    if v.offset < ell:
        raise ValueError(f"v must vanish below index {ell}; support starts at {v.offset}")
    stop = v.end if stop is None else stop
    return Seq(v.offset, _running_sums(v.window(v.offset, stop), ell))


def _lp_norm(x: np.ndarray, p: float) -> float:
    m = np.max(np.abs(x))
    if m == 0:
        return 0.0
    return m * math.fsum((np.abs(x) / m) ** p) ** (1 / p)


def opnorm_estimate(spec: HardyOpSpec, tol: float = 1e-8, max_iter: int = 10_000,
                    eps: float = 0.01) -> OpNormResult:
    """Lower bound on the l^p norm of the truncated operator (nonlinear power method).

    Iterates ``x <- psi_q(H^T psi_p(H x))`` normalized in l^p, where
    ``psi_r(y) = |y|^(r-1) sign(y)`` and ``q = p/(p-1)``.  The kernel is
    positive, so from a positive start the estimates ``||H x||_p`` increase
    toward the largest fixed point.  Starts from ``n^(-1/p - eps)``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    p, ell = spec.p, spec.ell
    q = p / (p - 1)
    n = np.arange(1, spec.size + 1, dtype=np.float64)
    x = n ** (-1 / p - eps)
    x /= _lp_norm(x, p)
    best, best_x = -math.inf, x
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        y = apply_array(x, ell)
        est = _lp_norm(y, p)
        if est > best:
            delta = est - best
            best, best_x = est, x
            if delta < tol:
                converged = True
                break
        else:
            converged = True
            break
        z = adjoint_array((y / est) ** (p - 1), ell)
        x = z ** (q - 1)
        x /= _lp_norm(x, p)
    return OpNormResult(float(best), Seq(1, best_x), it, converged)


def opnorm_sweep(p: float, ell: int, sizes, tol: float = 1e-8, max_iter: int = 10_000,
                 executor=None) -> list[SweepRecord]:
    sizes = [int(s) for s in sizes]
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")

    def one(size):
        spec = HardyOpSpec(ell, p, size)
        res = opnorm_estimate(spec, tol, max_iter)
        return SweepRecord(size, res.norm, spec.bound, spec.bound - res.norm, res.iters)

    mapper = executor.map if executor is not None else map
    return list(mapper(one, sizes))
