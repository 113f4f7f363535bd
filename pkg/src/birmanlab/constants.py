"""Sharp constants of the Hardy, Copson and Birman inequalities.

All constants are plain products of their defining factors, so they work for
``float`` as well as ``mpmath.mpf`` arguments.  The Gamma-function route is
kept only as an independent cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import gammaln


@dataclass(frozen=True)
class IneqParams:
    p: float
    ell: int = 1
    alpha: float = 0.0

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError(f"p must exceed 1, got {self.p}")
        if int(self.ell) != self.ell or self.ell < 1:
            raise ValueError(f"ell must be an integer >= 1, got {self.ell}")

    def check_copson(self) -> None:
        if not 0 <= self.alpha < self.p - 1:
            raise ValueError(f"copson variant needs 0 <= alpha < p-1, got alpha={self.alpha}, p={self.p}")

    def check_negative_alpha(self) -> None:
        if not self.alpha < 0:
            raise ValueError(f"weighted Hardy variant needs alpha < 0, got {self.alpha}")


def pochhammer(a, ell: int):
    """Rising factorial ``a (a+1) ... (a+ell-1)``; equals 1 for ``ell == 0``."""
    if ell < 0:
        raise ValueError("pochhammer order must be >= 0")
    out = a * 0 + 1
    for k in range(ell):
        out *= a + k
    return out


def pochhammer_gamma(a: float, ell: int) -> float:
    """Gamma(a+ell)/Gamma(a) through log-gamma, valid for ``a > 0``."""
    return math.exp(gammaln(a + ell) - gammaln(a))


def birman_constant(p, ell: int = 1):
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    return pochhammer((p - 1) / p, ell) ** p


def copson_constant(p, alpha):
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    if not alpha < p - 1:
        raise ValueError(f"alpha must be below p-1 = {p - 1}, got {alpha}")
    return ((p - alpha - 1) / p) ** p


def hardy_opnorm_bound(p, ell: int):
    """Exact norm ``1/(1-1/p)_ell`` of the generalized Hardy operator on l^p."""
    return 1 / pochhammer(1 - 1 / p, ell)


def composition_check(p, ell: int):
    """Residual of ``B(ell-1) * C(-(ell-1) p) = B(ell)``, relative to ``B(ell)``."""
    if ell < 2:
        raise ValueError("composition needs ell >= 2")
    lhs = birman_constant(p, ell - 1) * copson_constant(p, -(ell - 1) * p)
    rhs = birman_constant(p, ell)
    return abs(lhs - rhs) / rhs
