"""Row type shared by the operator-norm, sharpness and bridge sweeps."""
from __future__ import annotations

import math
from typing import NamedTuple


class SweepRecord(NamedTuple):
    N: float
    value: float
    bound: float
    gap: float
    iters: int = 0
    numerator: float = math.nan
    denominator: float = math.nan
