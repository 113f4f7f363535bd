"""Numerical toolkit for the discrete p-Hardy, Copson and Birman inequalities."""
from .constants import (IneqParams, birman_constant, composition_check, copson_constant,
                        hardy_opnorm_bound, pochhammer)
from .hardy_op import HardyOpSpec, opnorm_estimate, opnorm_sweep, solve_difference_eq
from .inequalities import (PreconditionError, RatioReport, abstract_hardy_report,
                           birman_integral_report, birman_report, copson_report,
                           ground_state_step_check, hardy_report, pointwise_lemma_check,
                           weighted_hardy_report)
from .records import SweepRecord
from .seq import Seq, divg, laplacian, lp_sum, nabla, nabla_pow, shift
from .sharpness import CutoffSpec, continuous_rayleigh, discrete_extremal, sharpness_sweep
from .weights import WeightTable, ground_state_g, h_copson, h_negative, rho_weight

__version__ = "0.1.0"

__all__ = [
    "CutoffSpec", "HardyOpSpec", "IneqParams", "PreconditionError", "RatioReport", "Seq",
    "SweepRecord", "WeightTable", "abstract_hardy_report", "birman_constant",
    "birman_integral_report", "birman_report", "composition_check", "continuous_rayleigh",
    "copson_constant", "copson_report", "discrete_extremal", "divg", "ground_state_g",
    "ground_state_step_check", "h_copson", "h_negative", "hardy_opnorm_bound", "hardy_report",
    "laplacian", "lp_sum", "nabla", "nabla_pow", "opnorm_estimate", "opnorm_sweep",
    "pochhammer", "pointwise_lemma_check", "rho_weight", "sharpness_sweep", "shift",
    "solve_difference_eq", "weighted_hardy_report",
]
