"""Cross-validated n-correlation of CUE eigenangles and zeta zeros.

Four independent routes to the same weighted eigenangle statistic --
Monte Carlo over Haar unitaries, determinantal quadrature, contour
integration of the J* kernel, and the closed-form main term -- plus the
corresponding statistics on tables of zeta-zero ordinates.
"""

from ._kernels import USING_NUMBA, backend_name
from .contour import BigF, ContourSpec, correlation_contour, correlation_contour_q1, decay_probe
from .empirical import (
    determinantal_value,
    mc_distinct_tuples,
    mc_wrapped_weighted,
    small_N_oracle,
    wrapped_determinantal_value,
)
from .errors import (
    ConfigError,
    NcorrError,
    NumericalError,
    OrderError,
    ParseError,
    PoleError,
    SizeError,
    StripError,
    SupportError,
    TailError,
)
from .jstar import jstar, jstar_q1_closed_form, verify_worked_examples
from .results import CorrelationResult
from .rmt import sample_batch, sample_eigenangles
from .rs_main import asymptotic_I, rs_main, rs_sarnak_form
from .test_functions import PhiSpec, WeightSpec
from .zeta import load_zeros, montgomery_statistic, zeta_n_correlation

__version__ = "0.1.0"

__all__ = [
    "USING_NUMBA", "backend_name",
    "BigF", "ContourSpec", "correlation_contour", "correlation_contour_q1", "decay_probe",
    "determinantal_value", "mc_distinct_tuples", "mc_wrapped_weighted", "small_N_oracle",
    "wrapped_determinantal_value",
    "ConfigError", "NcorrError", "NumericalError", "OrderError", "ParseError", "PoleError",
    "SizeError", "StripError", "SupportError", "TailError",
    "jstar", "jstar_q1_closed_form", "verify_worked_examples",
    "CorrelationResult", "sample_batch", "sample_eigenangles",
    "asymptotic_I", "rs_main", "rs_sarnak_form",
    "PhiSpec", "WeightSpec",
    "load_zeros", "montgomery_statistic", "zeta_n_correlation",
]
