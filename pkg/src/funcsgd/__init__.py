"""Online SGD for functional linear regression in a reproducing kernel Hilbert space.

Operators are represented in a shared eigenbasis, so the whole method reduces
to coordinate arithmetic on eigenvalue sequences.
"""
__version__ = "0.1.0"

from . import backend
from .engine import Schedule, SgdState, run, run_replications, sgd_step, theta_for_estimation, theta_for_prediction
from .errors import DomainError, FuncSGDError, IllPosedError, NumericError, UnsupportedError, ValidationError
from .model import ProcessSpec, SlopeCoefficients, build_slope, sample_pair, verify_moment_condition
from .spectral import EigenDecay, SpectralModel, effective_dimension, materialize, trace_power

__all__ = [
    "__version__",
    "backend",
    "EigenDecay",
    "SpectralModel",
    "materialize",
    "trace_power",
    "effective_dimension",
    "SlopeCoefficients",
    "ProcessSpec",
    "build_slope",
    "sample_pair",
    "verify_moment_condition",
    "Schedule",
    "SgdState",
    "sgd_step",
    "run",
    "run_replications",
    "theta_for_prediction",
    "theta_for_estimation",
    "FuncSGDError",
    "ValidationError",
    "DomainError",
    "IllPosedError",
    "UnsupportedError",
    "NumericError",
]
