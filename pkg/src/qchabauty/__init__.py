"""Quadratic Chabauty for even-degree hyperelliptic curves over Q."""

from .padic import PadicContext, PadicElement, PadicMatrix, PrecisionError, solve_linear
from .series import TruncatedSeries
from .curve import BadReductionError, CurvePoint, HyperellipticCurve, ResidueDisk, kms_curve
from .frobenius import FrobeniusData, frobenius_matrix
from .coleman import ColemanIntegrator, WeierstrassDiskError
from .hodge import HodgeComputation, HodgeConstants, HodgeError, hodge_constants
from .qc import (
    BadPrimeData,
    DegenerateInputError,
    QCProblem,
    QCReport,
    default_working_precision,
    search_rational_points,
    solve,
)

__all__ = [
    "PadicContext", "PadicElement", "PadicMatrix", "PrecisionError", "solve_linear",
    "TruncatedSeries",
    "BadReductionError", "CurvePoint", "HyperellipticCurve", "ResidueDisk", "kms_curve",
    "FrobeniusData", "frobenius_matrix",
    "ColemanIntegrator", "WeierstrassDiskError",
    "HodgeComputation", "HodgeConstants", "HodgeError", "hodge_constants",
    "BadPrimeData", "DegenerateInputError", "QCProblem", "QCReport",
    "default_working_precision", "search_rational_points", "solve",
]
__version__ = "0.1.0"
