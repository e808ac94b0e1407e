"""Numerical q-analysis on geometric lattices.

q-integrals and q-derivatives on ``L(gamma) = {+-q^k gamma}``, moments and
growth types, the moment-series convolution, q-Fourier transforms and the
analytic-extension test for lattice data.
"""

from .errors import (CapExceeded, DivergentSeries, DomainError, EpsilonMismatch, InputError,
                     InsufficientData, NonConvergent, NotOfLeftType, NumericFailure, PoleError,
                     QConvError, RangeError, WindowExceeded, ZeroPoint)
from .lattice import (LatticeFunction, LatticePoint, Parity, Status, Table, q_derivative,
                      q_integral_bounded, q_integral_unbounded, q_shift)
from .moments import MomentSequence, TypeKind, classify_type, moment_sequence
from .qcore import QContext, constant_bq, constant_cq
from .special import Kind, SpecialFunction, make_function

__version__ = "0.1.0"

__all__ = [
    "CapExceeded", "DivergentSeries", "DomainError", "EpsilonMismatch", "InputError",
    "InsufficientData", "NonConvergent", "NotOfLeftType", "NumericFailure", "PoleError",
    "QConvError", "RangeError", "WindowExceeded", "ZeroPoint",
    "LatticeFunction", "LatticePoint", "Parity", "Status", "Table", "q_derivative",
    "q_integral_bounded", "q_integral_unbounded", "q_shift",
    "MomentSequence", "TypeKind", "classify_type", "moment_sequence",
    "QContext", "constant_bq", "constant_cq",
    "Kind", "SpecialFunction", "make_function",
]
