"""Exception hierarchy shared by all modules.

Errors split into two families so the command line can map them to exit
codes: :class:`InputError` for bad arguments or points outside a domain, and
:class:`NumericFailure` for series or sums that could not be brought to a
certified value.
"""


class QConvError(Exception):
    """Base class for every error raised by the package."""


class InputError(QConvError):
    """Bad input: wrong parameters, points outside a domain, short data."""


class NumericFailure(QConvError):
    """A series, product or lattice sum failed to converge within the caps."""


class DomainError(InputError, ValueError):
    pass


class PoleError(DomainError):
    pass


class ZeroPoint(DomainError):
    pass


class WindowExceeded(InputError, IndexError):
    pass


class RangeError(InputError, IndexError):
    pass


class InsufficientData(InputError):
    pass


class EvaluationFailure(InputError):
    pass


class EpsilonMismatch(InputError):
    pass


class NotOfLeftType(NumericFailure):
    pass


class CapExceeded(NumericFailure):
    pass


class DivergentSeries(NumericFailure):
    pass


class NonConvergent(NumericFailure):
    pass
