"""Exception hierarchy shared by all simulation modules.

The CLI maps these onto exit codes: ``ConfigError`` -> 3, every
``NumericalError`` -> 4.
"""


class QmbError(Exception):
    """Base class for all package errors."""


class ConfigError(QmbError):
    """Invalid experiment configuration or parameter value."""


class DomainError(QmbError, ValueError):
    """Argument outside the physical domain of an operation."""


class ShapeError(QmbError, ValueError):
    """Dimension or cutoff mismatch between operands."""


class InvariantError(QmbError):
    """A data-type invariant (Hermiticity, normalization, ...) is violated."""


class NumericalError(QmbError):
    """A computation could not be carried out to the required accuracy."""


class TruncationError(NumericalError):
    """Fock-space cutoff too small: truncation leakage exceeds tolerance."""


class DegenerateOperatingPointError(NumericalError):
    """Signal slope vanishes at the requested operating point."""


class ConsistencyError(NumericalError):
    """Two independent computation routes disagree beyond tolerance."""
