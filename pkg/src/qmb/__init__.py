"""Simulations of quantum-enhanced measurement at desk scale."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    ConsistencyError,
    DegenerateOperatingPointError,
    DomainError,
    InvariantError,
    NumericalError,
    QmbError,
    ShapeError,
    TruncationError,
)
from .kernels import BACKEND  # noqa: E402

__all__ = [
    "BACKEND",
    "ConfigError",
    "ConsistencyError",
    "DegenerateOperatingPointError",
    "DomainError",
    "InvariantError",
    "NumericalError",
    "QmbError",
    "ShapeError",
    "TruncationError",
    "__version__",
]
