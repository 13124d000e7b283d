"""Result records shared by the scaling experiments, and the log-log fit."""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit ``log(error) = exponent * log(N) + intercept``.

    ``residual`` is the RMS of the log-space residuals. ``rows`` carries the
    per-N records the fit was made from, in N order.
    """

    exponent: float
    intercept: float
    residual: float
    rows: tuple = ()
    strategy: str = ""

    def prefactor(self):
        return math.exp(self.intercept)


@dataclass(frozen=True)
class EstimationResult:
    """Monte Carlo estimation record for one resource count N."""

    strategy: str
    N: int
    true_value: float
    trials: int
    mean_estimate: float
    rmse: float
    flagged: bool = False
    extra: dict = field(default_factory=dict)


def fit_power_law(ns, errors, strategy=""):
    """Fit a power law to ``errors`` vs ``ns``; non-finite points are rejected."""
    x = np.log(np.asarray(ns, dtype=np.float64))
    y = np.log(np.asarray(errors, dtype=np.float64))
    if x.size < 2 or not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
        raise DomainError("power-law fit needs at least two positive, finite points")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return ScalingFit(
        exponent=float(slope),
        intercept=float(intercept),
        residual=float(np.sqrt(np.mean(resid**2))),
        strategy=strategy,
    )


def check_resource_list(ns, min_points=4, min_decades=1.0):
    """Validate a list of resource counts for a scaling fit; returns sorted unique ints."""
    ns = sorted({int(n) for n in ns})
    if len(ns) < min_points:
        raise DomainError(f"need at least {min_points} distinct N values, got {len(ns)}")
    if ns[0] < 1:
        raise DomainError("resource counts must be >= 1")
    span = math.log10(ns[-1] / ns[0])
    if span < min_decades - 1e-12:
        raise DomainError(f"N values span {span:.2f} decades; need >= {min_decades}")
    return ns
