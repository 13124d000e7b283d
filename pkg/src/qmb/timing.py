"""Arrival-time estimation with N independent photons vs one N-photon entangled pulse."""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError
from .rng import MonteCarloPlan, trial_stream
from .scaling import EstimationResult, ScalingFit, check_resource_list, fit_power_law

TIMING_STRATEGIES = ("classical", "entangled")
_TIMING_STREAM = 0x54494D45


@dataclass(frozen=True)
class PulseModel:
    """Gaussian arrival-time spread ``1/bandwidth`` per photon."""

    bandwidth: float
    n_photons: int
    strategy: str

    def __post_init__(self):
        if not (self.bandwidth > 0 and math.isfinite(self.bandwidth)):
            raise DomainError(f"bandwidth must be positive, got {self.bandwidth}")
        if int(self.n_photons) != self.n_photons or self.n_photons < 1:
            raise DomainError(f"n_photons must be an integer >= 1, got {self.n_photons}")
        if self.strategy not in TIMING_STRATEGIES:
            raise DomainError(f"unknown timing strategy {self.strategy!r}")

    def draws_per_trial(self):
        return self.n_photons if self.strategy == "classical" else 1

    def draw_sigma(self):
        if self.strategy == "classical":
            return 1.0 / self.bandwidth
        return 1.0 / (self.n_photons * self.bandwidth)


def arrival_time_rmse(model, true_t, plan):
    """RMSE of the arrival-time estimate over ``plan.trials`` trials.

    Classical: mean of N independent arrivals. Entangled: a single arrival of
    effective bandwidth ``N * bandwidth``. Each trial uses the same substream
    for both strategies, so at N = 1 they produce identical numbers.
    """
    k = model.draws_per_trial()
    sigma = model.draw_sigma()
    est = np.empty(plan.trials)
    for t in range(plan.trials):
        z = trial_stream(plan.seed, t, stream=_TIMING_STREAM + model.n_photons).standard_normal(k)
        est[t] = true_t + sigma * (math.fsum(z) / k)
    err = est - true_t
    return EstimationResult(
        strategy=model.strategy,
        N=int(model.n_photons),
        true_value=float(true_t),
        trials=plan.trials,
        mean_estimate=math.fsum(est) / plan.trials,
        rmse=math.sqrt(math.fsum(err * err) / plan.trials),
        extra={"bandwidth": model.bandwidth},
    )


def timing_scaling_experiment(strategy, N_list, bandwidth=1.0, true_t=0.0, trials=5000, seed=0):
    ns = check_resource_list(N_list)
    plan = MonteCarloPlan(trials, seed)
    rows = tuple(arrival_time_rmse(PulseModel(bandwidth, n, strategy), true_t, plan) for n in ns)
    fit = fit_power_law([r.N for r in rows], [r.rmse for r in rows], strategy)
    return ScalingFit(fit.exponent, fit.intercept, fit.residual, rows, strategy)
