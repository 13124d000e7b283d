"""Gaussian free-mass dynamics under repeated position readout.

States are described by first and second moments of (x, p). Free evolution is
a shear of phase space; measurements are Gaussian-pointer conditioning plus
back-action diffusion in the conjugate variable.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError
from .fundamental_limits import HBAR
from .rng import trial_stream

HEISENBERG_RTOL = 1e-12
DEFAULT_MASS = 1e-18
PREPARATIONS = ("naive", "contractive", "momentum_qnd")
_MEASURE_STREAM = 0x4D50  # separates measurement draws from other experiments


@dataclass(frozen=True)
class GaussianState:
    """Moments of a Gaussian free-mass state; covariance must respect Heisenberg."""

    mean_x: float
    mean_p: float
    s_xx: float
    s_xp: float
    s_pp: float

    def __post_init__(self):
        vals = (self.mean_x, self.mean_p, self.s_xx, self.s_xp, self.s_pp)
        if not all(math.isfinite(v) for v in vals):
            raise DomainError(f"non-finite Gaussian moments {vals}")
        if not (self.s_xx > 0 and self.s_pp > 0):
            raise DomainError(f"variances must be positive, got s_xx={self.s_xx}, s_pp={self.s_pp}")
        floor = HBAR**2 / 4
        # tolerance scales with the terms that cancel in the determinant
        tol = HEISENBERG_RTOL * max(floor, self.s_xx * self.s_pp)
        if self.det < floor - tol:
            raise DomainError(f"covariance violates Heisenberg: det={self.det:.6e} < hbar^2/4={floor:.6e}")

    @property
    def det(self):
        return self.s_xx * self.s_pp - self.s_xp**2

    def covariance(self):
        return np.array([[self.s_xx, self.s_xp], [self.s_xp, self.s_pp]])


@dataclass(frozen=True)
class MeasurementRecord:
    """Trajectory of a repeated-measurement run.

    ``controls[k]`` names the post-measurement step applied after measurement
    ``k`` (``"none"``, ``"decorrelate"`` or ``"focus"``); ``observable`` is
    ``"x"`` or ``"p"`` and fixes the units of ``outcomes``.
    """

    times: np.ndarray
    outcomes: np.ndarray
    pre_variances: np.ndarray
    post_variances: np.ndarray
    sql_bound_values: np.ndarray
    controls: tuple = ()
    observable: str = "x"
    pre_momentum_variances: np.ndarray = None

    def __post_init__(self):
        n = len(self.times)
        arrays = (self.outcomes, self.pre_variances, self.post_variances, self.sql_bound_values)
        if any(len(a) != n for a in arrays) or (self.controls and len(self.controls) != n):
            raise DomainError("measurement record arrays must have equal length")
        if n > 1 and not np.all(np.diff(self.times) > 0):
            raise DomainError("measurement times must be strictly increasing")

    @property
    def beaten(self):
        return self.pre_variances < self.sql_bound_values


def _check_mass(m):
    if not m > 0:
        raise DomainError(f"mass must be positive, got {m}")


def minimum_uncertainty_state(s_xx, mean_x=0.0, mean_p=0.0):
    return GaussianState(mean_x, mean_p, s_xx, 0.0, HBAR**2 / (4 * s_xx))


def free_evolve(g, t, m):
    """Evolve freely for time ``t``: ``x -> x + p t / m``, ``p`` unchanged."""
    if not t >= 0:
        raise DomainError(f"evolution time must be >= 0, got {t}")
    _check_mass(m)
    v = t / m
    return GaussianState(
        g.mean_x + g.mean_p * v,
        g.mean_p,
        g.s_xx + 2 * v * g.s_xp + v * v * g.s_pp,
        g.s_xp + v * g.s_pp,
        g.s_pp,
    )


def position_variance_at(g, t, m):
    v = t / m
    return g.s_xx + 2 * v * g.s_xp + v * v * g.s_pp


def sql_variance_bound(t, m):
    """Standard quantum limit ``hbar t / m`` on the position variance after time ``t``."""
    if not (t > 0 or t == 0) or not m > 0:
        raise DomainError(f"need t >= 0 and m > 0, got t={t}, m={m}")
    return HBAR * t / m


def min_free_variance(t, m):
    """Minimize ``s_xx(t)`` over uncorrelated minimum-uncertainty states.

    Returns ``(s_xx_opt, s_xx(t) at the optimum)``; the search is in log space
    around the analytic scale ``hbar t / m``.
    """
    if not (t > 0 and m > 0):
        raise DomainError(f"need t > 0 and m > 0, got t={t}, m={m}")
    scale = HBAR * t / m

    def f(u):
        s = scale * math.exp(u)
        return (s + (t / m) ** 2 * HBAR**2 / (4 * s)) / scale

    res = minimize_scalar(f, bounds=(-10.0, 10.0), method="bounded", options={"xatol": 1e-12})
    return scale * math.exp(res.x), res.fun * scale


def two_time_product(g, t, m):
    """``s_xx(0) * s_xx(t)``; never below ``(hbar t / 2m)**2``."""
    return g.s_xx * position_variance_at(g, t, m)


def level(delta, m):
    """Variance level ``2 delta^2 hbar / m`` (``delta**2`` has units of time)."""
    return 2 * delta**2 * HBAR / m


def window_length(g, delta, m, t_min=0.0):
    """Time spent with ``s_xx(t)`` below the level ``2 delta^2 hbar / m``, for ``t >= t_min``.

    Pass ``t_min=-inf`` to measure the full interval of the (reversible)
    free trajectory.
    """
    _check_mass(m)
    lv = level(delta, m)
    a = g.s_pp / m**2
    b = 2 * g.s_xp / m
    c = g.s_xx - lv
    disc = b * b - 4 * a * c
    if disc <= 0:
        return 0.0
    sq = math.sqrt(disc)
    # stable roots of a t^2 + b t + c
    q = -0.5 * (b + math.copysign(sq, b))
    r1, r2 = sorted((q / a, c / q if q != 0 else -b / a))
    lo = max(r1, t_min)
    return max(0.0, r2 - lo)


def contractive_state(delta, m, s_pp):
    """Minimum-uncertainty state starting at the level with the longest window below it.

    ``s_xx = 2 delta^2 hbar / m`` and ``s_xp = -sqrt(s_xx s_pp - hbar^2/4)``,
    so the position variance initially shrinks. At ``s_pp = m hbar/(4 delta^2)``
    the window reaches its maximum ``4 delta^2``.
    """
    _check_mass(m)
    if not (delta > 0 and s_pp > 0):
        raise DomainError(f"need delta > 0 and s_pp > 0, got delta={delta}, s_pp={s_pp}")
    s_xx = level(delta, m)
    d = s_xx * s_pp - HBAR**2 / 4
    if d < 0:
        raise DomainError(f"s_pp={s_pp:.3e} too small: no valid state at the level {s_xx:.3e}")
    return GaussianState(0.0, 0.0, s_xx, -math.sqrt(d), s_pp)


def optimal_window_momentum_variance(delta, m):
    return m * HBAR / (4 * delta**2)


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return trial_stream(int(seed), 0, stream=_MEASURE_STREAM)


def measure_position(g, sigma_m, seed):
    """Noisy position readout with pointer resolution ``sigma_m``.

    The outcome is drawn from N(mean_x, s_xx + sigma_m^2); the posterior is
    the Gaussian conditional plus momentum diffusion ``hbar^2/(4 sigma_m^2)``.
    ``seed`` is an int or a numpy Generator.
    """
    if not sigma_m > 0:
        raise DomainError(f"pointer resolution must be positive, got {sigma_m}")
    S = g.s_xx + sigma_m**2
    y = _rng(seed).normal(g.mean_x, math.sqrt(S))
    kx, kp = g.s_xx / S, g.s_xp / S
    innov = y - g.mean_x
    post = GaussianState(
        g.mean_x + kx * innov,
        g.mean_p + kp * innov,
        g.s_xx * sigma_m**2 / S,
        g.s_xp * sigma_m**2 / S,
        g.s_pp - g.s_xp**2 / S + HBAR**2 / (4 * sigma_m**2),
    )
    return y, post


def measure_momentum(g, sigma_p, seed):
    """Momentum readout; mirror image of :func:`measure_position`."""
    if not sigma_p > 0:
        raise DomainError(f"momentum resolution must be positive, got {sigma_p}")
    S = g.s_pp + sigma_p**2
    y = _rng(seed).normal(g.mean_p, math.sqrt(S))
    innov = y - g.mean_p
    post = GaussianState(
        g.mean_x + g.s_xp / S * innov,
        g.mean_p + g.s_pp / S * innov,
        g.s_xx - g.s_xp**2 / S + HBAR**2 / (4 * sigma_p**2),
        g.s_xp * sigma_p**2 / S,
        g.s_pp * sigma_p**2 / S,
    )
    return y, post


def decorrelate(g):
    """Drop the x-p covariance (keeps both marginal variances)."""
    return GaussianState(g.mean_x, g.mean_p, g.s_xx, 0.0, g.s_pp)


def focus(g, t_gap, m):
    """Shear ``p -> p - kappa x`` so that ``s_xp = -m s_xx / t_gap``.

    The shear is symplectic, so the determinant is unchanged; free evolution
    over ``t_gap`` then brings the variance to ``t_gap^2 det / (m^2 s_xx)``.
    """
    kappa = (g.s_xp + m * g.s_xx / t_gap) / g.s_xx
    return GaussianState(
        g.mean_x,
        g.mean_p - kappa * g.mean_x,
        g.s_xx,
        g.s_xp - kappa * g.s_xx,
        g.s_pp - 2 * kappa * g.s_xp + kappa**2 * g.s_xx,
    )


def repeated_measurement_run(prep, t_gap, m, sigma_m, n_meas, seed, initial=None):
    """Alternate free evolution and measurement ``n_meas`` times.

    Preparations after each measurement:

    - ``naive``: correlations dropped, so every gap starts uncorrelated.
    - ``contractive``: a recorded focusing shear (see :func:`focus`).
    - ``momentum_qnd``: momentum is measured with resolution
      ``hbar / (2 sigma_m)`` instead of position.

    The default initial state is the uncorrelated minimum-uncertainty state
    with ``s_xx = sigma_m^2``, passed through the same preparation.
    """
    if prep not in PREPARATIONS:
        raise DomainError(f"unknown preparation {prep!r}; choose from {PREPARATIONS}")
    if int(n_meas) != n_meas or n_meas < 2:
        raise DomainError(f"n_meas must be an integer >= 2, got {n_meas}")
    if not (t_gap > 0 and sigma_m > 0):
        raise DomainError(f"need t_gap > 0 and sigma_m > 0, got t_gap={t_gap}, sigma_m={sigma_m}")
    _check_mass(m)
    g = initial if initial is not None else minimum_uncertainty_state(sigma_m**2)
    if prep == "naive":
        g = decorrelate(g)
    elif prep == "contractive":
        g = focus(g, t_gap, m)
    sql = sql_variance_bound(t_gap, m)
    times, outs, pre, post, pre_pp, controls = [], [], [], [], [], []
    for k in range(1, int(n_meas) + 1):
        g = free_evolve(g, t_gap, m)
        times.append(k * t_gap)
        pre.append(g.s_xx)
        pre_pp.append(g.s_pp)
        rng = trial_stream(int(seed), k, stream=_MEASURE_STREAM)
        if prep == "momentum_qnd":
            y, g = measure_momentum(g, HBAR / (2 * sigma_m), rng)
            controls.append("none")
        else:
            y, g = measure_position(g, sigma_m, rng)
            if prep == "naive":
                g = decorrelate(g)
                controls.append("decorrelate")
            else:
                g = focus(g, t_gap, m)
                controls.append("focus")
        outs.append(y)
        post.append(g.s_xx)
    n = len(times)
    return MeasurementRecord(
        times=np.array(times),
        outcomes=np.array(outs),
        pre_variances=np.array(pre),
        post_variances=np.array(post),
        sql_bound_values=np.full(n, sql),
        controls=tuple(controls),
        observable="p" if prep == "momentum_qnd" else "x",
        pre_momentum_variances=np.array(pre_pp),
    )


def random_gaussian_state(rng, log10_sxx=(-24.0, -14.0), max_excess_decades=3.0, boundary_fraction=0.1):
    """Random valid state for property tests.

    ``s_xx`` is log-uniform; ``s_pp`` is log-uniform between the Heisenberg
    floor ``hbar^2/(4 s_xx)`` and ``10**max_excess_decades`` times it; ``s_xp``
    is uniform in the allowed interval. A fraction of draws is pinned to the
    boundary ``det = hbar^2/4``.
    """
    s_xx = 10 ** rng.uniform(*log10_sxx)
    s_pp = HBAR**2 / (4 * s_xx) * 10 ** rng.uniform(0.0, max_excess_decades)
    room = math.sqrt(max(s_xx * s_pp - HBAR**2 / 4, 0.0))
    u = rng.choice([-1.0, 1.0]) if rng.random() < boundary_fraction else rng.uniform(-1.0, 1.0)
    return GaussianState(rng.normal(), rng.normal(), s_xx, u * room, s_pp)
