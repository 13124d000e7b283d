"""Qubit phase estimation: Ramsey vs GHZ probes, frequency standards, Pauli discrimination."""

from dataclasses import dataclass
import math

import numpy as np

from .errors import ConsistencyError, DomainError
from .rng import MonteCarloPlan, trial_stream
from .scaling import EstimationResult, ScalingFit, check_resource_list, fit_power_law

REGISTER_CHECK_MAX = 12
REGISTER_TOL = 1e-12
DEGENERATE_SLOPE = 1e-6
GHZ_PHI_SCALE = 0.4
PHASE_STRATEGIES = ("independent", "ghz")
CHANNELS = ("I", "X", "Y", "Z")

PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


@dataclass(frozen=True)
class QubitRegister:
    """Pure state of ``n`` qubits; index bit ``n-1-k`` is qubit ``k`` (big-endian)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=np.complex128)
        n = a.size.bit_length() - 1
        if a.ndim != 1 or a.size != 1 << n or n < 1:
            raise DomainError(f"register length must be 2**n with n >= 1, got {a.size}")
        if abs(np.vdot(a, a).real - 1.0) > 1e-12:
            raise DomainError("register is not normalized")
        a.flags.writeable = False
        object.__setattr__(self, "amplitudes", a)

    @property
    def n(self):
        return self.amplitudes.size.bit_length() - 1


def _popcounts(n):
    idx = np.arange(1 << n)
    return np.array([bin(i).count("1") for i in idx])


def plus_register(n):
    return QubitRegister(np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128))


def ghz_register(n):
    a = np.zeros(1 << n, dtype=np.complex128)
    a[0] = a[-1] = 1 / math.sqrt(2)
    return QubitRegister(a)


def apply_phase(reg, phi):
    """Free evolution ``|1> -> e^{i phi}|1>`` on every qubit."""
    return QubitRegister(reg.amplitudes * np.exp(1j * phi * _popcounts(reg.n)))


def return_probability(reg_in, reg_out):
    return float(abs(np.vdot(reg_in.amplitudes, reg_out.amplitudes)) ** 2)


def ramsey_probability(phi):
    """Probability that ``(|0> + e^{i phi}|1>)/sqrt(2)`` is found in the input state."""
    return math.cos(phi / 2) ** 2


def ghz_probability(N, phi, cross_check=True):
    """Return probability ``cos^2(N phi / 2)`` of an N-qubit GHZ probe.

    For ``N <= 12`` (and ``cross_check``) the value is compared against an
    explicit 2**N-amplitude simulation.

    Raises:
        ConsistencyError: if the register simulation disagrees beyond 1e-12.
    """
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    q = math.cos(N * phi / 2) ** 2
    if cross_check and N <= REGISTER_CHECK_MAX:
        reg = ghz_register(N)
        q_reg = return_probability(reg, apply_phase(reg, phi))
        if abs(q - q_reg) > REGISTER_TOL:
            raise ConsistencyError(f"GHZ law {q!r} vs register simulation {q_reg!r} at N={N}, phi={phi}")
    return q


def frequency_error(N, t, strategy):
    """Frequency uncertainty after interrogation time ``t`` with N ions.

    ``independent``: ``1/(sqrt(N) t)``; ``entangled``: ``1/(N t)``.
    """
    if N < 1 or not t > 0:
        raise DomainError(f"need N >= 1 and t > 0, got N={N}, t={t}")
    if strategy == "independent":
        return 1.0 / (math.sqrt(N) * t)
    if strategy == "entangled":
        return 1.0 / (N * t)
    raise DomainError(f"unknown frequency-standard strategy {strategy!r}")


# -- Monte Carlo phase estimation ---------------------------------------------------


def _phase_multiplier(strategy, N):
    if strategy == "independent":
        return 1
    if strategy == "ghz":
        return N
    raise DomainError(f"unknown phase strategy {strategy!r}; choose from {PHASE_STRATEGIES}")


def default_true_phi(strategy, N):
    """Operating point: ``pi/2`` for independent qubits, ``0.4/N`` for GHZ (one fringe)."""
    return math.pi / 2 if strategy == "independent" else GHZ_PHI_SCALE / N


def invert_fringe(prob, multiplier, ref_phi):
    """Invert ``cos^2(multiplier * phi / 2)`` on the monotone branch containing ``ref_phi``."""
    prob = np.clip(np.asarray(prob, dtype=np.float64), 0.0, 1.0)
    branch = math.floor(multiplier * ref_phi / math.pi)
    if branch % 2 == 0:
        u = 2.0 * np.arccos(np.sqrt(prob))
    else:
        u = 2.0 * np.arcsin(np.sqrt(prob))
    return (branch * math.pi + u) / multiplier


def estimate_phase_mc(N, strategy, plan, repetitions=1):
    """RMSE of the fringe-inversion estimator over ``plan.trials`` trials.

    Resource accounting is fixed at ``repetitions * N`` qubit-uses per trial:
    the independent strategy measures ``repetitions * N`` unentangled qubits
    once each; the GHZ strategy prepares ``repetitions`` N-qubit GHZ states.
    Trial ``t`` draws from ``trial_stream(plan.seed, t, stream=N)``, so at
    ``N = 1`` both strategies consume identical random numbers.

    Results at points where the fringe slope is below ``1e-6`` are returned
    with ``flagged=True``.
    """
    if N < 1 or repetitions < 1:
        raise DomainError(f"need N >= 1 and repetitions >= 1, got N={N}, repetitions={repetitions}")
    mult = _phase_multiplier(strategy, N)
    phi = plan.true_phi
    prob = math.cos(mult * phi / 2) ** 2
    slope = abs(mult * math.sin(mult * phi)) / 2
    draws = repetitions * N if strategy == "independent" else repetitions
    counts = np.empty(plan.trials, dtype=np.int64)
    for t in range(plan.trials):
        counts[t] = trial_stream(plan.seed, t, stream=N).binomial(draws, prob)
    est = invert_fringe(counts / draws, mult, phi)
    err = est - phi
    rmse = math.sqrt(math.fsum(err * err) / plan.trials)
    return EstimationResult(
        strategy=strategy,
        N=int(N),
        true_value=phi,
        trials=plan.trials,
        mean_estimate=math.fsum(est) / plan.trials,
        rmse=rmse,
        flagged=slope < DEGENERATE_SLOPE,
        extra={"repetitions": repetitions},
    )


def phase_scaling_experiment(strategy, N_list, trials=2000, seed=0, repetitions=1, true_phi=None):
    """RMSE vs N for one strategy; flagged points are excluded from the fit."""
    ns = check_resource_list(N_list, min_decades=1.0)
    rows = []
    for n in ns:
        phi = default_true_phi(strategy, n) if true_phi is None else true_phi
        rows.append(estimate_phase_mc(n, strategy, MonteCarloPlan(trials, seed, phi), repetitions))
    good = [r for r in rows if not r.flagged]
    fit = fit_power_law([r.N for r in good], [r.rmse for r in good], strategy)
    return ScalingFit(fit.exponent, fit.intercept, fit.residual, tuple(rows), strategy)


# -- Pauli channel discrimination ---------------------------------------------------

_S2 = 1 / math.sqrt(2)
BELL_BASIS = np.array(
    [
        [_S2, 0, 0, _S2],  # Phi+  <- I
        [0, _S2, _S2, 0],  # Psi+  <- X
        [0, _S2, -_S2, 0],  # Psi-  <- Y (up to phase)
        [_S2, 0, 0, -_S2],  # Phi-  <- Z
    ],
    dtype=np.complex128,
)


@dataclass(frozen=True)
class SingleProbe:
    """Unentangled probe: one qubit ``state`` measured in the orthonormal basis
    given by the columns of ``basis``."""

    state: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.state, dtype=np.complex128)
        b = np.asarray(self.basis, dtype=np.complex128)
        if s.shape != (2,) or b.shape != (2, 2):
            raise DomainError("single probe needs a 2-vector state and a 2x2 basis")
        if abs(np.vdot(s, s).real - 1) > 1e-10 or not np.allclose(b.conj().T @ b, np.eye(2), atol=1e-10):
            raise DomainError("probe state must be normalized and basis orthonormal")
        object.__setattr__(self, "state", s)
        object.__setattr__(self, "basis", b)


BELL = "bell"


def likelihoods(probe):
    """Table ``L[outcome, channel]`` of outcome probabilities (channels in I, X, Y, Z order)."""
    if isinstance(probe, str) and probe == BELL:
        phi_plus = BELL_BASIS[0]
        cols = [np.kron(np.eye(2), PAULI[c]) @ phi_plus for c in CHANNELS]
        table = np.abs(BELL_BASIS.conj() @ np.stack(cols, axis=1)) ** 2
    elif isinstance(probe, SingleProbe):
        cols = [PAULI[c] @ probe.state for c in CHANNELS]
        table = np.abs(probe.basis.conj().T @ np.stack(cols, axis=1)) ** 2
    else:
        raise DomainError(f"unknown probe {probe!r}")
    table[table < 1e-15] = 0.0
    return table / table.sum(axis=0, keepdims=True)


def ml_decisions(table):
    """Maximum-likelihood channel guess per outcome (ties go to the first channel)."""
    return np.argmax(table, axis=1)


def ml_success_probability(probe):
    """Exact success probability of the ML rule under uniform channel priors."""
    table = likelihoods(probe)
    return float(table.max(axis=1).sum() / len(CHANNELS))


def pauli_discriminate(probe, channel, plan):
    """Empirical rate at which the ML rule identifies ``channel`` over ``plan.trials`` runs."""
    if channel not in CHANNELS:
        raise DomainError(f"channel must be one of {CHANNELS}, got {channel!r}")
    table = likelihoods(probe)
    decide = ml_decisions(table)
    ci = CHANNELS.index(channel)
    p = table[:, ci]
    hits = 0
    for t in range(plan.trials):
        outcome = trial_stream(plan.seed, t, stream=ci).choice(p.size, p=p)
        hits += int(decide[outcome] == ci)
    return hits / plan.trials


def average_success(probe, plan):
    """Mean of :func:`pauli_discriminate` over the four channels (uniform priors)."""
    return sum(pauli_discriminate(probe, c, plan) for c in CHANNELS) / len(CHANNELS)


def random_single_probe(rng):
    """Haar-random probe state and measurement basis."""
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))[None, :]
    return SingleProbe(v / np.linalg.norm(v), q)
