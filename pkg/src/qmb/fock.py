"""Truncated Fock-space states and observables for one and two bosonic modes.

All quantities are in natural units (hbar = 1). States are dense, immutable
amplitude arrays; constructors do **not** renormalize, so ``1 - norm`` is the
truncation leakage and is checked against ``EPS_TRUNC``.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError, InvariantError, ShapeError, TruncationError

EPS_TRUNC = 1e-8
HERMITIAN_TOL = 1e-12


def _frozen(a, dtype=np.complex128):
    a = np.array(a, dtype=dtype)
    a.flags.writeable = False
    return a


def log_factorials(nmax):
    """``log(n!)`` for n = 0..nmax via cumulative sums of logs."""
    out = np.zeros(nmax + 1)
    if nmax >= 1:
        out[1:] = np.cumsum(np.log(np.arange(1, nmax + 1, dtype=np.float64)))
    return out


def default_cutoff(mean_photons):
    """Cutoff heuristic ``ceil(N + 6 sqrt(N) + 10)`` for mean photon number N."""
    if mean_photons < 0:
        raise DomainError(f"mean photon number must be >= 0, got {mean_photons}")
    return int(math.ceil(mean_photons + 6.0 * math.sqrt(mean_photons) + 10.0))


@dataclass(frozen=True)
class FockVector:
    """Single-mode pure state over photon numbers ``0..cutoff``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes)
        if a.ndim != 1 or a.size == 0:
            raise ShapeError("FockVector amplitudes must be a non-empty 1-D array")
        object.__setattr__(self, "amplitudes", _frozen(a))

    @property
    def cutoff(self):
        return self.amplitudes.size - 1

    @property
    def norm_sq(self):
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    @property
    def leakage(self):
        return 1.0 - self.norm_sq

    @property
    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    def number_expectation(self):
        p = self.probabilities
        return float(np.dot(np.arange(p.size), p) / p.sum())


@dataclass(frozen=True)
class TwoModeState:
    """Two-mode pure state; ``amplitudes[n_a, n_b]`` with both indices in ``0..cutoff``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ShapeError(f"TwoModeState needs a square 2-D grid, got shape {a.shape}")
        object.__setattr__(self, "amplitudes", _frozen(a))

    @property
    def cutoff(self):
        return self.amplitudes.shape[0] - 1

    @property
    def norm_sq(self):
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    @property
    def leakage(self):
        return 1.0 - self.norm_sq

    def photon_numbers(self):
        """Mean photon numbers ``(<n_a>, <n_b>)`` of the normalized state."""
        p = np.abs(self.amplitudes) ** 2
        n = np.arange(p.shape[0])
        tot = p.sum()
        return float(n @ p.sum(axis=1) / tot), float(n @ p.sum(axis=0) / tot)

    def total_number_expectation(self):
        na, nb = self.photon_numbers()
        return na + nb


@dataclass(frozen=True)
class Observable:
    """Hermitian operator in the occupation basis of one mode or two modes.

    For ``mode_arity == 2`` the matrix acts on the flattened (row-major)
    ``(n_a, n_b)`` grid, i.e. index ``n_a * (cutoff + 1) + n_b``.
    """

    matrix: np.ndarray
    mode_arity: int = 1

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"observable matrix must be square, got {m.shape}")
        if self.mode_arity not in (1, 2):
            raise ShapeError(f"mode_arity must be 1 or 2, got {self.mode_arity}")
        if self.mode_arity == 2:
            d = math.isqrt(m.shape[0])
            if d * d != m.shape[0]:
                raise ShapeError("two-mode observable dimension must be a perfect square")
        if not np.allclose(m, m.conj().T, rtol=0.0, atol=HERMITIAN_TOL):
            raise InvariantError("observable matrix is not Hermitian")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def cutoff(self):
        d = self.matrix.shape[0]
        return (d if self.mode_arity == 1 else math.isqrt(d)) - 1


def _check_leakage(amps, eps, what):
    leak = 1.0 - float(np.sum(np.abs(amps) ** 2))
    if leak >= eps:
        raise TruncationError(
            f"{what}: truncation leakage {leak:.3e} >= {eps:.1e} at cutoff {amps.size - 1}; raise the cutoff"
        )


def coherent_state(alpha, cutoff=None, eps=EPS_TRUNC):
    """Coherent state ``|alpha>`` truncated at ``cutoff``.

    ``amplitude_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!)``; no renormalization.
    The default cutoff follows ``default_cutoff(|alpha|^2)``.

    Raises:
        TruncationError: if the discarded tail weight is ``>= eps``.
    """
    alpha = complex(alpha)
    nbar = abs(alpha) ** 2
    if cutoff is None:
        cutoff = default_cutoff(nbar)
    if cutoff < 0:
        raise DomainError("cutoff must be >= 0")
    n = np.arange(cutoff + 1)
    amps = np.zeros(cutoff + 1, dtype=np.complex128)
    if nbar == 0.0:
        amps[0] = 1.0
    else:
        logmag = -0.5 * nbar + n * math.log(abs(alpha)) - 0.5 * log_factorials(cutoff)
        amps = np.exp(logmag) * np.exp(1j * n * np.angle(alpha))
    _check_leakage(amps, eps, f"coherent_state(|alpha|^2={nbar:g})")
    return FockVector(amps)


def _squeezed_log_probs(r, npairs):
    k = np.arange(npairs + 1)
    lf = log_factorials(2 * npairs)
    t = math.tanh(r)
    logt = math.log(t) if t > 0 else -np.inf
    with np.errstate(invalid="ignore"):
        lp = -math.log(math.cosh(r)) + 2 * k * logt + lf[2 * k] - 2 * k * math.log(2.0) - 2 * lf[k]
    if t == 0:
        lp[1:] = -np.inf
        lp[0] = 0.0
    return lp


def squeezed_cutoff(r, eps=EPS_TRUNC):
    """Smallest even cutoff at which squeezed vacuum leaks less than ``eps``.

    Squeezed vacuum has a geometric tail (ratio ``tanh^2 r``), far heavier than
    the Poisson tail the ``default_cutoff`` heuristic is built for, so its
    cutoff is computed from the photon-number distribution directly.
    """
    if r < 0:
        raise DomainError(f"squeeze magnitude must be >= 0, got {r}")
    if r == 0:
        return 0
    npairs = 16
    while True:
        p = np.exp(_squeezed_log_probs(r, npairs))
        tail = 1.0 - np.cumsum(p)
        ok = np.nonzero(tail < eps * 0.5)[0]
        if ok.size:
            return int(2 * ok[0])
        npairs *= 2


def squeezed_vacuum(r, theta=0.0, cutoff=None, eps=EPS_TRUNC):
    """Squeezed vacuum ``S(r e^{i theta})|0>``.

    ``amplitude_{2n} = sech(r)^{1/2} (-e^{i theta} tanh r)^n sqrt((2n)!) / (2^n n!)``,
    odd amplitudes exactly zero. With ``theta = 0`` the ``a + a^dag`` quadrature
    is squeezed.
    """
    if r < 0:
        raise DomainError(f"squeeze magnitude must be >= 0, got {r}")
    if cutoff is None:
        cutoff = max(default_cutoff(math.sinh(r) ** 2), squeezed_cutoff(r, eps))
    amps = np.zeros(cutoff + 1, dtype=np.complex128)
    npairs = cutoff // 2
    lp = _squeezed_log_probs(r, npairs)
    k = np.arange(npairs + 1)
    amps[0::2] = np.exp(0.5 * lp) * (-np.exp(1j * theta)) ** k
    _check_leakage(amps, eps, f"squeezed_vacuum(r={r:g})")
    return FockVector(amps)


def fock_state(n, cutoff):
    """Number state ``|n>``."""
    if n < 0 or n > cutoff:
        raise DomainError(f"photon number {n} outside 0..{cutoff}")
    amps = np.zeros(cutoff + 1, dtype=np.complex128)
    amps[n] = 1.0
    return FockVector(amps)


def tensor(sa, sb):
    """Product state ``sa (x) sb`` on modes a, b (equal cutoffs required)."""
    if sa.cutoff != sb.cutoff:
        raise ShapeError(f"cutoff mismatch: {sa.cutoff} vs {sb.cutoff}")
    return TwoModeState(np.outer(sa.amplitudes, sb.amplitudes))


def pad_cutoff(state, cutoff):
    """Embed a state in a larger truncated space (zero padding)."""
    if cutoff < state.cutoff:
        raise ShapeError(f"cannot shrink cutoff {state.cutoff} to {cutoff}")
    if isinstance(state, FockVector):
        a = np.zeros(cutoff + 1, dtype=np.complex128)
        a[: state.cutoff + 1] = state.amplitudes
        return FockVector(a)
    a = np.zeros((cutoff + 1, cutoff + 1), dtype=np.complex128)
    a[: state.cutoff + 1, : state.cutoff + 1] = state.amplitudes
    return TwoModeState(a)


# -- observables ---------------------------------------------------------------


def number_operator(cutoff):
    return Observable(np.diag(np.arange(cutoff + 1, dtype=np.complex128)), 1)


def annihilation(cutoff):
    """Matrix of ``a`` (not an Observable: it is not Hermitian)."""
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=np.float64)), k=1).astype(np.complex128)


def two_mode_operator(kind, cutoff, phi=0.0):
    """Dense two-mode observables on the ``(cutoff+1)^2`` grid.

    ``kind`` is one of ``"n_a"``, ``"n_b"``, ``"n_total"``, ``"j"``
    (``a^dag a - b^dag b``), ``"k"`` (``a^dag b + b^dag a``) or ``"m"``
    (``j cos phi + k sin phi``). Products that would leave the grid are
    truncated.
    """
    d = cutoff + 1
    eye = np.eye(d, dtype=np.complex128)
    a = annihilation(cutoff)
    n = a.conj().T @ a
    na, nb = np.kron(n, eye), np.kron(eye, n)
    if kind == "n_a":
        m = na
    elif kind == "n_b":
        m = nb
    elif kind == "n_total":
        m = na + nb
    else:
        j = na - nb
        hop = np.kron(a.conj().T, a)
        k = hop + hop.conj().T
        if kind == "j":
            m = j
        elif kind == "k":
            m = k
        elif kind == "m":
            m = j * math.cos(phi) + k * math.sin(phi)
        else:
            raise DomainError(f"unknown two-mode operator {kind!r}")
    return Observable(m, 2)


def expectation_and_variance(obs, state):
    """``(<O>, <O^2> - <O>^2)`` for the normalized state.

    Truncated states are renormalized for the statistics. The variance is
    evaluated as ``||(O - <O>) psi||^2`` so it cannot lose precision through
    cancellation.
    """
    if isinstance(state, FockVector):
        if obs.mode_arity != 1:
            raise ShapeError("two-mode observable applied to a single-mode state")
        psi = state.amplitudes
    elif isinstance(state, TwoModeState):
        if obs.mode_arity != 2:
            raise ShapeError("single-mode observable applied to a two-mode state")
        psi = state.amplitudes.ravel()
    else:
        raise ShapeError(f"unsupported state type {type(state).__name__}")
    if obs.matrix.shape[0] != psi.size:
        raise ShapeError(f"observable dimension {obs.matrix.shape[0]} != state dimension {psi.size}")
    nrm = float(np.vdot(psi, psi).real)
    opsi = obs.matrix @ psi
    mean_c = np.vdot(psi, opsi) / nrm
    if abs(mean_c.imag) > 1e-10 * max(1.0, abs(mean_c.real)):
        raise InvariantError(f"expectation value not real: {mean_c}")
    mean = float(mean_c.real)
    resid = opsi - mean * psi
    var = float(np.vdot(resid, resid).real / nrm)
    return mean, var
