"""Mach-Zehnder interferometer on truncated two-mode Fock states.

Mode conventions (annihilation operators, Heisenberg picture)::

    a' = (a + i b) / sqrt(2)          b' = (i a + b) / sqrt(2)
    c  = (a' + i e^{i phi} b') / sqrt(2)
    d  = (i a' + e^{i phi} b') / sqrt(2)

In the Schrodinger picture the 50:50 splitter is ``exp(i pi/4 K)`` with
``K = a^dag b + b^dag a`` and the internal phase is ``exp(i phi b^dag b)``.
The readout is the photon-number difference ``M = d^dag d - c^dag c``, which
in the input basis equals ``J cos(phi) + K sin(phi)`` with
``J = a^dag a - b^dag b``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import kernels
from .errors import ConsistencyError, DegenerateOperatingPointError, DomainError
from .fock import (
    EPS_TRUNC,
    TwoModeState,
    coherent_state,
    default_cutoff,
    fock_state,
    squeezed_cutoff,
    squeezed_vacuum,
    tensor,
)
from .scaling import ScalingFit, check_resource_list, fit_power_law

BS_ANGLE = math.pi / 4
DERIVATIVE_FLOOR = 1e-9
FD_STEP = 1e-5
ROUTE_TOL = 1e-10
ENTANGLED_PHI_OP = 1e-3

STRATEGIES = ("coherent", "coherent+squeezed", "entangled")
_ALIASES = {
    "squeezed": "coherent+squeezed",
    "coherent_squeezed": "coherent+squeezed",
    "coherent+squeezed_port_B": "coherent+squeezed",
}


@dataclass(frozen=True)
class MzConfig:
    phi: float = 0.0
    fd_step: float = FD_STEP
    cutoff: int | None = None

    def __post_init__(self):
        if not self.fd_step > 0:
            raise DomainError(f"fd_step must be > 0, got {self.fd_step}")


@dataclass(frozen=True)
class PhaseSensitivity:
    phi: float
    mean_M: float
    var_M: float
    delta_phi: float
    slope: float


@dataclass(frozen=True)
class ScalingConfig:
    """Knobs for :func:`scaling_experiment`.

    The squeezed-port strategy splits the N photons into ``(1-f) N`` coherent
    and ``f N = sinh^2 r`` squeezed, sweeping ``f`` over ``squeeze_points``
    values in ``[0, squeeze_max_fraction]``. Grid points whose Fock cutoff
    would exceed ``max_cutoff`` are skipped.
    """

    fd_step: float = FD_STEP
    eps_trunc: float = EPS_TRUNC
    squeeze_points: int = 33
    squeeze_max_fraction: float = 0.25
    max_cutoff: int = 400
    cross_check: bool = True


@dataclass(frozen=True)
class ScalingRow:
    strategy: str
    N: int
    phi_op: float
    mean_M: float
    var_M: float
    delta_phi: float
    extra: dict = field(default_factory=dict)


# -- transforms -----------------------------------------------------------------


def beam_splitter(state):
    """50:50 splitter; output grid sized to hold every occupied photon block."""
    return TwoModeState(kernels.exp_hop_blocks(state.amplitudes, BS_ANGLE))


def mach_zehnder(state_in, phi):
    """Full interferometer: splitter, phase ``phi`` on path B', splitter.

    The returned grid is indexed ``[n_c, n_d]``.
    """
    g = kernels.exp_hop_blocks(state_in.amplitudes, BS_ANGLE)
    g = g * np.exp(1j * phi * np.arange(g.shape[1]))[None, :]
    g = kernels.exp_hop_blocks(g, BS_ANGLE, n_out=g.shape[0] - 1)
    return TwoModeState(g)


def entangled_input(N, cutoff=None):
    """``(|N+>_A |N->_B + |N->_A |N+>_B) / sqrt(2)`` with ``N+- = (N +- 1)/2``."""
    if N < 1 or N % 2 == 0:
        raise DomainError(f"entangled input needs odd N >= 1 (so (N+-1)/2 are integers), got {N}")
    n_plus, n_minus = (N + 1) // 2, (N - 1) // 2
    if cutoff is None:
        cutoff = n_plus
    if cutoff < n_plus:
        raise DomainError(f"cutoff {cutoff} below N+ = {n_plus}")
    g = np.zeros((cutoff + 1, cutoff + 1), dtype=np.complex128)
    g[n_plus, n_minus] += 1 / math.sqrt(2)
    g[n_minus, n_plus] += 1 / math.sqrt(2)
    return TwoModeState(g)


# -- readout --------------------------------------------------------------------


def m_statistics_input_basis(state, phi):
    """Mean and variance of ``J cos(phi) + K sin(phi)`` evaluated on the input state."""
    psi = state.amplitudes
    d = psi.shape[0]
    pad = np.zeros((d + 1, d + 1), dtype=np.complex128)
    pad[:d, :d] = psi
    diff = np.subtract.outer(np.arange(d + 1), np.arange(d + 1)).astype(np.float64)
    mpsi = math.cos(phi) * diff * pad + math.sin(phi) * kernels.hop_grid(np.ascontiguousarray(psi))
    nrm = float(np.vdot(pad, pad).real)
    mean = float(np.vdot(pad, mpsi).real) / nrm
    resid = mpsi - mean * pad
    var = float(np.vdot(resid, resid).real) / nrm
    return mean, var


def m_statistics_output_basis(state, phi):
    """Mean and variance of ``d^dag d - c^dag c`` after propagating through the interferometer."""
    out = mach_zehnder(state, phi).amplitudes
    p = np.abs(out) ** 2
    n = np.arange(p.shape[0], dtype=np.float64)
    m = n[None, :] - n[:, None]  # n_d - n_c; rows index n_c
    tot = p.sum()
    mean = float((p * m).sum() / tot)
    var = float((p * (m - mean) ** 2).sum() / tot)
    return mean, var


def m_statistics(state_in, phi, cross_check=True, tol=ROUTE_TOL):
    """Mean and variance of the output photon-number difference ``M``.

    Computed in the input basis; with ``cross_check`` the state is also
    propagated through :func:`mach_zehnder` and ``d^dag d - c^dag c`` is
    measured on the output. The two routes must agree to ``tol`` (relative to
    ``max(1, |value|)``).

    Raises:
        ConsistencyError: if the routes disagree.
    """
    mean, var = m_statistics_input_basis(state_in, phi)
    if cross_check:
        mean_o, var_o = m_statistics_output_basis(state_in, phi)
        if abs(mean - mean_o) > tol * max(1.0, abs(mean)) or abs(var - var_o) > tol * max(1.0, abs(var)):
            raise ConsistencyError(
                f"M statistics disagree between routes at phi={phi}: "
                f"input ({mean!r}, {var!r}) vs output ({mean_o!r}, {var_o!r})"
            )
    return mean, var


def entangled_m_moments(N, phi):
    """Exact ``(<M>, Var M)`` for :func:`entangled_input` from the operator algebra.

    ``<K> = N+`` on this state, so ``<M> = +N+ sin(phi)``;
    ``Var M = cos(2 phi) + N+^2 sin^2(phi)``.
    """
    n_plus = (N + 1) / 2
    return n_plus * math.sin(phi), math.cos(2 * phi) + n_plus**2 * math.sin(phi) ** 2


def entangled_m_reference(N, phi):
    """Closed forms as usually quoted: ``<M> = -N+ sin(phi)``, ``Var M = cos 2phi + N+^2 sin^2 phi``.

    The quoted mean carries the opposite sign to :func:`entangled_m_moments`
    for the conventions used in this module; it is kept verbatim so that
    comparisons against it are not silently adjusted.
    """
    n_plus = (N + 1) / 2
    return -n_plus * math.sin(phi), math.cos(2 * phi) + n_plus**2 * math.sin(phi) ** 2


def phase_error(state_in, phi, fd_step=FD_STEP, floor=DERIVATIVE_FLOOR, cross_check=False):
    """Error-propagation phase uncertainty ``sqrt(Var M) / |d<M>/dphi|``.

    The slope is a central finite difference of ``<M>`` with step ``fd_step``.

    Raises:
        DegenerateOperatingPointError: if ``|d<M>/dphi| <= floor``.
    """
    if not fd_step > 0:
        raise DomainError(f"fd_step must be > 0, got {fd_step}")
    mean, var = m_statistics(state_in, phi, cross_check=cross_check)
    up, _ = m_statistics_input_basis(state_in, phi + fd_step)
    dn, _ = m_statistics_input_basis(state_in, phi - fd_step)
    slope = (up - dn) / (2 * fd_step)
    if not abs(slope) > floor:
        raise DegenerateOperatingPointError(
            f"d<M>/dphi = {slope:.3e} at phi = {phi}: operating point carries no phase information"
        )
    return PhaseSensitivity(phi, mean, var, math.sqrt(max(var, 0.0)) / abs(slope), slope)


# -- scaling experiments ------------------------------------------------------------


def normalize_strategy(name):
    name = _ALIASES.get(name, name)
    if name not in STRATEGIES:
        raise DomainError(f"unknown interferometer strategy {name!r}; choose from {STRATEGIES}")
    return name


def default_phi_op(strategy):
    return ENTANGLED_PHI_OP if normalize_strategy(strategy) == "entangled" else math.pi / 2


def coherent_input(N, cutoff=None, eps=EPS_TRUNC):
    """Coherent beam with mean photon number N at A, vacuum at B."""
    cutoff = default_cutoff(N) if cutoff is None else cutoff
    return tensor(coherent_state(math.sqrt(N), cutoff, eps), fock_state(0, cutoff))


def squeezed_port_input(N, fraction, eps=EPS_TRUNC, max_cutoff=None):
    """Coherent light at A plus squeezed vacuum at B sharing N mean photons.

    ``fraction`` of the photons go into the squeezed vacuum. Returns ``None``
    when the required cutoff exceeds ``max_cutoff``.
    """
    coh = (1.0 - fraction) * N
    r = math.asinh(math.sqrt(fraction * N))
    cutoff = max(default_cutoff(coh), squeezed_cutoff(r, eps))
    if max_cutoff is not None and cutoff > max_cutoff:
        return None
    return tensor(coherent_state(math.sqrt(coh), cutoff, eps), squeezed_vacuum(r, 0.0, cutoff, eps))


def _squeezed_point(N, phi_op, config):
    best = None
    skipped = 0
    for f in np.linspace(0.0, config.squeeze_max_fraction, config.squeeze_points):
        state = squeezed_port_input(N, float(f), config.eps_trunc, config.max_cutoff)
        if state is None:
            skipped += 1
            continue
        sens = phase_error(state, phi_op, config.fd_step)
        if best is None or sens.delta_phi < best[1].delta_phi:
            best = (float(f), sens, state)
    if best is None:
        raise DomainError(f"no squeezing fraction fits max_cutoff={config.max_cutoff} at N={N}")
    f, sens, state = best
    if config.cross_check:
        m_statistics(state, phi_op, cross_check=True)
    return sens, {"squeeze_fraction": f, "cutoff": state.cutoff, "grid_skipped": skipped}


def scaling_point(strategy, N, phi_op=None, config=None):
    """Phase sensitivity of one strategy at resource count N."""
    strategy = normalize_strategy(strategy)
    config = config or ScalingConfig()
    phi_op = default_phi_op(strategy) if phi_op is None else phi_op
    if strategy == "coherent+squeezed":
        sens, extra = _squeezed_point(N, phi_op, config)
    else:
        state = entangled_input(N) if strategy == "entangled" else coherent_input(N, eps=config.eps_trunc)
        sens = phase_error(state, phi_op, config.fd_step, cross_check=config.cross_check)
        extra = {"cutoff": state.cutoff}
    return ScalingRow(strategy, int(N), phi_op, sens.mean_M, sens.var_M, sens.delta_phi, extra)


def scaling_experiment(strategy, N_list, phi_op=None, config=None):
    """Fit ``log(delta_phi)`` against ``log(N)`` for one input-state family.

    Strategies: ``"coherent"`` (coherent beam at A, vacuum at B),
    ``"coherent+squeezed"`` (squeezed vacuum at B, best split of N photons
    from a grid search) and ``"entangled"`` (the twin-Fock superposition of
    :func:`entangled_input`, odd N only). Points are evaluated in ascending N.
    """
    strategy = normalize_strategy(strategy)
    ns = check_resource_list(N_list)
    if strategy == "entangled" and any(n % 2 == 0 for n in ns):
        raise DomainError("entangled strategy requires odd N")
    rows = tuple(scaling_point(strategy, n, phi_op, config) for n in ns)
    fit = fit_power_law([r.N for r in rows], [r.delta_phi for r in rows], strategy)
    return ScalingFit(fit.exponent, fit.intercept, fit.residual, rows, strategy)
