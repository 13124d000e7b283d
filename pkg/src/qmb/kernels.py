"""Hot numeric kernels for two-mode Fock grids.

Every kernel exists twice: a loop version compiled with numba ``@njit`` and a
vectorized pure-numpy version. The public names (``hop_grid``,
``exp_hop_blocks``, ``bessel_j_sequence``) dispatch to one of them once, at
import time:

* ``QMB_DISABLE_NUMBA=1`` in the environment forces the numpy path;
* if numba cannot be imported the numpy path is used silently.

Both paths implement the same algorithms, so they agree to rounding error;
``benchmarks/bench_kernels.py`` times them against each other.

Grid convention: ``psi[i, j]`` is the amplitude of ``|i>_a |j>_b``. The
hopping operator is ``K = a^dag b + b^dag a``; it conserves ``i + j`` and is
a symmetric tridiagonal matrix inside each total-photon-number block.
"""

import os

import numpy as np
from scipy import special

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_DISABLED = os.environ.get("QMB_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")
USE_NUMBA = numba is not None and not _DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"


def chebyshev_order(x):
    """Number of Chebyshev terms needed for exp(i x y), |y| <= 1, to reach double precision."""
    x = abs(x)
    if x == 0.0:
        return 0
    return int(np.ceil(x + 12.0 * x ** (1.0 / 3.0) + 40.0))


# ----------------------------------------------------------------------------
# numpy reference implementations
# ----------------------------------------------------------------------------


def bessel_j_sequence_numpy(x, kmax):
    return special.jv(np.arange(kmax + 1), x)


def hop_grid_numpy(psi):
    d = psi.shape[0]
    out = np.zeros((d + 1, d + 1), dtype=np.complex128)
    if d < 2:
        return out
    sq = np.sqrt(np.arange(d + 1, dtype=np.float64))
    out[1 : d + 1, 0 : d - 1] += sq[1 : d + 1, None] * sq[None, 1:d] * psi[0:d, 1:d]
    out[0 : d - 1, 1 : d + 1] += sq[1:d, None] * sq[None, 1 : d + 1] * psi[1:d, 0:d]
    return out


def _cheb_block_numpy(v, theta, n):
    if n == 0 or theta == 0.0:
        return v.copy()
    x = theta * n
    order = chebyshev_order(x)
    k = np.arange(order + 1)
    coefs = special.jv(k, x) * (1j) ** k
    coefs[1:] *= 2.0
    lam = float(n)
    s = np.sqrt((np.arange(n) + 1.0) * (n - np.arange(n))) / lam

    def apply(u):
        y = np.zeros_like(u)
        y[1:] += s * u[:-1]
        y[:-1] += s * u[1:]
        return y

    t0 = v.copy()
    t1 = apply(t0)
    acc = coefs[0] * t0 + coefs[1] * t1
    for c in coefs[2:]:
        t2 = 2.0 * apply(t1) - t0
        acc += c * t2
        t0, t1 = t1, t2
    return acc


def exp_hop_blocks_numpy(psi, theta, n_out, active):
    d = psi.shape[0]
    out = np.zeros((n_out + 1, n_out + 1), dtype=np.complex128)
    for n in range(n_out + 1):
        if not active[n]:
            continue
        lo, hi = max(0, n - d + 1), min(n, d - 1)
        v = np.zeros(n + 1, dtype=np.complex128)
        k = np.arange(lo, hi + 1)
        v[k] = psi[k, n - k]
        w = _cheb_block_numpy(v, theta, n)
        kk = np.arange(n + 1)
        out[kk, n - kk] = w
    return out


# ----------------------------------------------------------------------------
# numba implementations
# ----------------------------------------------------------------------------

if numba is not None:

    @numba.njit(cache=True)
    def bessel_j_sequence_numba(x, kmax):
        # Miller's downward recurrence, normalized by J0 + 2 sum J_2k = 1
        out = np.zeros(kmax + 1)
        if x == 0.0:
            out[0] = 1.0
            return out
        if x < 0.0:
            # J_k(-x) = (-1)^k J_k(x)
            out = bessel_j_sequence_numba(-x, kmax)
            for m in range(1, kmax + 1, 2):
                out[m] = -out[m]
            return out
        if x < 1.0:
            # power series; the downward recurrence overflows for tiny x
            h = 0.5 * x
            lead = 1.0  # (x/2)^k / k!
            for k in range(kmax + 1):
                if k > 0:
                    lead *= h / k
                if lead == 0.0:
                    break
                term = lead
                acc = term
                for m in range(1, 30):
                    term *= -h * h / (m * (m + k))
                    acc += term
                    if abs(term) < 1e-17 * abs(acc):
                        break
                out[k] = acc
            return out
        top = max(kmax, int(x)) + 60 + int(12.0 * max(kmax, x) ** (1.0 / 3.0))
        if top % 2 == 1:
            top += 1
        jk1 = 0.0
        jk = 1e-300
        total = 0.0
        for k in range(top, 0, -1):
            if k <= kmax:
                out[k] = jk
            if k % 2 == 0:
                total += 2.0 * jk
            jkm1 = (2.0 * k / x) * jk - jk1
            jk1 = jk
            jk = jkm1
            if abs(jk) > 1e200:
                jk *= 1e-200
                jk1 *= 1e-200
                total *= 1e-200
                for m in range(k, kmax + 1):
                    out[m] *= 1e-200
        out[0] = jk
        total += jk
        for m in range(kmax + 1):
            out[m] /= total
        return out

    @numba.njit(cache=True)
    def hop_grid_numba(psi):
        d = psi.shape[0]
        out = np.zeros((d + 1, d + 1), dtype=np.complex128)
        sq = np.sqrt(np.arange(d + 1).astype(np.float64))
        for i in range(d + 1):
            for j in range(d + 1):
                v = 0j
                if i >= 1 and j + 1 <= d - 1:
                    v += sq[i] * sq[j + 1] * psi[i - 1, j + 1]
                if j >= 1 and i + 1 <= d - 1:
                    v += sq[i + 1] * sq[j] * psi[i + 1, j - 1]
                out[i, j] = v
        return out

    @numba.njit(cache=True)
    def _tridiag_apply(s, u, y):
        n = u.shape[0] - 1
        if n == 0:
            y[0] = 0.0
            return
        y[0] = s[0] * u[1]
        for k in range(1, n):
            y[k] = s[k - 1] * u[k - 1] + s[k] * u[k + 1]
        y[n] = s[n - 1] * u[n - 1]

    @numba.njit(cache=True)
    def _cheb_block_numba(v, theta, n):
        if n == 0 or theta == 0.0:
            return v.copy()
        x = theta * n
        order = chebyshev_order_nb(x)
        jv = bessel_j_sequence_numba(x, order)
        lam = float(n)
        s = np.empty(n)
        for k in range(n):
            s[k] = np.sqrt((k + 1.0) * (n - k)) / lam
        t0 = v.copy()
        t1 = np.empty_like(v)
        t2 = np.empty_like(v)
        _tridiag_apply(s, t0, t1)
        acc = jv[0] * t0 + 2.0 * 1j * jv[1] * t1
        phase = 1j
        for k in range(2, order + 1):
            phase *= 1j
            c = 2.0 * jv[k] * phase
            _tridiag_apply(s, t1, t2)
            for m in range(n + 1):
                t2[m] = 2.0 * t2[m] - t0[m]
                acc[m] += c * t2[m]
            t0, t1, t2 = t1, t2, t0
        return acc

    @numba.njit(cache=True)
    def chebyshev_order_nb(x):
        x = abs(x)
        if x == 0.0:
            return 0
        return int(np.ceil(x + 12.0 * x ** (1.0 / 3.0) + 40.0))

    @numba.njit(cache=True)
    def exp_hop_blocks_numba(psi, theta, n_out, active):
        d = psi.shape[0]
        out = np.zeros((n_out + 1, n_out + 1), dtype=np.complex128)
        for n in range(n_out + 1):
            if not active[n]:
                continue
            v = np.zeros(n + 1, dtype=np.complex128)
            for k in range(max(0, n - d + 1), min(n, d - 1) + 1):
                v[k] = psi[k, n - k]
            w = _cheb_block_numba(v, theta, n)
            for k in range(n + 1):
                out[k, n - k] = w[k]
        return out


if USE_NUMBA:
    bessel_j_sequence = bessel_j_sequence_numba
    hop_grid = hop_grid_numba
    _exp_hop_blocks = exp_hop_blocks_numba
else:
    bessel_j_sequence = bessel_j_sequence_numpy
    hop_grid = hop_grid_numpy
    _exp_hop_blocks = exp_hop_blocks_numpy


def block_weights(psi):
    """Squared norm of each total-photon-number block of a square grid."""
    d = psi.shape[0]
    idx = np.add.outer(np.arange(d), np.arange(d))
    return np.bincount(idx.ravel(), weights=(np.abs(psi) ** 2).ravel(), minlength=2 * d - 1)


def exp_hop_blocks(psi, theta, n_out=None, rel_skip=1e-30, impl=None):
    """Apply ``exp(i theta K)`` to a square two-mode grid.

    Each photon-number block is propagated with a Chebyshev expansion whose
    spectral bound is the block's photon number, so the result is exact to
    rounding. Blocks whose weight is below ``rel_skip`` times the total are
    dropped.

    Args:
        psi: complex (D, D) amplitude grid.
        theta: generator angle; ``pi/4`` is a 50:50 splitter.
        n_out: cutoff of the returned grid. Defaults to the largest occupied
            block, which is the smallest grid that holds the output exactly.
        rel_skip: relative weight below which a block is treated as empty.
        impl: ``"numba"`` or ``"numpy"`` to bypass the import-time choice.

    Returns:
        complex (n_out + 1, n_out + 1) grid.
    """
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    w = block_weights(psi)
    total = w.sum()
    occupied = np.nonzero(w > 0.0)[0]
    if n_out is None:
        n_out = int(occupied[-1]) if occupied.size else 0
    active = np.zeros(n_out + 1, dtype=np.bool_)
    upto = min(n_out + 1, w.size)
    active[:upto] = w[:upto] > rel_skip * total
    if impl is None:
        fn = _exp_hop_blocks
    elif impl == "numba":
        if numba is None:  # pragma: no cover
            raise RuntimeError("numba is not installed")
        fn = exp_hop_blocks_numba
    else:
        fn = exp_hop_blocks_numpy
    return fn(psi, float(theta), int(n_out), active)
