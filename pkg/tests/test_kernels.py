import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import linalg, special

from qmb import kernels
from qmb.fock import two_mode_operator

IMPLS = ["numba", "numpy"]


def random_triangle(rng, cutoff):
    """Random normalized grid supported on i + j <= cutoff."""
    d = cutoff + 1
    psi = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    psi[np.add.outer(np.arange(d), np.arange(d)) > cutoff] = 0
    return psi / np.linalg.norm(psi)


@pytest.mark.parametrize("x", [0.05, 1.0, 7.5, 60.0, 400.0, -3.0])
def test_bessel_sequences_agree_with_scipy(x):
    kmax = kernels.chebyshev_order(x)
    ref = special.jv(np.arange(kmax + 1), x)
    for seq in (kernels.bessel_j_sequence_numpy(x, kmax), kernels.bessel_j_sequence_numba(x, kmax)):
        np.testing.assert_allclose(seq, ref, atol=1e-13, rtol=0)


@pytest.mark.parametrize("impl", IMPLS)
def test_hop_grid_matches_dense_operator(impl, rng):
    cutoff = 5
    psi = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    fn = kernels.hop_grid_numba if impl == "numba" else kernels.hop_grid_numpy
    out = fn(np.ascontiguousarray(psi))
    # the padded result keeps the terms that leave the grid
    big = np.zeros((7, 7), dtype=complex)
    big[:6, :6] = psi
    k = two_mode_operator("k", 6).matrix
    np.testing.assert_allclose(out, (k @ big.ravel()).reshape(7, 7), atol=1e-12)
    assert out.shape == (cutoff + 2, cutoff + 2)


@pytest.mark.parametrize("impl", IMPLS)
@pytest.mark.parametrize("theta", [math.pi / 4, 0.3, -1.1])
def test_exp_hop_blocks_matches_expm(impl, theta, rng):
    cutoff = 7
    psi = random_triangle(rng, cutoff)
    k = two_mode_operator("k", cutoff).matrix
    ref = (linalg.expm(1j * theta * k) @ psi.ravel()).reshape(psi.shape)
    out = kernels.exp_hop_blocks(psi, theta, n_out=cutoff, impl=impl)
    np.testing.assert_allclose(out, ref, atol=1e-13)


def test_backends_agree_on_large_grid(rng):
    psi = random_triangle(rng, 60)
    a = kernels.exp_hop_blocks(psi, math.pi / 4, impl="numba")
    b = kernels.exp_hop_blocks(psi, math.pi / 4, impl="numpy")
    np.testing.assert_allclose(a, b, atol=1e-13)


def test_single_photon_splitter():
    psi = np.zeros((2, 2), dtype=complex)
    psi[1, 0] = 1
    out = kernels.exp_hop_blocks(psi, math.pi / 4)
    np.testing.assert_allclose(out[1, 0], 1 / math.sqrt(2), atol=1e-15)
    np.testing.assert_allclose(out[0, 1], 1j / math.sqrt(2), atol=1e-15)


def test_vacuum_stays_vacuum():
    psi = np.zeros((3, 3), dtype=complex)
    psi[0, 0] = 1
    out = kernels.exp_hop_blocks(psi, math.pi / 4, n_out=2)
    expected = np.zeros((3, 3), dtype=complex)
    expected[0, 0] = 1
    np.testing.assert_allclose(out, expected, atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), cutoff=st.integers(0, 12), theta=st.floats(-3, 3))
def test_exp_hop_blocks_is_unitary(seed, cutoff, theta):
    psi = random_triangle(np.random.default_rng(seed), cutoff)
    for impl in IMPLS:
        out = kernels.exp_hop_blocks(psi, theta, impl=impl)
        assert abs(np.linalg.norm(out) - 1) < 1e-12


def test_environment_flag_selects_numpy():
    code = "from qmb import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, QMB_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    env.pop("QMB_DISABLE_NUMBA")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numba"
