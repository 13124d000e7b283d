import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmb import interferometer as mz
from qmb import kernels
from qmb.errors import ConsistencyError, DegenerateOperatingPointError, DomainError
from qmb.fock import coherent_state, fock_state, tensor


def output_intensities(state):
    p = np.abs(state.amplitudes) ** 2
    n = np.arange(p.shape[0])
    return float((p.sum(axis=1) * n).sum()), float((p.sum(axis=0) * n).sum())  # (C, D)


def test_beam_splitter_single_photon():
    out = mz.beam_splitter(tensor(fock_state(1, 1), fock_state(0, 1))).amplitudes
    assert out[1, 0] == pytest.approx(1 / math.sqrt(2))
    assert out[0, 1] == pytest.approx(1j / math.sqrt(2))


def test_beam_splitter_vacuum_and_norm(rng):
    vac = mz.beam_splitter(tensor(fock_state(0, 3), fock_state(0, 3))).amplitudes
    assert abs(vac[0, 0]) == pytest.approx(1.0)
    assert np.sum(np.abs(vac) ** 2) == pytest.approx(1.0, abs=1e-12)
    psi = tensor(coherent_state(1.5), coherent_state(0.5j, cutoff=coherent_state(1.5).cutoff))
    out = mz.beam_splitter(psi)
    assert out.norm_sq == pytest.approx(psi.norm_sq, abs=1e-12)


@pytest.mark.parametrize("phi", [0.0, math.pi, 0.4, 2.0])
def test_coherent_output_fraction(phi):
    N = 9.0
    c = coherent_state(3.0)
    st = tensor(c, fock_state(0, c.cutoff))
    ic, id_ = output_intensities(mz.mach_zehnder(st, phi))
    assert id_ == pytest.approx(N * math.cos(phi / 2) ** 2, abs=1e-7)
    assert ic == pytest.approx(N * math.sin(phi / 2) ** 2, abs=1e-7)


def test_entangled_input_examples():
    one = mz.entangled_input(1).amplitudes
    assert one[1, 0] == pytest.approx(1 / math.sqrt(2)) and one[0, 1] == pytest.approx(1 / math.sqrt(2))
    three = mz.entangled_input(3)
    assert three.amplitudes[2, 1] == pytest.approx(1 / math.sqrt(2))
    assert three.norm_sq == pytest.approx(1.0)
    for N in (1, 5, 11, 31):
        assert mz.entangled_input(N).total_number_expectation() == pytest.approx(N)
    with pytest.raises(DomainError):
        mz.entangled_input(4)
    with pytest.raises(DomainError):
        mz.entangled_input(5, cutoff=2)


def test_m_statistics_examples():
    st3 = mz.entangled_input(3)
    assert mz.m_statistics(st3, 0.0) == pytest.approx((0.0, 1.0), abs=1e-12)
    mean, var = mz.m_statistics(st3, math.pi / 2)
    # simulated mean is +N+ sin(phi); the commonly quoted form has the opposite sign
    assert mean == pytest.approx(2.0, abs=1e-12)
    assert var == pytest.approx(3.0, abs=1e-12)
    assert mz.entangled_m_reference(3, math.pi / 2)[0] == pytest.approx(-2.0)
    vac = tensor(fock_state(0, 2), fock_state(0, 2))
    assert mz.m_statistics(vac, 1.3) == pytest.approx((0.0, 0.0), abs=1e-14)


@settings(max_examples=25, deadline=None)
@given(k=st.integers(0, 15), phi=st.floats(-7, 7))
def test_entangled_moments_match_operator_algebra(k, phi):
    N = 2 * k + 1
    mean, var = mz.m_statistics(mz.entangled_input(N), phi)
    m_ref, v_ref = mz.entangled_m_moments(N, phi)
    assert mean == pytest.approx(m_ref, abs=1e-9 * max(1, abs(m_ref)))
    assert var == pytest.approx(v_ref, abs=1e-9 * max(1, abs(v_ref)))


def test_routes_agree_for_squeezed_input():
    st = mz.squeezed_port_input(20, 0.1)
    mz.m_statistics(st, 1.1, cross_check=True)


def test_route_mismatch_is_reported(monkeypatch):
    monkeypatch.setattr(mz, "m_statistics_output_basis", lambda s, p: (0.5, 0.0))
    with pytest.raises(ConsistencyError):
        mz.m_statistics(mz.entangled_input(3), 0.3)


def test_squeezed_port_variance_closed_form():
    # Var K with coherent (1-f)N in A and squeezed sinh^2 r in B at phi = pi/2
    N, f = 40, 0.08
    r = math.asinh(math.sqrt(f * N))
    _, var = mz.m_statistics(mz.squeezed_port_input(N, f), math.pi / 2)
    assert var == pytest.approx((1 - f) * N * math.exp(-2 * r) + f * N, rel=5e-6)  # truncation at 1e-8


@pytest.mark.parametrize("N", [3, 9, 21])
def test_entangled_phase_error_near_zero(N):
    ps = mz.phase_error(mz.entangled_input(N), 1e-4)
    assert ps.delta_phi == pytest.approx(2 / (N + 1), rel=1e-5)


@pytest.mark.parametrize("N", [4, 25, 100])
def test_coherent_phase_error_at_quadrature(N):
    ps = mz.phase_error(mz.coherent_input(N), math.pi / 2)
    assert ps.delta_phi == pytest.approx(1 / math.sqrt(N), rel=0.02)


def test_vacuum_is_degenerate():
    vac = tensor(fock_state(0, 2), fock_state(0, 2))
    with pytest.raises(DegenerateOperatingPointError):
        mz.phase_error(vac, 0.7)
    with pytest.raises(DomainError):
        mz.phase_error(vac, 0.7, fd_step=0)


def test_backends_give_same_statistics(monkeypatch):
    st = mz.squeezed_port_input(30, 0.1)
    ref = mz.m_statistics(st, 0.9)
    monkeypatch.setattr(kernels, "_exp_hop_blocks", kernels.exp_hop_blocks_numpy)
    monkeypatch.setattr(kernels, "hop_grid", kernels.hop_grid_numpy)
    alt = mz.m_statistics(st, 0.9)
    assert alt == pytest.approx(ref, rel=1e-12)


def test_scaling_experiment_small_lists():
    fit = mz.scaling_experiment("coherent", [4, 9, 16, 40])
    assert fit.exponent == pytest.approx(-0.5, abs=0.02)
    assert [r.N for r in fit.rows] == [4, 9, 16, 40]
    with pytest.raises(DomainError):
        mz.scaling_experiment("entangled", [3, 5, 8, 41])
    with pytest.raises(DomainError):
        mz.scaling_experiment("coherent", [4, 5, 6, 7])
    with pytest.raises(DomainError):
        mz.normalize_strategy("laser")
    assert mz.normalize_strategy("coherent+squeezed_port_B") == "coherent+squeezed"


def test_squeezed_beats_coherent():
    c = mz.scaling_point("coherent", 64)
    s = mz.scaling_point("coherent+squeezed", 64)
    assert s.delta_phi < c.delta_phi
    assert 0 < s.extra["squeeze_fraction"] < 0.25
