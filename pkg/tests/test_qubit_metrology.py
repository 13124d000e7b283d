import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmb import qubit_metrology as qm
from qmb.errors import DomainError
from qmb.rng import MonteCarloPlan, trial_stream


def test_ramsey_examples():
    assert qm.ramsey_probability(0.0) == 1.0
    assert qm.ramsey_probability(math.pi) == pytest.approx(0.0, abs=1e-16)
    assert qm.ramsey_probability(math.pi / 2) == pytest.approx(0.5)


def test_ramsey_matches_register():
    reg = qm.plus_register(1)
    for phi in (0.2, 1.0, 2.9):
        assert qm.return_probability(reg, qm.apply_phase(reg, phi)) == pytest.approx(qm.ramsey_probability(phi), abs=1e-15)


@given(phi=st.floats(-20, 20))
def test_ghz_one_qubit_is_ramsey(phi):
    assert qm.ghz_probability(1, phi) == qm.ramsey_probability(phi)


def test_ghz_examples():
    assert qm.ghz_probability(5, math.pi / 5) == pytest.approx(0.0, abs=1e-15)
    reg = qm.ghz_register(8)
    assert reg.amplitudes.size == 256
    sim = qm.return_probability(reg, qm.apply_phase(reg, 0.3))
    assert abs(qm.ghz_probability(8, 0.3) - sim) <= 1e-12
    with pytest.raises(DomainError):
        qm.ghz_probability(0, 0.1)


@settings(max_examples=30, deadline=None)
@given(N=st.integers(1, 12), phi=st.floats(-math.pi, math.pi))
def test_ghz_register_cross_check(N, phi):
    qm.ghz_probability(N, phi, cross_check=True)


def test_register_validation():
    with pytest.raises(DomainError):
        qm.QubitRegister(np.ones(3))
    with pytest.raises(DomainError):
        qm.QubitRegister(np.ones(4))
    assert qm.ghz_register(3).n == 3


def test_frequency_error_examples():
    assert qm.frequency_error(100, 1.0, "independent") == pytest.approx(0.1)
    assert qm.frequency_error(100, 1.0, "entangled") == pytest.approx(0.01)
    assert qm.frequency_error(1, 2.0, "independent") == qm.frequency_error(1, 2.0, "entangled")
    for s in ("independent", "entangled"):
        assert qm.frequency_error(9, 2.0, s) == pytest.approx(qm.frequency_error(9, 1.0, s) / 2)
    with pytest.raises(DomainError):
        qm.frequency_error(0, 1.0, "independent")
    with pytest.raises(DomainError):
        qm.frequency_error(2, 1.0, "squeezed")


@given(N=st.integers(1, 10**6), t=st.floats(1e-6, 1e6))
def test_frequency_ratio_is_sqrt_n(N, t):
    r = qm.frequency_error(N, t, "independent") / qm.frequency_error(N, t, "entangled")
    assert r == pytest.approx(math.sqrt(N), rel=4e-16)


@settings(max_examples=50)
@given(mult=st.integers(1, 50), y=st.floats(0.01, 30.0))
def test_invert_fringe_roundtrip(mult, y):
    phi = y / mult
    # stay off the fringe extrema, where inversion is ill-conditioned
    if abs(math.sin(mult * phi)) < 1e-3:
        return
    q = math.cos(mult * phi / 2) ** 2
    assert float(qm.invert_fringe(q, mult, phi)) == pytest.approx(phi, rel=1e-7, abs=1e-9)


def test_mc_reproducible_and_order_free():
    plan = MonteCarloPlan(300, 99, 0.9)
    a = qm.estimate_phase_mc(10, "independent", plan)
    b = qm.estimate_phase_mc(10, "independent", plan)
    assert a == b
    # a trial's draw depends only on (seed, trial, stream)
    x = trial_stream(99, 17, stream=10).binomial(10, 0.3)
    _ = [trial_stream(99, t, stream=10).random() for t in range(5)]
    assert trial_stream(99, 17, stream=10).binomial(10, 0.3) == x


def test_strategies_coincide_at_one_probe():
    plan = MonteCarloPlan(500, 3, 0.8)
    a = qm.estimate_phase_mc(1, "independent", plan)
    b = qm.estimate_phase_mc(1, "ghz", plan)
    assert a.rmse == b.rmse and a.mean_estimate == b.mean_estimate


def test_degenerate_point_flagged():
    res = qm.estimate_phase_mc(4, "independent", MonteCarloPlan(50, 0, 0.0))
    assert res.flagged
    assert not qm.estimate_phase_mc(4, "independent", MonteCarloPlan(50, 0, 1.0)).flagged
    with pytest.raises(DomainError):
        qm.estimate_phase_mc(4, "w-state", MonteCarloPlan(5, 0, 1.0))


def test_repetitions_reduce_error():
    plan = MonteCarloPlan(2000, 1, 0.1)
    one = qm.estimate_phase_mc(4, "ghz", plan, repetitions=1)
    many = qm.estimate_phase_mc(4, "ghz", plan, repetitions=16)
    assert many.rmse < one.rmse / 2


def test_small_scaling_runs():
    ind = qm.phase_scaling_experiment("independent", [16, 64, 256, 1024], trials=800, seed=2)
    ghz = qm.phase_scaling_experiment("ghz", [2, 4, 8, 16, 32], trials=800, seed=2)
    assert ind.exponent == pytest.approx(-0.5, abs=0.08)
    assert ghz.exponent == pytest.approx(-1.0, abs=0.1)


def test_bell_probe_is_perfect():
    for seed in (0, 1, 2**64 - 1):
        for c in qm.CHANNELS:
            assert qm.pauli_discriminate(qm.BELL, c, MonteCarloPlan(2000, seed)) == 1.0
    assert qm.ml_success_probability(qm.BELL) == 1.0


def test_computational_probe_confuses_channels():
    probe = qm.SingleProbe([1, 0], np.eye(2))
    table = qm.likelihoods(probe)
    # I and Z give identical statistics, as do X and Y
    np.testing.assert_allclose(table[:, 0], table[:, 3])
    np.testing.assert_allclose(table[:, 1], table[:, 2])
    assert qm.average_success(probe, MonteCarloPlan(2000, 5)) <= 0.75
    assert qm.ml_success_probability(probe) == pytest.approx(0.5)


def test_random_single_probes_never_perfect():
    rng = np.random.default_rng(0)
    best = max(qm.ml_success_probability(qm.random_single_probe(rng)) for _ in range(1000))
    assert best < 1.0


def test_probe_validation():
    with pytest.raises(DomainError):
        qm.SingleProbe([1, 1], np.eye(2))
    with pytest.raises(DomainError):
        qm.SingleProbe([1, 0], np.ones((2, 2)))
    with pytest.raises(DomainError):
        qm.pauli_discriminate(qm.BELL, "H", MonteCarloPlan(1, 0))
    with pytest.raises(DomainError):
        qm.likelihoods("ghz")
