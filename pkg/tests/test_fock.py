import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmb.errors import DomainError, InvariantError, ShapeError, TruncationError
from qmb.fock import (
    FockVector,
    Observable,
    coherent_state,
    default_cutoff,
    expectation_and_variance,
    fock_state,
    log_factorials,
    number_operator,
    pad_cutoff,
    squeezed_cutoff,
    squeezed_vacuum,
    tensor,
    two_mode_operator,
)


def test_log_factorials_match_lgamma():
    lf = log_factorials(200)
    assert lf[0] == 0.0
    np.testing.assert_allclose(lf, [math.lgamma(n + 1) for n in range(201)], rtol=1e-13)


def test_coherent_number_statistics():
    s = coherent_state(2.0, cutoff=30)
    mean, var = expectation_and_variance(number_operator(30), s)
    assert mean == pytest.approx(4.0, abs=1e-9)
    assert var == pytest.approx(4.0, abs=1e-9)


def test_coherent_phase_enters_amplitudes():
    s = coherent_state(1j * 1.5, cutoff=25)
    assert np.angle(s.amplitudes[1]) == pytest.approx(math.pi / 2)


def test_coherent_truncation_raises():
    with pytest.raises(TruncationError, match="raise the cutoff"):
        coherent_state(5.0, cutoff=10)


def test_squeezed_vacuum_reference_values():
    s = squeezed_vacuum(1.0, cutoff=60)
    assert s.leakage == pytest.approx(7.08e-9, rel=0.01)
    mean, _ = expectation_and_variance(number_operator(60), s)
    assert mean == pytest.approx(math.sinh(1.0) ** 2, abs=1e-6)
    assert np.all(s.amplitudes[1::2] == 0)


def test_squeezed_quadrature_variance():
    r = 0.7
    s = squeezed_vacuum(r, eps=1e-15)
    s = pad_cutoff(s, s.cutoff + 2)  # keep a + a^dag exact on the support
    c = s.cutoff
    a = np.diag(np.sqrt(np.arange(1, c + 1)), 1)
    x = Observable((a + a.T) / 1.0, 1)
    _, var = expectation_and_variance(x, s)
    assert var == pytest.approx(math.exp(-2 * r), rel=1e-12)


def test_squeezed_cutoff_leakage_bound():
    for r in (0.2, 1.0, 2.0):
        c = squeezed_cutoff(r)
        assert squeezed_vacuum(r, cutoff=c).leakage < 1e-8


def test_default_cutoff_rejects_negative():
    assert default_cutoff(0) == 10
    with pytest.raises(DomainError):
        default_cutoff(-1)


def test_observable_rejects_non_hermitian():
    with pytest.raises(InvariantError):
        Observable(np.array([[0, 1], [0, 0]], dtype=complex), 1)


def test_shape_checks():
    with pytest.raises(ShapeError):
        tensor(fock_state(0, 3), fock_state(0, 4))
    with pytest.raises(ShapeError):
        expectation_and_variance(two_mode_operator("j", 3), fock_state(1, 3))
    with pytest.raises(ShapeError):
        pad_cutoff(fock_state(1, 3), 2)


def test_two_mode_operators():
    st2 = tensor(fock_state(2, 4), fock_state(1, 4))
    for kind, expected in (("n_a", 2), ("n_b", 1), ("n_total", 3), ("j", 1), ("k", 0)):
        mean, var = expectation_and_variance(two_mode_operator(kind, 4), st2)
        assert mean == pytest.approx(expected)
        if kind != "k":
            assert var == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DomainError):
        two_mode_operator("q", 3)


def test_fock_vector_is_immutable():
    s = fock_state(1, 3)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 1
    assert isinstance(pad_cutoff(s, 6), FockVector)


@settings(max_examples=40, deadline=None)
@given(re=st.floats(-4, 4), im=st.floats(-4, 4))
def test_coherent_default_cutoff_is_tight_enough(re, im):
    s = coherent_state(complex(re, im))
    assert 0 <= s.leakage < 1e-8
    mean, var = expectation_and_variance(number_operator(s.cutoff), s)
    nbar = re * re + im * im
    assert mean == pytest.approx(nbar, abs=1e-6)
    assert var == pytest.approx(nbar, abs=1e-5)
