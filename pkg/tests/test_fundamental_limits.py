import math

import pytest
from hypothesis import given, strategies as st

from qmb import fundamental_limits as fl
from qmb.errors import DomainError

C = fl.CODATA2018
pos = st.floats(1e-40, 1e40)


def test_planck_units():
    assert C.t_P == pytest.approx(math.sqrt(C.hbar * C.G / C.c**5), rel=1e-12)
    assert C.l_P == C.c * C.t_P
    assert f"{C.t_P:.3e}" == "5.391e-44"


def test_overrides():
    alt = C.override(hbar=2 * C.hbar)
    assert alt.t_P == pytest.approx(math.sqrt(2) * C.t_P)
    with pytest.raises(DomainError):
        C.override(k_B=1.0)
    with pytest.raises(DomainError):
        fl.PhysicalConstants(c=-1.0)


def test_min_tick():
    assert fl.min_tick(math.pi * C.hbar / 2) == pytest.approx(1.0)
    assert fl.min_tick(1.0) == pytest.approx(1.6565e-34, rel=1e-4)
    assert fl.min_tick(2.0) == pytest.approx(fl.min_tick(1.0) / 2)
    with pytest.raises(DomainError):
        fl.min_tick(0.0)


def test_max_ops_examples():
    # reference values below are quoted to three figures
    assert fl.max_ops(C.l_P, C.t_P) == pytest.approx(1 / math.pi)
    assert fl.max_ops(1.0, 1.0) == pytest.approx(3.65e77, rel=5e-3)
    assert fl.max_ops(2.0, 1.0) == pytest.approx(2 * fl.max_ops(1.0, 1.0))


def test_energy_quanta_partition_universe():
    assert fl.max_energy_no_blackhole(2 * C.G / C.c**4) == pytest.approx(1.0)
    assert fl.max_energy_no_blackhole(1.0) == pytest.approx(6.05e43, rel=5e-3)
    assert fl.max_quanta(C.l_P) == pytest.approx(1 / math.pi)
    assert fl.max_quanta(1.0) == pytest.approx(1.22e69, rel=5e-3)
    assert fl.max_quanta(3.0) == pytest.approx(9 * fl.max_quanta(1.0))
    assert fl.uniform_partition(C.l_P, C.t_P) == pytest.approx((1.0, 1.0))
    cells, ticks = fl.uniform_partition(1.0, 1.0)
    assert cells == pytest.approx(1.54e52, rel=5e-3) and ticks == pytest.approx(4.31e21, rel=5e-3)
    assert fl.universe_ops(C.t_P) == 1.0
    assert fl.universe_ops(4.35e17) == pytest.approx(6.5e121, rel=0.01)
    assert fl.universe_ops(2e10) == pytest.approx(4 * fl.universe_ops(1e10))


def test_wavelengths():
    assert fl.de_broglie(2 * math.pi * C.hbar) == pytest.approx(1.0)
    assert fl.n_photon_wavelength(800e-9, 1) == 800e-9
    assert fl.n_photon_wavelength(800e-9, 2) == 400e-9
    with pytest.raises(DomainError):
        fl.n_photon_wavelength(800e-9, 0)
    with pytest.raises(DomainError):
        fl.de_broglie(-1.0)


@given(R=pos, T=pos)
def test_cross_identity(R, T):
    lhs = 2 * fl.max_energy_no_blackhole(R) * T / (math.pi * C.hbar)
    assert lhs == pytest.approx(fl.max_ops(R, T), rel=1e-10)


@given(R=pos, T=pos, k=st.floats(1.01, 10))
def test_monotone(R, T, k):
    assert fl.max_ops(k * R, T) > fl.max_ops(R, T)
    assert fl.max_ops(R, k * T) > fl.max_ops(R, T)
    assert fl.min_tick(k * R) < fl.min_tick(R)
    assert fl.max_quanta(k * R) > fl.max_quanta(R) > 0


def test_limits_table_decimals_agree_with_floats():
    rows = fl.limits_table(1.0, 1.0, 1.0)
    names = [r[0] for r in rows]
    assert "max_ops" in names and "universe_ops" in names
    for _, _, _, value, dec in rows:
        assert float(dec) == pytest.approx(value, rel=1e-13)
