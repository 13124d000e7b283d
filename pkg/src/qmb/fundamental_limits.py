"""Clock, Planck-scale and geometric counting bounds, plus de Broglie wavelengths."""

from dataclasses import dataclass, field, replace
from decimal import Decimal, localcontext
import math

from .errors import DomainError

DECIMAL_DIGITS = 30


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 values in SI units; Planck time and length are derived."""

    hbar: float = 1.054571817e-34
    c: float = 299792458.0
    G: float = 6.67430e-11
    t_P: float = field(init=False)
    l_P: float = field(init=False)

    def __post_init__(self):
        for name in ("hbar", "c", "G"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise DomainError(f"constant {name} must be a positive finite number, got {v!r}")
        t_p = math.sqrt(self.hbar * self.G / self.c**5)
        object.__setattr__(self, "t_P", t_p)
        object.__setattr__(self, "l_P", self.c * t_p)

    def override(self, **kw):
        """Return a copy with some of ``hbar``, ``c``, ``G`` replaced."""
        bad = set(kw) - {"hbar", "c", "G"}
        if bad:
            raise DomainError(f"unknown constants: {sorted(bad)}")
        return replace(self, **kw)


CODATA2018 = PhysicalConstants()
HBAR = CODATA2018.hbar


def _positive(**kw):
    for k, v in kw.items():
        if not v > 0 or not math.isfinite(v):
            raise DomainError(f"{k} must be positive and finite, got {v!r}")


def min_tick(E, const=CODATA2018):
    """Shortest time for a system of mean energy ``E`` to reach an orthogonal state."""
    _positive(E=E)
    return math.pi * const.hbar / (2 * E)


def max_ops(R, T, const=CODATA2018):
    """Bound on elementary events in a region of size ``R`` over time ``T``."""
    _positive(R=R, T=T)
    return (T / const.t_P) * (R / const.l_P) / math.pi


def max_energy_no_blackhole(R, const=CODATA2018):
    """Largest energy that fits inside radius ``R`` without forming a black hole."""
    _positive(R=R)
    return R * const.c**4 / (2 * const.G)


def max_quanta(R, const=CODATA2018):
    _positive(R=R)
    return R**2 / (math.pi * const.l_P**2)


def uniform_partition(R, T, const=CODATA2018):
    """(number of cells, ticks per clock) when the event budget is spread evenly over space."""
    _positive(R=R, T=T)
    return (R / const.l_P) ** 1.5, (T / const.t_P) ** 0.5


def universe_ops(T, const=CODATA2018):
    _positive(T=T)
    return (T / const.t_P) ** 2


def de_broglie(p, const=CODATA2018):
    _positive(p=p)
    return 2 * math.pi * const.hbar / p


def n_photon_wavelength(lambda_single, n):
    """Effective wavelength of an n-photon bound state: ``lambda_single / n``."""
    _positive(lambda_single=lambda_single)
    if int(n) != n or n < 1:
        raise DomainError(f"n must be an integer >= 1, got {n!r}")
    return lambda_single / n


def _dec_consts(const):
    with localcontext() as ctx:
        ctx.prec = DECIMAL_DIGITS + 10
        hbar, c, G = Decimal(const.hbar), Decimal(const.c), Decimal(const.G)
        t_p = (hbar * G / c**5).sqrt()
        return hbar, c, G, t_p, c * t_p


def limits_table(R=1.0, T=1.0, E=1.0, const=CODATA2018):
    """Rows ``(quantity, formula, inputs, value, decimal)`` for every bound.

    ``decimal`` is recomputed in 30-digit decimal arithmetic from the same
    constants rather than converted from the float.
    """
    _positive(R=R, T=T, E=E)
    hbar, c, G, t_p, l_p = _dec_consts(const)
    pi = Decimal("3.14159265358979323846264338327950288")
    cells, ticks = uniform_partition(R, T, const)
    with localcontext() as ctx:
        ctx.prec = DECIMAL_DIGITS
        dR, dT, dE = Decimal(R), Decimal(T), Decimal(E)
        rows = [
            ("t_P", "sqrt(hbar*G/c^5)", "", const.t_P, +t_p),
            ("l_P", "c*t_P", "", const.l_P, +l_p),
            ("min_tick", "pi*hbar/(2*E)", f"E={E!r}", min_tick(E, const), pi * hbar / (2 * dE)),
            ("max_ops", "(T/t_P)*(R/l_P)/pi", f"R={R!r};T={T!r}", max_ops(R, T, const), (dT / t_p) * (dR / l_p) / pi),
            ("max_energy_no_blackhole", "R*c^4/(2*G)", f"R={R!r}", max_energy_no_blackhole(R, const), dR * c**4 / (2 * G)),
            ("max_quanta", "R^2/(pi*l_P^2)", f"R={R!r}", max_quanta(R, const), dR**2 / (pi * l_p**2)),
            ("partition_cells", "(R/l_P)^(3/2)", f"R={R!r}", cells, (dR / l_p) ** Decimal(1.5)),
            ("partition_ticks", "(T/t_P)^(1/2)", f"T={T!r}", ticks, (dT / t_p).sqrt()),
            ("universe_ops", "(T/t_P)^2", f"T={T!r}", universe_ops(T, const), (dT / t_p) ** 2),
        ]
        return [(q, f, i, v, format(d, "E")) for q, f, i, v, d in rows]
