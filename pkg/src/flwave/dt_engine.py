"""Assembly of the Omega-determinant systems and field evaluation.

Each chart contributes 3(h+1) rows: the eigenfunction row, its two
conjugate companion rows, and that block repeated for every derivative
order up to the multiplicity.  Derivative rows are jet coefficients of
the whole entry lambda^m * phi, so the power and the eigenfunction are
differentiated together.  The transformed fields are the seed plus the
two determinant ratios.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import ConfigError, SingularPointError, TruncationError
from .model import (DeformationProfile, PlaneWaveSeed, SeedBackground,
                    ZeroBackground, background_field)
from .numerics import Jet, SquareMatrix, det_with_exponent, jet_div, jet_mul
from .spectral import (BreatherChart, EigenTriple, RogueChart, SpectralChart,
                       ZeroSeedChart, breather_eigenfunction,
                       rogue_eigenfunction_jet, zero_seed_eigenfunction)

# ratios are meaningless once |det Omega_1| drops below this: the point is
# reported as a gap instead of a value
DET_FLOOR = 1e-300
_LOG2_FLOOR = math.log2(DET_FLOOR)

# fold count cap; conditioning of the 3N x 3N systems degrades fast beyond it
MAX_FOLDS = 4


@dataclass(frozen=True)
class DtConfig:
    """Ordered charts of one transformation; N = sum of (multiplicity + 1)."""

    charts: tuple[SpectralChart, ...]

    def __post_init__(self):
        charts = tuple(self.charts)
        object.__setattr__(self, "charts", charts)
        if not charts:
            raise ConfigError("a transformation needs at least one chart")
        n = self.folds
        if n > MAX_FOLDS:
            raise ConfigError(f"N = {n} exceeds the supported maximum {MAX_FOLDS}")
        for i in range(len(charts)):
            for j in range(i + 1, len(charts)):
                li, lj = charts[i].lam, charts[j].lam
                if abs(li - lj) <= 1e-12 * max(1.0, abs(li), abs(lj)):
                    raise ConfigError(
                        f"charts {i} and {j} share lambda = {li!r}")

    @property
    def folds(self) -> int:
        return sum(1 + c.multiplicity for c in self.charts)


@dataclass(frozen=True)
class OmegaSystem:
    omega1: SquareMatrix
    omega2: SquareMatrix
    omega3: SquareMatrix


@dataclass(frozen=True)
class FieldSample:
    q1: complex
    q2: complex


def companion_triplet(phi: EigenTriple) -> tuple[EigenTriple, EigenTriple]:
    """The two conjugate companions, eigenfunctions at the conjugate lambda."""
    order = phi.phi1.order
    zero = Jet.constant(0.0, order)
    c1 = phi.phi1.conjugate()
    comp2 = EigenTriple(-phi.phi2.conjugate(), c1, zero)
    comp3 = EigenTriple(-phi.phi3.conjugate(), zero, c1)
    return comp2, comp3


def _required_order(chart: SpectralChart) -> int:
    if isinstance(chart, RogueChart):
        return 2 * chart.multiplicity
    return chart.multiplicity


def _coeff_step(chart: SpectralChart) -> int:
    return 2 if isinstance(chart, RogueChart) else 1


@lru_cache(maxsize=None)
def _power_jets(lam: complex, order: int, power: int, n_folds: int):
    """lambda^m as jets for every exponent the column ladder uses."""
    one = Jet.constant(1.0, order)
    lam_jet = Jet.variable(lam, order, power)
    pows = {0: one, 1: lam_jet}
    for m in range(2, n_folds + 1):
        pows[m] = jet_mul(pows[m - 1], lam_jet)
    inv = jet_div(one, lam_jet)
    pows[-1] = inv
    for m in range(-2, -n_folds - 1, -1):
        pows[m] = jet_mul(pows[m + 1], inv)
    return pows


def assemble_system(config: DtConfig, triples) -> OmegaSystem:
    """Build Omega_1..Omega_3 from per-chart eigenfunction jets.

    Column ladder: phi1 columns at lambda exponents N, N-2, ..., -(N-2) and
    (phi2, phi3) pairs at N-1, N-3, ..., -(N-1), interleaved in descending
    order.  The replacement vector entry on every row is -mu^-N times the
    row's first component, mu being that row's eigenvalue.

    When a chart has phi2 == phi3 coefficientwise, its second companion
    rows are replaced by (comp3 - comp2) / phi1*, which collapses to pure
    conjugated lambda powers.  That row combination rescales every
    determinant by the same triangular factor, so both ratios are
    unchanged, while the spurious rank drop at nodes of phi1 (the center
    of a rogue wave, where the faithful rows make 0/0) disappears.
    """
    charts = config.charts
    if len(triples) != len(charts):
        raise ConfigError(
            f"{len(charts)} charts but {len(triples)} eigenfunction triples")
    n = config.folds
    dim = 3 * n
    rows: list[list[complex]] = []
    repl: list[complex] = []
    for chart, triple in zip(charts, triples):
        need = _required_order(chart)
        order = triple.phi1.order
        if triple.phi2.order != order or triple.phi3.order != order:
            raise ConfigError("eigenfunction components have mixed jet orders")
        if order < need:
            raise TruncationError(
                f"chart at lambda={chart.lam!r} needs jet order >= {need}, "
                f"got {order}")
        step = _coeff_step(chart)
        power = 2 if isinstance(chart, RogueChart) else 1
        pows = _power_jets(chart.lam, order, power, n)
        # products lambda^m * phi_j, reused by every derivative row; base
        # rows consume one parity of m, companion rows the other
        p1 = {m: jet_mul(pows[m], triple.phi1) for m in range(-n, n + 1)}
        p2 = {m: jet_mul(pows[m], triple.phi2) for m in range(-n, n + 1)}
        p3 = {m: jet_mul(pows[m], triple.phi3) for m in range(-n, n + 1)}
        paired = triple.phi2.coeffs == triple.phi3.coeffs
        for deriv in range(chart.multiplicity + 1):
            c = deriv * step
            base = [0j] * dim
            comp2 = [0j] * dim
            comp3 = [0j] * dim
            for k in range(n):
                m1 = n - 2 * k
                m23 = n - 1 - 2 * k
                base[3 * k] = p1[m1].coeffs[c]
                base[3 * k + 1] = p2[m23].coeffs[c]
                base[3 * k + 2] = p3[m23].coeffs[c]
                comp2[3 * k] = -p2[m1].coeffs[c].conjugate()
                comp2[3 * k + 1] = p1[m23].coeffs[c].conjugate()
                if paired:
                    comp3[3 * k + 1] = -pows[m23].coeffs[c].conjugate()
                    comp3[3 * k + 2] = pows[m23].coeffs[c].conjugate()
                else:
                    comp3[3 * k] = -p3[m1].coeffs[c].conjugate()
                    comp3[3 * k + 2] = p1[m23].coeffs[c].conjugate()
            rows.extend((base, comp2, comp3))
            repl.append(-p1[-n].coeffs[c])
            repl.append(p2[-n].coeffs[c].conjugate())
            repl.append(0j if paired else p3[-n].coeffs[c].conjugate())
    omega1 = SquareMatrix(rows)
    omega2 = omega1.replaced_column(dim - 2, repl)
    omega3 = omega1.replaced_column(dim - 1, repl)
    return OmegaSystem(omega1, omega2, omega3)


def _check_compat(background: SeedBackground, config: DtConfig):
    zero_bg = isinstance(background, ZeroBackground)
    for chart in config.charts:
        if isinstance(chart, ZeroSeedChart) and not zero_bg:
            raise ConfigError(
                "zero-seed charts require the zero background")
        if isinstance(chart, (BreatherChart, RogueChart)) and zero_bg:
            raise ConfigError(
                "breather and rogue charts require a plane-wave background")


def build_triple(chart: SpectralChart, background: SeedBackground,
                 profile: DeformationProfile, point) -> EigenTriple:
    if isinstance(chart, ZeroSeedChart):
        return zero_seed_eigenfunction(chart, profile, point,
                                       chart.multiplicity)
    if isinstance(chart, BreatherChart):
        return breather_eigenfunction(chart, background, profile, point,
                                      chart.multiplicity)
    return rogue_eigenfunction_jet(chart, background, point,
                                   2 * chart.multiplicity)


def _ratio(dn: complex, kn: int, dd: complex, kd: int) -> complex:
    z = dn / dd
    shift = kn - kd
    try:
        return complex(math.ldexp(z.real, shift), math.ldexp(z.imag, shift))
    except OverflowError:
        raise SingularPointError(
            "determinant ratio overflows; the field has a pole here") from None


def evaluate_solution(background: SeedBackground, config: DtConfig,
                      profile: DeformationProfile, point,
                      precision: str = "std") -> FieldSample:
    """The transformed fields (q1[N], q2[N]) at one space-time point."""
    if precision not in ("std", "dd"):
        raise ConfigError(f"precision must be 'std' or 'dd', got {precision!r}")
    _check_compat(background, config)
    triples = [build_triple(chart, background, profile, point)
               for chart in config.charts]
    system = assemble_system(config, triples)
    d1, k1 = det_with_exponent(system.omega1, precision)
    if d1 == 0 or math.log2(abs(d1)) + k1 < _LOG2_FLOOR:
        raise SingularPointError(
            f"det Omega_1 vanishes at point {point!r}")
    d2, k2 = det_with_exponent(system.omega2, precision)
    d3, k3 = det_with_exponent(system.omega3, precision)
    q1b, q2b = background_field(background, point)
    q1 = q1b + _ratio(d2, k2, d1, k1)
    q2 = q2b + _ratio(d3, k3, d1, k1)
    if not (cmath.isfinite(q1) and cmath.isfinite(q2)):
        raise SingularPointError(
            f"non-finite field value at point {point!r}")
    return FieldSample(q1, q2)


def solution_sampler(background: SeedBackground, config: DtConfig,
                     profile: DeformationProfile, precision: str = "std"):
    """Point -> FieldSample closure for the verification and search tools."""
    def sampler(point) -> FieldSample:
        return evaluate_solution(background, config, profile, point, precision)
    return sampler
