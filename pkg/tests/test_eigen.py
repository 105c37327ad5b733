"""Lax-pair and zero-curvature residual gates for every eigenfunction builder."""

import random

from flwave import (
    BreatherChart,
    DeformationProfile,
    FieldSample,
    PlaneWaveSeed,
    RogueChart,
    ZeroBackground,
    ZeroSeedChart,
    background_field,
    critical_lambda,
    breather_eigenfunction,
    lax_residual,
    rogue_eigenfunction_jet,
    zero_curvature_residual,
    zero_seed_eigenfunction,
)

SEED_B = PlaneWaveSeed(-1, -1, -1, -2, 1, 1)
SEED_R = PlaneWaveSeed(-0.5, -0.5, -1, -1, 1, 1)
LAM_CRIT = critical_lambda(-0.5, 1.0)


def field_sampler_for(background):
    def sampler(point):
        q1, q2 = background_field(background, point)
        return FieldSample(q1, q2)
    return sampler


def value_triple(builder):
    def sampler(point):
        trip = builder(point)
        return (trip.phi1.coeffs[0], trip.phi2.coeffs[0],
                trip.phi3.coeffs[0])
    return sampler


# -- zero seed ---------------------------------------------------------------


def test_zero_seed_lax_residual_random_charts():
    # truncation error scales with the cubed exponent coefficients times the
    # local amplitude, so the gate needs modest points and a small step
    rng = random.Random(51)
    fields = field_sampler_for(ZeroBackground())
    for _ in range(12):
        lam = complex(rng.uniform(0.4, 0.8), rng.uniform(0.3, 0.7))
        h1 = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        chart = ZeroSeedChart(lam, h1=h1)
        profile = rng.choice(list(DeformationProfile))
        phis = value_triple(
            lambda p: zero_seed_eigenfunction(chart, profile, p, 0))
        point = tuple(rng.uniform(-0.5, 0.5) for _ in range(3))
        r1, r2 = lax_residual(phis, fields, lam, point, step=3e-5)
        assert r1 < 1e-8
        assert r2 < 1e-8


def test_zero_seed_lax_residual_figure_parameters():
    # the soliton chart lambda = 1+i needs a finer step for the same gate
    # because the truncation error grows with |lambda|^6
    chart = ZeroSeedChart(1 + 1j, h1=1 + 1j)
    fields = field_sampler_for(ZeroBackground())
    phis = value_triple(
        lambda p: zero_seed_eigenfunction(chart, DeformationProfile.LINEAR,
                                          p, 0))
    rng = random.Random(52)
    for _ in range(5):
        point = tuple(rng.uniform(-1, 1) for _ in range(3))
        r1, r2 = lax_residual(phis, fields, 1 + 1j, point, step=2e-5)
        assert r1 < 1e-8
        assert r2 < 1e-8


def test_zero_seed_zero_curvature_exact():
    # U and V are constant diagonal matrices at q = 0, so every term of the
    # compatibility expression vanishes identically
    fields = field_sampler_for(ZeroBackground())
    r = zero_curvature_residual(fields, 1 + 1j, (0.3, -0.7, 0.2), step=1e-3)
    assert r == 0


# -- plane wave --------------------------------------------------------------


def test_plane_wave_zero_curvature_residual():
    fields = field_sampler_for(SEED_R)
    rng = random.Random(53)
    for _ in range(5):
        point = tuple(rng.uniform(-2, 2) for _ in range(3))
        r = zero_curvature_residual(fields, 0.6 + 0.4j, point, step=1e-3)
        assert r < 1e-6


def test_plane_wave_zero_curvature_detects_wrong_frequency():
    # same seed with c1 shifted by 0.1: the compatibility residual must jump
    seed = SEED_R

    def sampler(point):
        x, y, t = point
        th1 = seed.a1 * x + seed.b1 * y + (seed.c1 + 0.1) * t
        th2 = seed.a2 * x + seed.b2 * y + seed.c2 * t
        import cmath
        return FieldSample(seed.d1 * cmath.exp(1j * th1),
                           seed.d2 * cmath.exp(1j * th2))

    r = zero_curvature_residual(sampler, 0.6 + 0.4j, (0.4, -0.3, 0.6),
                                step=1e-3)
    assert r > 1e-2


# -- breather ----------------------------------------------------------------


def test_breather_lax_residual_figure_parameters():
    chart = BreatherChart(0.5 + 0.5j, 0, 1, 1, 1 + 1j, -1 - 1j)
    fields = field_sampler_for(SEED_B)
    phis = value_triple(
        lambda p: breather_eigenfunction(chart, SEED_B,
                                         DeformationProfile.LINEAR, p, 0))
    rng = random.Random(54)
    for _ in range(5):
        point = tuple(rng.uniform(-1, 1) for _ in range(3))
        r1, r2 = lax_residual(phis, fields, 0.5 + 0.5j, point, step=5e-5)
        assert r1 < 1e-6
        assert r2 < 1e-6


def test_breather_lax_residual_three_component():
    chart = BreatherChart(0.5 + 0.5j, 1, 1, 1, 1 + 1j, 1 + 1j)
    fields = field_sampler_for(SEED_B)
    phis = value_triple(
        lambda p: breather_eigenfunction(chart, SEED_B,
                                         DeformationProfile.QUADRATIC, p, 0))
    r1, r2 = lax_residual(phis, fields, 0.5 + 0.5j, (0.5, -0.4, 0.3),
                          step=5e-5)
    assert r1 < 1e-6
    assert r2 < 1e-6


def test_perturbed_eigenfunction_detected():
    chart = BreatherChart(0.5 + 0.5j, 0, 1, 1, 1 + 1j, -1 - 1j)
    fields = field_sampler_for(SEED_B)
    rng = random.Random(55)

    def noisy(point):
        trip = breather_eigenfunction(chart, SEED_B,
                                      DeformationProfile.LINEAR, point, 0)
        return tuple(c.coeffs[0] * (1 + 0.01 * rng.uniform(-1, 1))
                     for c in (trip.phi1, trip.phi2, trip.phi3))

    r1, r2 = lax_residual(noisy, fields, 0.5 + 0.5j, (0.2, 0.3, -0.1),
                          step=1e-4)
    assert max(r1, r2) > 1e-3


# -- rogue -------------------------------------------------------------------


def test_rogue_leading_coefficient_lax_residual():
    chart = RogueChart(LAM_CRIT)
    fields = field_sampler_for(SEED_R)
    phis = value_triple(
        lambda p: rogue_eigenfunction_jet(chart, SEED_R, p, 0))
    rng = random.Random(56)
    for _ in range(5):
        point = tuple(rng.uniform(-1.5, 1.5) for _ in range(3))
        r1, r2 = lax_residual(phis, fields, LAM_CRIT, point, step=1e-4)
        assert r1 < 1e-6
        assert r2 < 1e-6
