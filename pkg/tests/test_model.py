import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from pilotwave.model import (
    C_LIGHT,
    ELECTRON_MASS,
    BeamThermo,
    ExperimentGeometry,
    GridSpec,
    ModelError,
    PatternCurve,
    PreconditionError,
    WaveKinematics,
    de_broglie,
    generate_pattern,
    modulated_wave,
    modulated_wave_factors,
    multi_slit_intensity,
    predict_blocked_slit,
    radiation_intensity_at,
    sed_probability,
    single_slit_intensity,
    standing_wave,
    theta_of_y,
    well_occupancy,
)

K_PILOT = 2 * math.pi / 2e-9
finite_theta = st.floats(-200, 200, allow_nan=False)


# --- geometry and theta map ---------------------------------------------------

def test_theta_at_center_is_zero():
    assert theta_of_y(0.0, ExperimentGeometry(), K_PILOT) == 0.0


def test_theta_direct_substitution():
    geom = ExperimentGeometry(slit_width_a=1e-4, screen_distance_D=1.0)
    assert theta_of_y(1e-6, geom, 1e9) == pytest.approx(0.2, rel=1e-12)


def test_theta_linear_in_width():
    g1 = ExperimentGeometry(slit_width_a=1e-4, screen_distance_D=1.0)
    g2 = ExperimentGeometry(slit_width_a=2e-4, screen_distance_D=1.0)
    assert theta_of_y(3e-6, g2, 1e9) == pytest.approx(2 * theta_of_y(3e-6, g1, 1e9), rel=1e-14)


def test_theta_rejects_nonfinite():
    with pytest.raises(ModelError, match="invalid position"):
        theta_of_y(float("nan"), ExperimentGeometry(), K_PILOT)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(slit_width_a=0.0),
        dict(screen_distance_D=-1.0),
        dict(n_slits=0),
        dict(n_slits=2),
        dict(n_slits=2, slit_separation=1e-5, slit_width_a=2e-5),
    ],
)
def test_geometry_invariants(kwargs):
    with pytest.raises(ModelError):
        ExperimentGeometry(**kwargs)


# --- intensities ----------------------------------------------------------------

@pytest.mark.parametrize(
    "theta, expected",
    [(0.0, 1.0), (math.pi, 0.0), (math.pi / 2, 4 / math.pi**2)],
)
def test_single_slit_values(theta, expected):
    assert single_slit_intensity(theta) == pytest.approx(expected, abs=1e-15)


def test_single_slit_near_singularity_is_continuous():
    assert single_slit_intensity(1e-9) == 1.0
    assert single_slit_intensity(2e-8) == pytest.approx(1.0, abs=1e-15)


@given(finite_theta)
def test_single_slit_even_and_bounded(theta):
    v = single_slit_intensity(theta)
    assert 0.0 <= v <= 1.0
    assert v == single_slit_intensity(-theta)


@pytest.mark.parametrize("m", [1, 2, 5, -3])
def test_single_slit_nodes(m):
    assert single_slit_intensity(m * math.pi) < 1e-30


def test_multi_slit_examples():
    assert multi_slit_intensity(math.pi / 2, 0.7, 1) == pytest.approx(4 / math.pi**2)
    assert multi_slit_intensity(0.0, math.pi / 2, 2) == pytest.approx(0.0, abs=1e-30)
    assert multi_slit_intensity(0.0, math.pi, 2) == 1.0
    assert multi_slit_intensity(0.0, 0.0, 7) == 1.0


@given(finite_theta, finite_theta)
def test_multi_slit_reduces_to_single(theta, phi):
    assert multi_slit_intensity(theta, phi, 1) == single_slit_intensity(theta)


@given(finite_theta, st.floats(-50, 50), st.integers(2, 9))
def test_multi_slit_bounded(theta, phi, n):
    assert 0.0 <= multi_slit_intensity(theta, phi, n) <= 1.0 + 1e-12


def test_grating_factor_matches_phasor_sum():
    # |sum_j exp(2 i j phi)|^2 / n^2 is the same interference factor
    phi = np.linspace(-7, 7, 1001)
    for n in (2, 3, 5):
        phasor = np.abs(np.exp(2j * np.outer(phi, np.arange(n))).sum(axis=1)) ** 2 / n**2
        assert np.allclose(multi_slit_intensity(0.0, phi, n), phasor, atol=1e-12)


# --- trapping transform ---------------------------------------------------------

def test_well_occupancy_examples():
    half = BeamThermo(0.5)
    assert well_occupancy(0.0, half) == 0.0
    assert well_occupancy(60.0, half) == pytest.approx(2.0, rel=1e-15)
    assert well_occupancy(1.0, half) == pytest.approx(2 * (1 - math.exp(-1)), rel=1e-14)


def test_well_occupancy_degenerate():
    with pytest.raises(ModelError, match="degenerate"):
        well_occupancy(1.0, BeamThermo(0.0))


@pytest.mark.parametrize("bd", [0.1, 1.0, 5.0])
def test_well_occupancy_against_quadrature(bd):
    thermo = BeamThermo(0.5)
    # integrate exp(-u) over u = beta E in [0, beta d], divide by beta E0
    val, _ = integrate.quad(lambda u: math.exp(-u), 0.0, bd, epsabs=0, epsrel=1e-13)
    assert well_occupancy(bd, thermo) == pytest.approx(val / thermo.beta_E0, rel=1e-9)


def test_sed_probability_examples():
    assert sed_probability(0.0, BeamThermo(0.5)) == 0.0
    assert sed_probability(1.0, BeamThermo(0.5)) == pytest.approx(1 - math.exp(-0.5), rel=1e-14)
    small = sed_probability(0.5, BeamThermo(0.01))
    assert small == pytest.approx(0.0049875, rel=1e-4)
    assert small == pytest.approx(0.005, rel=3e-3)


@pytest.mark.parametrize("bad", [-0.1, 1.5, float("nan")])
def test_sed_probability_rejects_unnormalized(bad):
    with pytest.raises(ModelError, match="peak-normalized"):
        sed_probability(bad, BeamThermo(0.5))


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 0.5))
def test_sed_probability_monotone_in_intensity(i1, i2, b):
    lo, hi = sorted((i1, i2))
    t = BeamThermo(b)
    assert sed_probability(lo, t) <= sed_probability(hi, t)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_sed_probability_monotone_in_coupling(i, b1, b2):
    lo, hi = sorted((b1, b2))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        assert sed_probability(i, BeamThermo(lo)) <= sed_probability(i, BeamThermo(hi))


@given(st.floats(0, 1), st.floats(0, 0.5))
def test_sed_probability_first_order_remainder(i, b):
    x = b * i
    assert abs(sed_probability(i, BeamThermo(b)) - x) <= x * x / 2 + 1e-17


# --- thermo invariants ----------------------------------------------------------

def test_thermo_warns_above_half_and_errors_above_one():
    with pytest.warns(RuntimeWarning):
        BeamThermo(0.7)
    with pytest.raises(ModelError):
        BeamThermo(1.2)
    with pytest.raises(ModelError):
        BeamThermo(-0.1)


def test_thermo_product_consistency():
    BeamThermo(0.5, E0=2.0, beta_thermo=0.25)
    with pytest.raises(ModelError, match="inconsistent"):
        BeamThermo(0.5, E0=2.0, beta_thermo=0.3)


# --- pattern generation ---------------------------------------------------------

def test_pattern_curve_invariants():
    with pytest.raises(ModelError):
        PatternCurve(np.array([0.0, 0.0]), np.zeros(2), np.ones(2))
    with pytest.raises(ModelError):
        PatternCurve(np.array([0.0, 1.0]), np.zeros(2), np.array([1.0, -1.0]))
    with pytest.raises(ModelError):
        PatternCurve(np.array([0.0, 1.0]), np.zeros(2), np.array([0.5, 0.9]), "peak-unity")


def test_generate_pattern_small_coupling_coincides():
    rad, sed = generate_pattern(ExperimentGeometry(), BeamThermo(1e-9), K_PILOT)
    mask = rad.values > 1e-300
    assert np.allclose(sed.values[mask], rad.values[mask], rtol=1e-6, atol=0)


@pytest.mark.parametrize("n_slits", [1, 2, 5])
def test_generate_pattern_peaks(n_slits):
    geom = ExperimentGeometry(n_slits=n_slits, slit_separation=1e-4 if n_slits > 1 else None)
    rad, sed = generate_pattern(geom, BeamThermo(0.5), K_PILOT)
    center = len(rad) // 2
    assert rad.values[center] == 1.0 and sed.values[center] == 1.0
    assert rad.values.max() == 1.0 and sed.values.max() == 1.0
    assert rad.kind == "radiation-intensity" and sed.kind == "sed-probability"
    np.testing.assert_array_equal(rad.thetas, sed.thetas)


def test_generate_pattern_concavity_ordering():
    rad, sed = generate_pattern(ExperimentGeometry(), BeamThermo(0.5), K_PILOT, GridSpec(2001))
    inside = (rad.values > 0) & (rad.values < 1)
    assert inside.sum() > 1900
    assert np.all(sed.values[inside] >= rad.values[inside])


def test_generate_pattern_off_center_grid():
    geom = ExperimentGeometry()
    y = np.linspace(1e-5, 4e-4, 301)
    rad, sed = generate_pattern(geom, BeamThermo(0.5), K_PILOT, y)
    assert rad.values.max() == 1.0 and sed.values.max() == 1.0
    inside = (rad.values > 0) & (rad.values < 1)
    assert np.all(sed.values[inside] >= rad.values[inside] - 1e-15)


# --- kinematics -----------------------------------------------------------------

def test_kinematics_invariants():
    kin = WaveKinematics.from_k0(1.0, 0.6)
    assert kin.gamma == pytest.approx(1.25, rel=1e-15)
    with pytest.raises(ModelError):
        WaveKinematics(k0=1.0, omega0=2.0)
    with pytest.raises(ModelError):
        WaveKinematics.from_k0(1.0, 1.0)
    with pytest.raises(ModelError):
        WaveKinematics(k0=1.0, omega0=C_LIGHT, velocity_beta=0.6, gamma=1.3)


def test_standing_wave_examples():
    kin = WaveKinematics.from_k0(3.0)
    assert standing_wave(0.0, math.pi / 2 / kin.omega0, kin) == pytest.approx(2.0)
    assert standing_wave(math.pi / 2 / kin.k0, 1.234e-9, kin) == pytest.approx(0.0, abs=1e-15)
    assert standing_wave(0.77, 0.0, kin) == 0.0


def test_modulated_reduces_to_standing_at_rest():
    kin = WaveKinematics.from_k0(2.5)
    x = np.linspace(-3, 3, 50)[:, None]
    t = np.linspace(0, 5 / C_LIGHT, 40)[None, :]
    np.testing.assert_array_equal(modulated_wave(x, t, kin), standing_wave(x, t, kin))


@pytest.mark.parametrize("vb", [0.1, 0.6, 0.9])
def test_modulation_spatial_frequencies(vb):
    kin = WaveKinematics.from_k0(2.0, vb)
    x = np.linspace(0, 1, 7)
    carrier, modulation = modulated_wave_factors(x, 0.0, kin)
    np.testing.assert_allclose(carrier, np.cos(kin.k0 * kin.gamma * x), atol=1e-15)
    np.testing.assert_allclose(modulation, np.sin(-kin.gamma * vb * kin.k0 * x), atol=1e-15)


def test_de_broglie_examples():
    kin = WaveKinematics.from_k0(4.0, 0.6)
    db = de_broglie(kin)
    assert db.wave_vector == pytest.approx(0.75 * 4.0, rel=1e-15)
    assert db.wavelength * db.wave_vector == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(ModelError, match="undefined at rest"):
        de_broglie(WaveKinematics.from_k0(4.0))


@given(st.floats(-0.999, 0.999).filter(lambda v: abs(v) > 1e-6), st.floats(1e-3, 1e13))
def test_de_broglie_reciprocity(vb, k0):
    db = de_broglie(WaveKinematics.from_k0(k0, vb))
    assert db.wavelength * db.wave_vector == pytest.approx(1.0, rel=1e-14)


def test_electron_rest_frequency():
    # m0 c^2 / hbar with m0 = 9.109e-31, hbar = 1.0546e-34, c = 2.998e8
    omega0_ref, k0_ref = 7.763296836e20, 2.589491940e12
    kin = WaveKinematics.from_rest_mass(ELECTRON_MASS)
    assert kin.omega0 == pytest.approx(omega0_ref, rel=1e-4)
    assert kin.k0 == pytest.approx(k0_ref, rel=1e-4)


# --- blocked slit ---------------------------------------------------------------

TWO_SLIT = ExperimentGeometry(n_slits=2, slit_separation=1e-4)


def test_blocked_slit_sed_is_half_of_two_slit():
    thermo = BeamThermo(0.5)
    pred = predict_blocked_slit(TWO_SLIT, thermo, K_PILOT)
    y = pred.sed_prediction.positions_y
    two = -np.expm1(-0.5 * radiation_intensity_at(y, TWO_SLIT, K_PILOT)) / 0.5
    np.testing.assert_allclose(pred.sed_prediction.values, 0.5 * two, rtol=1e-14)
    assert pred.sed_prediction.normalization == "raw"


def test_blocked_slit_orthodox_has_envelope_shape_and_same_flux():
    pred = predict_blocked_slit(TWO_SLIT, BeamThermo(0.5), K_PILOT)
    o = pred.orthodox_prediction
    env = -np.expm1(-0.5 * single_slit_intensity(o.thetas))
    ratio = o.values[env > 1e-6] / env[env > 1e-6]
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-10)
    assert o.values.sum() == pytest.approx(pred.sed_prediction.values.sum(), rel=1e-12)


def test_blocked_slit_classical_limit():
    pred = predict_blocked_slit(TWO_SLIT, BeamThermo(0.0), K_PILOT)
    y = pred.sed_prediction.positions_y
    np.testing.assert_allclose(
        pred.sed_prediction.values, 0.5 * radiation_intensity_at(y, TWO_SLIT, K_PILOT), rtol=1e-15
    )
    shape = pred.orthodox_prediction.values / pred.orthodox_prediction.values.max()
    np.testing.assert_allclose(shape, single_slit_intensity(pred.orthodox_prediction.thetas), atol=1e-12)


@pytest.mark.parametrize("n", [1, 3])
def test_blocked_slit_needs_two_slits(n):
    geom = ExperimentGeometry(n_slits=n, slit_separation=1e-4 if n > 1 else None)
    with pytest.raises(PreconditionError):
        predict_blocked_slit(geom, BeamThermo(0.5), K_PILOT)


@settings(max_examples=30)
@given(st.floats(0.0, 0.5))
def test_blocked_slit_fringes_survive_in_sed_branch(b):
    pred = predict_blocked_slit(TWO_SLIT, BeamThermo(b), K_PILOT, GridSpec(2001, math.pi))
    # phi = 2.5 theta here; two-slit node at phi = pi/2 -> theta = pi/5
    node = np.argmin(np.abs(pred.sed_prediction.thetas - math.pi / 5))
    assert pred.sed_prediction.values[node] < 1e-4 * pred.sed_prediction.values.max()
    assert pred.orthodox_prediction.values[node] > 0.1 * pred.orthodox_prediction.values.max()
