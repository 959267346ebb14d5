import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from oracles import layered_ray_trace, line_sum_attenuation
from thzcoexist.atmosphere import (AtmosphereSample, apparent_elevation, attenuation_profile,
                                   gaseous_attenuation, specific_attenuation, standard_profile)
from thzcoexist.errors import DomainError


def test_surface_reference_values():
    s = standard_profile(0.0)
    assert_allclose([s.temperature_K, s.pressure_hPa, s.water_vapor_density_g_m3], [288.15, 1013.25, 7.5])


def test_water_vapour_vanishes_at_top():
    assert standard_profile(100.0).water_vapor_density_g_m3 < 1e-6


def test_lapse_segment_temperatures():
    # hand evaluation: T = 288.15 - 6.5 h' with h' the geopotential height
    assert_allclose(standard_profile(10.0).temperature_K, 223.25209264797854, rtol=1e-12)
    assert_allclose(standard_profile(11.0).temperature_K, 216.77351270445553, rtol=1e-12)


def test_pressure_strictly_decreasing():
    h = np.linspace(0, 100, 2001)
    p = np.array([standard_profile(x).pressure_hPa for x in h])
    assert np.all(np.diff(p) < 0)


def test_profile_continuous_at_layer_joins():
    for h in (11.0, 20.0, 32.0, 47.0, 51.0, 71.0, 84.852, 86.0, 91.0):
        lo, hi = standard_profile(h - 1e-7), standard_profile(h + 1e-7)
        assert_allclose(lo.temperature_K, hi.temperature_K, atol=1e-3)
        assert_allclose(lo.pressure_hPa, hi.pressure_hPa, rtol=1e-3)


@pytest.mark.parametrize("h", [-0.1, 100.5])
def test_height_out_of_range(h):
    with pytest.raises(DomainError):
        standard_profile(h)


def test_sample_validation():
    with pytest.raises(DomainError):
        AtmosphereSample(0.0, -1.0, 1000.0, 1.0)
    with pytest.raises(DomainError):
        AtmosphereSample(0.0, 280.0, 0.0, 1.0)


def test_230ghz_matches_line_sum_oracle():
    s = standard_profile(0.0)
    g = specific_attenuation(230.0, s)
    # frozen from the scalar line-sum transcription in oracles.py
    assert_allclose(g.gamma_oxygen_dB_km, 0.016140753552362514, atol=1e-6)
    assert_allclose(g.gamma_water_dB_km, 2.5956630118276505, atol=1e-6)
    live = line_sum_attenuation(230.0, s.temperature_K, s.dry_pressure_hPa, s.vapor_pressure_hPa)
    assert_allclose([g.gamma_oxygen_dB_km, g.gamma_water_dB_km], live, atol=1e-6)


@pytest.mark.parametrize("f,h", [(22.235, 0.0), (60.0, 5.0), (118.75, 20.0), (325.15, 1.0), (150.0, 50.0)])
def test_line_sum_oracle_elsewhere(f, h):
    s = standard_profile(h)
    g = specific_attenuation(f, s)
    live = line_sum_attenuation(f, s.temperature_K, s.dry_pressure_hPa, s.vapor_pressure_hPa)
    assert_allclose([g.gamma_oxygen_dB_km, g.gamma_water_dB_km], live, rtol=1e-10, atol=1e-12)


def test_total_is_sum_of_components():
    g = specific_attenuation(183.31, standard_profile(0.0))
    assert g.total_dB_km == g.gamma_oxygen_dB_km + g.gamma_water_dB_km


def test_water_line_local_maximum():
    s = standard_profile(0.0)
    f = np.arange(180.0, 187.0001, 0.01)
    w = np.array([specific_attenuation(x, s).gamma_water_dB_km for x in f])
    # wings of neighbouring lines pull the summed peak slightly above the line centre
    assert abs(f[np.argmax(w)] - 183.31) < 0.1
    at_line = specific_attenuation(183.31, s).gamma_water_dB_km
    assert at_line > 0.999 * w.max()
    assert at_line > w[0] and at_line > w[-1]


def test_absorption_lower_aloft_at_150ghz():
    assert specific_attenuation(150.0, standard_profile(10.0)).total_dB_km < \
        specific_attenuation(150.0, standard_profile(0.0)).total_dB_km


@pytest.mark.parametrize("f", [0.5, 351.0])
def test_frequency_outside_tables(f):
    with pytest.raises(DomainError):
        specific_attenuation(f, standard_profile(0.0))


def test_components_non_negative_random_grid():
    rng = np.random.default_rng(7)
    f = rng.uniform(1, 350, 1000)
    h = rng.uniform(0, 100, 1000)
    for fi, hi in zip(f, h):
        g = specific_attenuation(fi, standard_profile(hi))
        assert g.gamma_oxygen_dB_km >= 0 and g.gamma_water_dB_km >= 0


def test_profile_broadcast_matches_scalar():
    h = np.array([0.0, 3.0, 40.0])
    expected = [specific_attenuation(230.0, standard_profile(x)).total_dB_km for x in h]
    assert_allclose(attenuation_profile(230.0, h), expected, rtol=1e-12)


def test_dry_pressure_split():
    s = standard_profile(0.0)
    assert_allclose(s.vapor_pressure_hPa, 7.5 * 288.15 / 216.7)
    assert_allclose(s.dry_pressure_hPa + s.vapor_pressure_hPa, s.pressure_hPa)
    go, gw = gaseous_attenuation(230.0, s.temperature_K, s.dry_pressure_hPa, s.vapor_pressure_hPa)
    assert_allclose(go + gw, specific_attenuation(230.0, s).total_dB_km)


# -- refraction ---------------------------------------------------------------

@given(st.floats(0, 100))
def test_zenith_ray_unbent(h):
    assert_allclose(apparent_elevation(h, 90.0), 90.0)


def test_horizontal_ray_rises():
    assert apparent_elevation(20.0, 0.0) > 0.0


def test_refraction_disabled_returns_ground_angle():
    assert_allclose(apparent_elevation(30.0, 12.5, refraction=False), 12.5)


def test_snell_matches_layered_ray_trace():
    # frozen from the 100 m shell ray-trace in oracles.py
    assert_allclose(apparent_elevation(10.0, 5.0), 5.808713820200528, atol=0.01)
    assert_allclose(apparent_elevation(10.0, 5.0), layered_ray_trace(5.0, 10.0), atol=0.01)


@settings(max_examples=50)
@given(st.floats(0, 90), st.floats(0, 99), st.floats(0.01, 1))
def test_apparent_elevation_non_decreasing_with_height(el, h, dh):
    assert apparent_elevation(h + dh, el) >= apparent_elevation(h, el) - 1e-9


def test_apparent_elevation_preconditions():
    with pytest.raises(DomainError):
        apparent_elevation(10.0, -1.0)
    with pytest.raises(DomainError):
        apparent_elevation(101.0, 10.0)
