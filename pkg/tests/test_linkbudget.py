import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from oracles import monte_carlo_pam_ber
from thzcoexist.errors import DomainError, SaturationError
from thzcoexist.linkbudget import (LinkScenario, ModulationScheme, ProtectedBand, check_band,
                                   gain_loss_decomposition, protected_bands, qam, qam_ber, qam_log_ber,
                                   radar_range_resolution, radiometer_sensitivity, received_rfi,
                                   required_bandwidth, required_snr, required_tx_power, rfi_grid,
                                   rfi_threshold_contour, snr)

ORDERS = (4, 16, 64, 256, 1024)


def test_modulation_bits():
    for m in ORDERS:
        assert 2 ** qam(m).bits_per_symbol == m
    with pytest.raises(DomainError):
        ModulationScheme(32)


def test_bandwidth_headline_cells():
    assert required_bandwidth(1e12, qam(16), 8, 1) == 31.25e9
    assert required_bandwidth(1e12, qam(1024), 8, 1) == 12.5e9


@given(st.sampled_from(ORDERS), st.sampled_from([1, 2, 4, 8, 16, 64, 128]), st.sampled_from([1, 2]))
def test_bandwidth_round_trip(m, k, alpha):
    b = required_bandwidth(1e12, qam(m), k, alpha)
    assert_allclose(b * k * qam(m).bits_per_symbol / alpha, 1e12, rtol=1e-15)
    if alpha == 1:
        assert required_bandwidth(1e12, qam(m), k, 2) == 2 * b


def test_bandwidth_zero_streams():
    with pytest.raises(DomainError):
        required_bandwidth(1e12, qam(16), 0)


def test_snr_examples():
    assert snr(-50.0, 1.0, -160.0) == 110.0
    assert_allclose(snr(-50.0, 10.0) - snr(-50.0, 100.0), 10.0)
    assert_allclose(snr(-55.0, 31.25e9, -160.0), -55 - (-160 + 10 * math.log10(31.25e9)))
    assert_allclose(snr(-55.0, 31.25e9, -160.0), 0.05, atol=0.01)


def test_radar_and_radiometer():
    assert_allclose(radar_range_resolution(1e9), 0.15, rtol=1e-3)
    assert_allclose(radar_range_resolution(2e9), radar_range_resolution(1e9) / 2)
    assert_allclose(radar_range_resolution(299_792_458.0 / 2), 1.0)
    assert_allclose(radiometer_sensitivity(100.0, 1e8, 1.0), 0.01)
    assert_allclose(radiometer_sensitivity(100.0, 4e8, 1.0), 0.005)
    with pytest.raises(DomainError):
        radiometer_sensitivity(100.0, 0.0, 1.0)


# -- BER ----------------------------------------------------------------------

@pytest.mark.parametrize("m", ORDERS)
def test_ber_coin_flip_floor(m):
    assert_allclose(qam_ber(qam(m), -300.0), 0.5, rtol=1e-9)


@pytest.mark.parametrize("m", ORDERS)
def test_ber_strictly_decreasing(m):
    s = np.arange(-10.0, 40.0001, 0.01)
    assert np.all(np.diff(qam_log_ber(qam(m), s)) < 0)
    assert np.all(qam_ber(qam(m), s) <= 0.5)


def test_qpsk_closed_form():
    # Gray-coded 4-QAM: each bit is an independent BPSK decision at Es/N0 / 2 per rail
    from scipy.special import erfc
    s = np.array([-5.0, 0.0, 5.0, 10.0])
    es = 10 ** (s / 10)
    assert_allclose(qam_ber(qam(4), s), 0.5 * erfc(np.sqrt(es / 2)), rtol=1e-12)


def test_required_snr_ordering():
    req = [required_snr(qam(m), 1e-5) for m in ORDERS]
    assert np.all(np.diff(req) > 0)
    assert_allclose(qam_ber(qam(64), req[2]), 1e-5, rtol=1e-8)


def test_ber_against_monte_carlo_short():
    target = required_snr(qam(16), 1e-3)
    mc = monte_carlo_pam_ber(16, target, 2_000_000, seed=3)
    assert qam_ber(qam(16), target + 0.2) < mc < qam_ber(qam(16), target - 0.2)


# -- transmit power -----------------------------------------------------------

def test_tx_power_monotone_grids():
    dists = (0.05, 0.1, 0.2, 0.3, 0.5)
    table = np.array([[required_tx_power(230.0, d, qam(m)) for d in dists] for m in (16, 64, 256, 1024)])
    assert np.all(np.diff(table, axis=1) >= 0)
    assert np.all(np.diff(table, axis=0) >= 0)


def test_tx_power_closes_link():
    p = required_tx_power(230.0, 0.1, qam(64), mimo_streams_set=(4,))
    from thzcoexist.propagation import terrestrial_path_loss
    loss = terrestrial_path_loss(230.0, 0.1, 0.0).total_dB
    bw = required_bandwidth(1e12, qam(64), 4)
    margin = snr(p - 10 * math.log10(4) - loss + 80, bw) - required_snr(qam(64), 1e-5)
    assert 0 <= margin <= 0.011


def test_tx_power_saturation():
    with pytest.raises(SaturationError):
        required_tx_power(183.31, 20.0, qam(1024))


# -- RFI ----------------------------------------------------------------------

def test_vacuum_rfi_hand_value():
    s = LinkScenario(frequency_GHz=230.0, tx_power_dBW=18.6, satellite_gain_dBi=20.0,
                     satellite_altitude_km=407.0, elevation_deg=0.0, tx_tilt_deg=0.0)
    from thzcoexist.propagation import slant_range
    d = float(slant_range(407.0, 0.0))
    expected = 18.6 - (92.45 + 20 * math.log10(230 * d)) + 40 + 20
    assert_allclose(received_rfi(s, include_absorption=False), expected, atol=1e-9)


def test_zenith_vacuum_rfi():
    s = LinkScenario(satellite_altitude_km=407.0, elevation_deg=90.0, tx_tilt_deg=90.0)
    assert_allclose(received_rfi(s, include_absorption=False),
                    18.6 - (92.45 + 20 * math.log10(230 * 407)) + 40 + 20, atol=1e-9)


@settings(max_examples=30)
@given(st.floats(-20, 20), st.floats(400, 720), st.floats(0, 90))
def test_power_gain_trade_is_exact(x, r, el):
    a = LinkScenario(satellite_altitude_km=r, elevation_deg=el)
    b = replace(a, tx_power_dBW=a.tx_power_dBW + x, satellite_gain_dBi=a.satellite_gain_dBi - x)
    assert_allclose(received_rfi(a), received_rfi(b), atol=1e-9)


def test_low_power_never_violates():
    s = LinkScenario(tx_power_dBW=18.6, satellite_gain_dBi=20.0)
    grid = rfi_grid(s, np.arange(400, 721.0)[:, None], np.arange(0, 90.0001, 0.25)[None, :])
    assert grid.max() < -160.0


def test_pattern_model_lowers_offaxis_gain():
    a = LinkScenario(elevation_deg=30.0, satellite_altitude_km=700.0)
    b = replace(a, satellite_gain_model="pattern")
    assert received_rfi(b) < received_rfi(a)


def test_scenario_validation():
    with pytest.raises(DomainError):
        LinkScenario(bandwidth_Hz=0.0)
    with pytest.raises(DomainError):
        LinkScenario(sideband_factor=3)
    with pytest.raises(DomainError):
        LinkScenario(tx_power_dBW=float("inf"))


def test_contour_consistent_with_pointwise_rfi():
    s = LinkScenario(tx_power_dBW=33.4, satellite_gain_dBi=20.0)
    rows = {row.altitude_km: row.intervals for row in rfi_threshold_contour(s)}
    rng = np.random.default_rng(11)
    checked = 0
    for r, el in zip(rng.integers(400, 721, 1000), rng.uniform(0, 90, 1000)):
        intervals = rows[float(r)]
        edges = [x for iv in intervals for x in iv]
        # boundaries are only resolved to 0.01 deg
        if any(abs(el - e) <= 0.01 for e in edges):
            continue
        inside = any(lo <= el <= hi for lo, hi in intervals)
        assert inside == (received_rfi(replace(s, satellite_altitude_km=float(r), elevation_deg=float(el))) > -160.0)
        checked += 1
    assert checked > 950


def test_contour_window_shape():
    s = LinkScenario(tx_power_dBW=33.4, satellite_gain_dBi=20.0)
    (row,) = rfi_threshold_contour(s, altitude_range_km=(720.0, 720.0))
    assert len(row.intervals) == 1
    lo, hi = row.intervals[0]
    assert 0 < lo < hi < 90


def test_decomposition_properties():
    s = LinkScenario(tx_power_dBW=33.4, satellite_gain_dBi=20.0, satellite_altitude_km=700.0)
    rows = gain_loss_decomposition(s, np.arange(0, 90.0001, 0.5))
    assert rows[0].ground_gain_dBi == 40.0
    path = np.array([r.path_gain_dB for r in rows])
    assert np.all(np.diff(path) >= 0)
    for r in rows:
        assert_allclose(r.received_dBW, 33.4 + r.ground_gain_dBi + r.path_gain_dB + 20.0, atol=1e-9)


# -- protected bands -------------------------------------------------------------

def test_band_table_loaded():
    bands = protected_bands()
    assert len(bands) == 7
    assert all(b.band_low_GHz < b.band_high_GHz for b in bands)


def test_band_record_validation():
    with pytest.raises(DomainError):
        ProtectedBand(10.0, 5.0, -160.0, None, 700.0, "x")
    with pytest.raises(DomainError):
        ProtectedBand(5.0, 10.0, None, None, 700.0, "x")


def test_check_band_violation():
    v = check_band(230.0, -155.0, "nadir_conic")
    assert not v.compliant
    assert_allclose(v.margin_dB, 5.0)
    assert v.band.band_low_GHz == 226.0


def test_check_band_limb_only():
    for p in (-300.0, 0.0, 50.0):
        assert check_band(236.0, p, "nadir_conic").compliant


def test_check_band_tie_is_compliant():
    v = check_band(150.0, -159.0, "nadir_conic")
    assert v.compliant and v.margin_dB == 0.0


def test_check_band_outside_tables():
    v = check_band(300.0, 0.0, "limb")
    assert v.compliant and v.band is None and math.isinf(v.margin_dB)


def test_check_band_scan_mode():
    with pytest.raises(DomainError):
        check_band(230.0, -170.0, "sideways")
