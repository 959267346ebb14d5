"""Link closure, Tbps transmit-power solves and ground-to-satellite RFI."""

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfcx

from . import datasets
from .antenna import build_antenna, gain_at, off_axis_angle
from .constants import SPEED_OF_LIGHT
from .errors import DomainError, SaturationError
from .propagation import (slant_absorption_grid, slant_range, spreading_loss,
                          terrestrial_path_loss)

SUPPORTED_ORDERS = (4, 16, 64, 256, 1024)
SCAN_MODES = ("nadir_conic", "limb")
POWER_CAP_DBW = 80.0
POWER_FLOOR_DBW = -100.0
POWER_RESOLUTION_DB = 0.01
CONTOUR_COARSE_STEP_DEG = 0.25
CONTOUR_RESOLUTION_DEG = 0.01


@dataclass(frozen=True)
class ModulationScheme:
    order_M: int

    def __post_init__(self):
        if self.order_M not in SUPPORTED_ORDERS:
            raise DomainError(f"unsupported QAM order {self.order_M}; use one of {SUPPORTED_ORDERS}")

    @property
    def bits_per_symbol(self):
        return int(self.order_M).bit_length() - 1


def qam(order_M):
    return ModulationScheme(int(order_M))


@dataclass(frozen=True)
class LinkScenario:
    """One ground transmitter and one satellite receiver (Table IV defaults)."""

    frequency_GHz: float = 230.0
    tx_power_dBW: float = 18.6
    tx_gain_max_dBi: float = 40.0
    rx_gain_max_dBi: float = 40.0
    tx_tilt_deg: float = 0.0
    satellite_gain_dBi: float = 20.0
    satellite_altitude_km: float = 705.0
    elevation_deg: float = 30.0
    noise_psd_dBW_Hz: float = -160.0
    bandwidth_Hz: float = 31.25e9
    mimo_streams: int = 8
    sideband_factor: int = 1
    satellite_gain_model: str = "constant"

    def __post_init__(self):
        gains = (self.tx_gain_max_dBi, self.rx_gain_max_dBi, self.satellite_gain_dBi, self.tx_power_dBW)
        if not all(math.isfinite(g) for g in gains):
            raise DomainError("powers and gains must be finite")
        if not self.bandwidth_Hz > 0:
            raise DomainError("bandwidth must be positive")
        if self.mimo_streams < 1:
            raise DomainError("at least one MIMO stream is required")
        if self.sideband_factor not in (1, 2):
            raise DomainError("sideband factor must be 1 or 2")
        if self.satellite_gain_model not in ("constant", "pattern"):
            raise DomainError("satellite gain model must be 'constant' or 'pattern'")


@dataclass(frozen=True)
class ProtectedBand:
    band_low_GHz: float
    band_high_GHz: float
    threshold_nadir_dBW: float | None
    threshold_limb_dBW: float | None
    lowest_satellite_altitude_km: float
    satellite_name: str

    def __post_init__(self):
        if not self.band_low_GHz < self.band_high_GHz:
            raise DomainError("band_low must be below band_high")
        if self.threshold_nadir_dBW is None and self.threshold_limb_dBW is None:
            raise DomainError("a protected band needs at least one threshold")

    def contains(self, frequency_GHz):
        return self.band_low_GHz <= frequency_GHz <= self.band_high_GHz

    def threshold(self, scan_mode):
        if scan_mode not in SCAN_MODES:
            raise DomainError(f"scan mode must be one of {SCAN_MODES}")
        return self.threshold_nadir_dBW if scan_mode == "nadir_conic" else self.threshold_limb_dBW


@dataclass(frozen=True)
class BandVerdict:
    compliant: bool
    margin_dB: float  # received power minus threshold; positive when violating
    band: ProtectedBand | None


def protected_bands():
    return tuple(ProtectedBand(**row) for row in datasets.protected_band_rows())


# -- small closed forms ------------------------------------------------------

def required_bandwidth(target_rate_bps, modulation, mimo_streams, sideband_factor=1):
    """Bandwidth (Hz) reaching ``target_rate_bps`` with K streams of M-QAM."""
    if mimo_streams <= 0:
        raise DomainError("mimo_streams must be positive")
    if target_rate_bps <= 0:
        raise DomainError("target rate must be positive")
    if sideband_factor not in (1, 2):
        raise DomainError("sideband factor must be 1 or 2")
    return target_rate_bps * sideband_factor / (mimo_streams * modulation.bits_per_symbol)


def snr(received_power_dBW, bandwidth_Hz, noise_psd_dBW_Hz=-160.0):
    if bandwidth_Hz <= 0:
        raise DomainError("bandwidth must be positive")
    return received_power_dBW - (noise_psd_dBW_Hz + 10 * math.log10(bandwidth_Hz))


def radar_range_resolution(bandwidth_Hz):
    if bandwidth_Hz <= 0:
        raise DomainError("bandwidth must be positive")
    return SPEED_OF_LIGHT / (2 * bandwidth_Hz)


def radiometer_sensitivity(system_temperature_K, bandwidth_Hz, integration_time_s):
    if min(system_temperature_K, bandwidth_Hz, integration_time_s) <= 0:
        raise DomainError("all radiometer inputs must be positive")
    return system_temperature_K / math.sqrt(bandwidth_Hz * integration_time_s)


# -- bit error rate ----------------------------------------------------------

@lru_cache(maxsize=None)
def _ber_terms(order_M):
    """Coefficients and erfc multipliers of the exact Gray-coded square-QAM BER.

    P_b = sum_j c_j * erfc(a_j * x), x = sqrt(1.5 * Es/N0 / (M - 1)).
    """
    side = math.isqrt(order_M)
    bits_per_dim = side.bit_length() - 1
    coeffs, mults = {}, {}
    for k in range(1, bits_per_dim + 1):
        for i in range(int((1 - 2.0**-k) * side)):
            w = (-1) ** ((i * 2 ** (k - 1)) // side) * (2 ** (k - 1) - math.floor(i * 2 ** (k - 1) / side + 0.5))
            coeffs[i] = coeffs.get(i, 0.0) + w / (side * bits_per_dim)
    for i in coeffs:
        mults[i] = 2 * i + 1
    idx = sorted(coeffs)
    return np.array([coeffs[i] for i in idx]), np.array([mults[i] for i in idx], dtype=float)


def qam_log_ber(modulation, snr_per_symbol_dB):
    """Natural log of the bit-error probability; exact for Gray-coded square QAM.

    Evaluated via the scaled complementary error function so that it stays
    finite where the probability itself underflows.
    """
    coeffs, mults = _ber_terms(modulation.order_M)
    es_n0 = 10 ** (np.asarray(snr_per_symbol_dB, dtype=float) / 10)
    x = np.sqrt(1.5 * es_n0 / (modulation.order_M - 1))[..., None]
    # erfc(a x) = erfcx(a x) * exp(-a^2 x^2); factor out exp(-x^2)
    scaled = coeffs * erfcx(mults * x) * np.exp(-(mults**2 - 1) * x**2)
    out = -x[..., 0] ** 2 + np.log(np.sum(scaled, axis=-1))
    return float(out) if out.ndim == 0 else out


def qam_ber(modulation, snr_per_symbol_dB):
    return np.exp(qam_log_ber(modulation, snr_per_symbol_dB))


def required_snr(modulation, ber_target):
    """Es/N0 (dB) at which the BER equals ``ber_target``."""
    if not 0 < ber_target < 0.5:
        raise DomainError("BER target must lie in (0, 0.5)")
    log_t = math.log(ber_target)
    return brentq(lambda s: qam_log_ber(modulation, s) - log_t, -30.0, 80.0, xtol=1e-10)


# -- terrestrial Tbps link ---------------------------------------------------

def _solve_stream_power(snr_of_power, snr_needed):
    lo, hi = POWER_FLOOR_DBW, POWER_CAP_DBW
    if snr_of_power(hi) < snr_needed:
        raise SaturationError(f"link does not close below {POWER_CAP_DBW} dBW")
    while hi - lo > POWER_RESOLUTION_DB:
        mid = 0.5 * (lo + hi)
        if snr_of_power(mid) >= snr_needed:
            hi = mid
        else:
            lo = mid
    return hi


def required_tx_power(frequency_GHz, distance_km, modulation, mimo_streams_set=(2, 4, 8),
                      target_rate_bps=1e12, ber_target=1e-5, tx_gain_dBi=40.0, rx_gain_dBi=40.0,
                      noise_psd_dBW_Hz=-160.0, sideband_factor=1):
    """Transmit power (dBW) for a ground link at h = 0, averaged over MIMO ranks.

    Each rank K gets bandwidth R*alpha/(K*S); the total power is split evenly
    over the K streams. The per-K solutions are bisected to 0.01 dB and their
    dB values averaged.
    """
    path = terrestrial_path_loss(frequency_GHz, distance_km, 0.0)
    loss = path.total_dB
    snr_needed = required_snr(modulation, ber_target)
    powers = []
    for k in mimo_streams_set:
        bw = required_bandwidth(target_rate_bps, modulation, k, sideband_factor)

        def stream_snr(p_tx, k=k, bw=bw):
            rx = p_tx - 10 * math.log10(k) - loss + tx_gain_dBi + rx_gain_dBi
            return snr(rx, bw, noise_psd_dBW_Hz)

        powers.append(_solve_stream_power(stream_snr, snr_needed))
    return float(np.mean(powers))


# -- ground-to-satellite interference ----------------------------------------

def _ground_gain(scenario, elevation_deg):
    ant = build_antenna(scenario.tx_gain_max_dBi, scenario.frequency_GHz)
    return gain_at(ant, off_axis_angle(elevation_deg, scenario.tx_tilt_deg))


def _satellite_gain(scenario, elevation_deg):
    if scenario.satellite_gain_model == "constant":
        return np.full(np.shape(elevation_deg), scenario.satellite_gain_dBi)
    ant = build_antenna(scenario.satellite_gain_dBi, scenario.frequency_GHz)
    return gain_at(ant, off_axis_angle(elevation_deg, scenario.tx_tilt_deg))


def slant_path_loss(frequency_GHz, altitude_km, elevation_deg, include_absorption=True):
    """Total Earth-space loss (dB), broadcasting over altitude and elevation."""
    r, el = np.broadcast_arrays(np.asarray(altitude_km, float), np.asarray(elevation_deg, float))
    loss = spreading_loss(frequency_GHz, slant_range(r, el))
    if include_absorption:
        loss = loss + slant_absorption_grid(frequency_GHz, r, el)
    return loss


def rfi_grid(scenario, altitude_km, elevation_deg, include_absorption=True):
    """Received RFI (dBW) over broadcast altitude/elevation arrays."""
    r, el = np.broadcast_arrays(np.asarray(altitude_km, float), np.asarray(elevation_deg, float))
    loss = slant_path_loss(scenario.frequency_GHz, r, el, include_absorption)
    return (scenario.tx_power_dBW - loss + _ground_gain(scenario, el)
            + _satellite_gain(scenario, el))


def received_rfi(scenario, include_absorption=True):
    """Power (dBW) the satellite receives from the ground transmitter."""
    return float(rfi_grid(scenario, scenario.satellite_altitude_km, scenario.elevation_deg,
                          include_absorption))


@dataclass(frozen=True)
class ContourRow:
    altitude_km: float
    intervals: tuple  # ((theta_lo, theta_hi), ...) in degrees where RFI > threshold


def _violation_intervals(excess, coarse):
    """Refine the sign pattern of ``excess`` sampled on ``coarse`` by bisection."""
    values = excess(coarse)
    bad = values > 0

    def boundary(a, b, a_bad):
        # a and b straddle a sign change; return the violating side at resolution
        while abs(b - a) > CONTOUR_RESOLUTION_DEG:
            mid = 0.5 * (a + b)
            if (excess(np.array([mid]))[0] > 0) == a_bad:
                a = mid
            else:
                b = mid
        return a if a_bad else b

    intervals = []
    start = coarse[0] if bad[0] else None
    for i in range(1, len(coarse)):
        if bad[i] and not bad[i - 1]:
            start = boundary(coarse[i - 1], coarse[i], False)
        elif bad[i - 1] and not bad[i]:
            intervals.append((float(start), float(boundary(coarse[i - 1], coarse[i], True))))
            start = None
    if start is not None:
        intervals.append((float(start), float(coarse[-1])))
    return tuple(intervals)


def rfi_threshold_contour(scenario_template, threshold_dBW=-160.0, altitude_range_km=(400.0, 720.0),
                          altitude_step_km=1.0, elevation_range_deg=(0.0, 90.0)):
    """Elevation intervals with RFI strictly above the threshold, per altitude."""
    lo, hi = altitude_range_km
    altitudes = np.arange(lo, hi + 1e-9, altitude_step_km)
    coarse = np.arange(elevation_range_deg[0], elevation_range_deg[1] + 1e-9, CONTOUR_COARSE_STEP_DEG)
    rows = []
    for r in altitudes:
        def excess(el, r=r):
            return rfi_grid(scenario_template, r, el) - threshold_dBW
        rows.append(ContourRow(float(r), _violation_intervals(excess, coarse)))
    return rows


def max_rfi_over_grid(scenario_template, altitudes_km, elevations_deg):
    grid = rfi_grid(scenario_template, np.asarray(altitudes_km)[:, None], np.asarray(elevations_deg)[None, :])
    return float(grid.max())


def tilt_threshold(scenario_template, threshold_dBW=-160.0, altitudes_km=None, elevations_deg=None,
                   tilt_range_deg=(0.0, 90.0), resolution_deg=CONTOUR_RESOLUTION_DEG):
    """Smallest ground-antenna tilt for which any grid cell exceeds the threshold.

    Returns ``None`` if even the largest tilt in range stays compliant. Assumes
    the worst-case RFI grows with tilt up to the first violation.
    """
    if altitudes_km is None:
        altitudes_km = np.arange(400.0, 720.0 + 1e-9, 1.0)
    if elevations_deg is None:
        elevations_deg = np.arange(0.0, 90.0 + 1e-9, CONTOUR_COARSE_STEP_DEG)

    def violates(tilt):
        s = replace(scenario_template, tx_tilt_deg=float(tilt))
        return max_rfi_over_grid(s, altitudes_km, elevations_deg) > threshold_dBW

    lo, hi = tilt_range_deg
    if violates(lo):
        return float(lo)
    if not violates(hi):
        return None
    while hi - lo > resolution_deg:
        mid = 0.5 * (lo + hi)
        if violates(mid):
            hi = mid
        else:
            lo = mid
    return float(hi)


@dataclass(frozen=True)
class GainLossRow:
    elevation_deg: float
    ground_gain_dBi: float
    path_gain_dB: float
    received_dBW: float


def gain_loss_decomposition(scenario_template, elevation_grid):
    el = np.asarray(elevation_grid, dtype=float)
    r = scenario_template.satellite_altitude_km
    gain = _ground_gain(scenario_template, el)
    loss = slant_path_loss(scenario_template.frequency_GHz, r, el)
    rx = scenario_template.tx_power_dBW - loss + gain + _satellite_gain(scenario_template, el)
    return [GainLossRow(float(a), float(b), float(-c), float(d)) for a, b, c, d in zip(el, gain, loss, rx)]


def check_band(frequency_GHz, received_power_dBW, scan_mode="nadir_conic"):
    """Compare received power with the Table V threshold of the enclosing band.

    Ties count as compliant; violation needs power strictly above threshold.
    """
    if scan_mode not in SCAN_MODES:
        raise DomainError(f"scan mode must be one of {SCAN_MODES}")
    for band in protected_bands():
        if band.contains(frequency_GHz):
            limit = band.threshold(scan_mode)
            if limit is None:
                return BandVerdict(True, -math.inf, band)
            excess = received_power_dBW - limit
            return BandVerdict(excess <= 0, excess, band)
    return BandVerdict(True, -math.inf, None)
