"""Reference atmosphere, gaseous specific attenuation and ray bending.

The profile is the ITU-R P.835 mean annual global reference atmosphere and the
attenuation is the ITU-R P.676 Annex 1 line-by-line sum (44 oxygen lines,
35 water-vapour lines, plus the dry continuum). Both tables are loaded from the
CSV files in ``thzcoexist/data``.

All functions are pure; arrays broadcast wherever a scalar is documented.
"""

from dataclasses import dataclass

import numpy as np

from . import datasets
from .constants import EARTH_RADIUS_KM
from .errors import DomainError

TOP_OF_ATMOSPHERE_KM = 100.0
SURFACE_WATER_VAPOR_DENSITY = 7.5  # g/m^3
REFRACTIVITY_SURFACE = 315.0  # N-units
REFRACTIVITY_SCALE_KM = 7.35
F_MIN_GHZ, F_MAX_GHZ = 1.0, 350.0

_GEOPOTENTIAL_RADIUS_KM = 6356.766
_BAROMETRIC = 34.1632  # g0*M/R* in K/km


@dataclass(frozen=True)
class AtmosphereSample:
    """State of the air at one height.

    ``pressure_hPa`` is the total barometric pressure of the reference
    profile; the dry-air part entering the line sums is ``dry_pressure_hPa``.
    """

    height_km: float
    temperature_K: float
    pressure_hPa: float
    water_vapor_density_g_m3: float

    def __post_init__(self):
        if not self.temperature_K > 0:
            raise DomainError(f"temperature must be positive, got {self.temperature_K}")
        if not self.pressure_hPa > 0:
            raise DomainError(f"pressure must be positive, got {self.pressure_hPa}")
        if self.water_vapor_density_g_m3 < 0:
            raise DomainError("water-vapour density must be non-negative")

    @property
    def vapor_pressure_hPa(self):
        return vapor_pressure(self.water_vapor_density_g_m3, self.temperature_K)

    @property
    def dry_pressure_hPa(self):
        return self.pressure_hPa - self.vapor_pressure_hPa


@dataclass(frozen=True)
class SpecificAttenuation:
    gamma_oxygen_dB_km: float
    gamma_water_dB_km: float

    @property
    def total_dB_km(self):
        return self.gamma_oxygen_dB_km + self.gamma_water_dB_km


def vapor_pressure(rho_g_m3, temperature_K):
    """Water-vapour partial pressure (hPa) from density and temperature."""
    return np.asarray(rho_g_m3) * np.asarray(temperature_K) / 216.7


def _check_heights(h):
    h = np.asarray(h, dtype=float)
    if np.any(h < 0) or np.any(h > TOP_OF_ATMOSPHERE_KM) or np.any(~np.isfinite(h)):
        raise DomainError(f"height must lie in [0, {TOP_OF_ATMOSPHERE_KM}] km")
    return h


def _lower_profile(h_geo):
    """Temperature and pressure below 86 km from geopotential height."""
    layers = datasets.reference_layers()
    T = np.empty_like(h_geo)
    P = np.empty_like(h_geo)
    for i, (base, top, t_base, lapse, p_base) in enumerate(layers):
        last = i == len(layers) - 1
        sel = (h_geo >= base) & ((h_geo <= top) if last else (h_geo < top))
        dh = h_geo[sel] - base
        T[sel] = t_base + lapse * dh
        if lapse == 0:
            P[sel] = p_base * np.exp(-_BAROMETRIC * dh / t_base)
        else:
            P[sel] = p_base * (t_base / (t_base + lapse * dh)) ** (_BAROMETRIC / lapse)
    return T, P


def _upper_profile(h):
    """Temperature and pressure from 86 to 100 km geometric height."""
    c = datasets.upper_atmosphere()
    T = np.where(
        h < c["t_isothermal_top_km"],
        c["t_isothermal_K"],
        c["t_ellipse_a_K"] - c["t_ellipse_b_K"] * np.sqrt(
            np.clip(1 - ((h - c["t_isothermal_top_km"]) / c["t_ellipse_scale_km"]) ** 2, 0, None)),
    )
    P = np.exp(c["p_a0"] + c["p_a1"] * h + c["p_a2"] * h**2 + c["p_a3"] * h**3 + c["p_a4"] * h**4)
    return T, P


def profile_arrays(height_km, surface_water_vapor_density=SURFACE_WATER_VAPOR_DENSITY):
    """Vectorised reference profile: ``(T [K], P [hPa], rho [g/m^3])``."""
    h = np.atleast_1d(_check_heights(height_km))
    h_geo = _GEOPOTENTIAL_RADIUS_KM * h / (_GEOPOTENTIAL_RADIUS_KM + h)
    top_geo = datasets.reference_layers()[-1][1]
    lower = h_geo <= top_geo
    T = np.empty_like(h)
    P = np.empty_like(h)
    T[lower], P[lower] = _lower_profile(h_geo[lower])
    T[~lower], P[~lower] = _upper_profile(h[~lower])

    c = datasets.upper_atmosphere()
    rho = surface_water_vapor_density * np.exp(-h / c["rho_scale_km"])
    # above the hygropause the mixing ratio is held at its floor value
    floor = c["min_mixing_ratio"] * P
    low_mix = vapor_pressure(rho, T) < floor
    rho = np.where(low_mix, floor * 216.7 / T, rho)
    shape = np.shape(height_km)
    return T.reshape(shape), P.reshape(shape), rho.reshape(shape)


def standard_profile(height_km, surface_water_vapor_density=SURFACE_WATER_VAPOR_DENSITY):
    """Reference atmosphere sample at one geometric height (0-100 km)."""
    T, P, rho = profile_arrays(float(height_km), surface_water_vapor_density)
    return AtmosphereSample(float(height_km), float(T), float(P), float(rho))


def _check_frequency(f):
    f = np.asarray(f, dtype=float)
    if np.any(f < F_MIN_GHZ) or np.any(f > F_MAX_GHZ) or np.any(~np.isfinite(f)):
        raise DomainError(f"frequency must lie in [{F_MIN_GHZ}, {F_MAX_GHZ}] GHz")
    return f


def _line_shape(f, f0, width, delta):
    return (f / f0) * (
        (width - delta * (f0 - f)) / ((f0 - f) ** 2 + width**2)
        + (width - delta * (f0 + f)) / ((f0 + f) ** 2 + width**2)
    )


def gaseous_attenuation(frequency_GHz, temperature_K, dry_pressure_hPa, vapor_pressure_hPa):
    """Oxygen and water-vapour specific attenuation in dB/km (broadcasting).

    Returns a pair of arrays ``(gamma_o, gamma_w)`` with the broadcast shape of
    the inputs.
    """
    f = _check_frequency(frequency_GHz)
    f, T, p, e = np.broadcast_arrays(f, np.asarray(temperature_K, float),
                                     np.asarray(dry_pressure_hPa, float),
                                     np.asarray(vapor_pressure_hPa, float))
    f, T, p, e = (x[..., None] for x in (f, T, p, e))
    theta = 300.0 / T

    ox = datasets.line_table("oxygen")
    f0, a1, a2, a3, a4, a5, a6 = ox.T
    strength = a1 * 1e-7 * p * theta**3 * np.exp(a2 * (1 - theta))
    width = a3 * 1e-4 * (p * theta ** (0.8 - a4) + 1.1 * e * theta)
    width = np.sqrt(width**2 + 2.25e-6)  # Zeeman splitting
    delta = (a5 + a6 * theta) * 1e-4 * (p + e) * theta**0.8
    n_oxygen = np.sum(strength * _line_shape(f, f0, width, delta), axis=-1)

    d = 5.6e-4 * (p + e) * theta**0.8
    n_dry = (f * p * theta**2 * (
        6.14e-5 / (d * (1 + (f / d) ** 2))
        + 1.4e-12 * p * theta**1.5 / (1 + 1.9e-5 * f**1.5)))[..., 0]

    wv = datasets.line_table("water")
    f0, b1, b2, b3, b4, b5, b6 = wv.T
    strength = b1 * 1e-1 * e * theta**3.5 * np.exp(b2 * (1 - theta))
    width = b3 * 1e-4 * (p * theta**b4 + b5 * e * theta**b6)
    width = 0.535 * width + np.sqrt(0.217 * width**2 + 2.1316e-12 * f0**2 / theta)  # Doppler
    n_water = np.sum(strength * _line_shape(f, f0, width, 0.0), axis=-1)

    f = f[..., 0]
    gamma_o = 0.1820 * f * (n_oxygen + n_dry)
    gamma_w = 0.1820 * f * n_water
    return gamma_o, gamma_w


def specific_attenuation(frequency_GHz, sample):
    """Specific attenuation of ``sample`` at one frequency."""
    go, gw = gaseous_attenuation(
        float(frequency_GHz), sample.temperature_K, sample.dry_pressure_hPa,
        sample.vapor_pressure_hPa)
    return SpecificAttenuation(float(go), float(gw))


def attenuation_profile(frequency_GHz, height_km,
                        surface_water_vapor_density=SURFACE_WATER_VAPOR_DENSITY):
    """Total specific attenuation (dB/km) along the reference profile."""
    T, P, rho = profile_arrays(height_km, surface_water_vapor_density)
    e = vapor_pressure(rho, T)
    go, gw = gaseous_attenuation(frequency_GHz, T, P - e, e)
    return go + gw


def refractive_index(height_km):
    """Exponential reference refractivity profile, as 1 + N*1e-6."""
    return 1.0 + REFRACTIVITY_SURFACE * 1e-6 * np.exp(-np.asarray(height_km) / REFRACTIVITY_SCALE_KM)


def apparent_elevation(height_km, ground_elevation_deg, refraction=True):
    """Local elevation angle (deg) of a ray at ``height_km``.

    Uses the spherical-strata invariant ``n(h) (R + h) cos(theta(h))``. With
    ``refraction=False`` the ground angle is returned unchanged.
    """
    h = _check_heights(height_km)
    el = np.asarray(ground_elevation_deg, dtype=float)
    if np.any(el < 0) or np.any(el > 90):
        raise DomainError("ground elevation must lie in [0, 90] deg")
    if not refraction:
        return np.broadcast_to(el, np.broadcast(h, el).shape) * 1.0
    invariant = refractive_index(0.0) * EARTH_RADIUS_KM * np.cos(np.radians(el))
    cos_h = invariant / (refractive_index(h) * (EARTH_RADIUS_KM + h))
    return np.degrees(np.arccos(np.clip(cos_h, -1.0, 1.0)))
