"""Spreading loss, Earth-space slant geometry and gaseous path absorption."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from . import atmosphere
from .atmosphere import (REFRACTIVITY_SCALE_KM, REFRACTIVITY_SURFACE,
                         SURFACE_WATER_VAPOR_DENSITY, TOP_OF_ATMOSPHERE_KM)
from .constants import EARTH_RADIUS_KM
from .errors import DomainError

LAYER_STEP_KM = 0.1
CROSSOVER_CAP_KM = 500.0
CROSSOVER_RESOLUTION_KM = 0.001

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(4)


@dataclass(frozen=True)
class SlantGeometry:
    satellite_altitude_km: float
    elevation_deg: float
    earth_radius_km: float = EARTH_RADIUS_KM

    def __post_init__(self):
        if not self.satellite_altitude_km > 0:
            raise DomainError("satellite altitude must be positive")
        if not 0 <= self.elevation_deg <= 90:
            raise DomainError("elevation must lie in [0, 90] deg")


@dataclass(frozen=True)
class PathLoss:
    spreading_dB: float
    absorption_dB: float

    @property
    def total_dB(self):
        return self.spreading_dB + self.absorption_dB


def spreading_loss(frequency_GHz, distance_km):
    """Free-space spreading loss in dB (f in GHz, d in km)."""
    f = np.asarray(frequency_GHz, dtype=float)
    d = np.asarray(distance_km, dtype=float)
    if np.any(f <= 0) or np.any(d <= 0):
        raise DomainError("frequency and distance must be positive")
    out = 92.45 + 20 * np.log10(f * d)
    return float(out) if out.ndim == 0 else out


def slant_range(altitude_km, elevation_deg, earth_radius_km=EARTH_RADIUS_KM):
    """Vectorised straight-line distance from the ground to a satellite."""
    r = np.asarray(altitude_km, dtype=float)
    s = np.sin(np.radians(elevation_deg))
    R = earth_radius_km
    return np.sqrt(R**2 * s**2 + 2 * R * r + r**2) - R * s


def slant_distance(geometry):
    return float(slant_range(geometry.satellite_altitude_km, geometry.elevation_deg,
                             geometry.earth_radius_km))


def terrestrial_path_loss(frequency_GHz, distance_km, altitude_km,
                          surface_water_vapor_density=SURFACE_WATER_VAPOR_DENSITY):
    """Horizontal link with both ends at ``altitude_km``."""
    gamma = atmosphere.attenuation_profile(frequency_GHz, altitude_km, surface_water_vapor_density)
    return PathLoss(spreading_loss(frequency_GHz, distance_km), float(gamma) * distance_km)


def _layer_boundaries(h_lo, h_hi, step):
    n = int(np.floor((h_hi - h_lo) / step + 1e-9))
    h = h_lo + step * np.arange(n + 1)
    if h_hi - h[-1] > 1e-9:
        h = np.append(h, h_hi)
    return h


@lru_cache(maxsize=256)
def _gamma_spline(frequency_GHz, h_lo, h_hi, step, rho0):
    h = _layer_boundaries(h_lo, h_hi, step)
    if len(h) < 2:
        h = np.array([h_lo, h_hi])
    gamma = atmosphere.attenuation_profile(frequency_GHz, h, rho0)
    return CubicSpline(h, gamma)


def _radial_index(h, R):
    """n(h)*(R+h) and its height derivative."""
    n = 1 + REFRACTIVITY_SURFACE * 1e-6 * np.exp(-h / REFRACTIVITY_SCALE_KM)
    dn = -(n - 1) / REFRACTIVITY_SCALE_KM
    return n * (R + h), n + (R + h) * dn


def _absorption(frequency_GHz, elevation_deg, h_lo, h_hi, step, rho0, R):
    if h_hi <= h_lo:
        return 0.0
    spline = _gamma_spline(float(frequency_GHz), float(h_lo), float(h_hi), float(step), float(rho0))
    h = _layer_boundaries(h_lo, h_hi, step)
    if elevation_deg >= 90.0:
        mid, half = (h[1:] + h[:-1]) / 2, (h[1:] - h[:-1]) / 2
        nodes = mid[:, None] + half[:, None] * _GL_NODES
        return float(np.sum(half[:, None] * _GL_WEIGHTS * spline(nodes)))

    # Integrate in q = n r sin(theta): dh / sin(theta) = dq / (n r)', which
    # stays finite where the ray is horizontal.
    m_ground, _ = _radial_index(h_lo, R)
    K = m_ground * np.cos(np.radians(elevation_deg))
    m_b, _ = _radial_index(h, R)
    q_b = np.sqrt(np.clip(m_b**2 - K**2, 0, None))
    q_mid, q_half = (q_b[1:] + q_b[:-1]) / 2, (q_b[1:] - q_b[:-1]) / 2
    q = q_mid[:, None] + q_half[:, None] * _GL_NODES
    m = np.sqrt(K**2 + q**2)
    # invert m = n(h)(R+h) by Newton, seeded by linear interpolation in m
    frac = (m - m_b[:-1, None]) / (m_b[1:, None] - m_b[:-1, None])
    hn = h[:-1, None] + frac * (h[1:, None] - h[:-1, None])
    for _ in range(4):
        val, der = _radial_index(hn, R)
        hn = hn - (val - m) / der
    _, der = _radial_index(hn, R)
    g = spline(hn) / der
    return float(np.sum(q_half[:, None] * _GL_WEIGHTS * g))


def slant_absorption(frequency_GHz, geometry, ground_height_km=0.0, step_km=LAYER_STEP_KM,
                     surface_water_vapor_density=SURFACE_WATER_VAPOR_DENSITY):
    """Gaseous absorption (dB) along the refracted Earth-space ray.

    Layers run from the ground to ``min(r, 100 km)``; the medium above the
    reference atmosphere contributes nothing.
    """
    if ground_height_km < 0:
        raise DomainError("ground height must be non-negative")
    atmosphere._check_frequency(frequency_GHz)
    top = min(geometry.satellite_altitude_km, TOP_OF_ATMOSPHERE_KM)
    return _absorption(frequency_GHz, geometry.elevation_deg, ground_height_km, top,
                       step_km, surface_water_vapor_density, geometry.earth_radius_km)


@lru_cache(maxsize=65536)
def _cached_absorption(frequency_GHz, elevation_deg, top, rho0):
    return _absorption(frequency_GHz, elevation_deg, 0.0, top, LAYER_STEP_KM, rho0,
                       EARTH_RADIUS_KM)


def slant_absorption_grid(frequency_GHz, altitude_km, elevation_deg,
                          surface_water_vapor_density=SURFACE_WATER_VAPOR_DENSITY):
    """Absorption for arrays of (altitude, elevation) from a ground station at 0 km.

    Equivalent to calling :func:`slant_absorption` per element, with results
    memoised per elevation for satellites above the atmosphere.
    """
    atmosphere._check_frequency(frequency_GHz)
    r, el = np.broadcast_arrays(np.asarray(altitude_km, float), np.asarray(elevation_deg, float))
    top = np.minimum(r, TOP_OF_ATMOSPHERE_KM).ravel()
    flat_el = el.ravel()
    out = np.empty(top.shape)
    for t in np.unique(top):
        sel = top == t
        angles, inverse = np.unique(flat_el[sel], return_inverse=True)
        values = np.array([_cached_absorption(float(frequency_GHz), float(e), float(t),
                                              float(surface_water_vapor_density)) for e in angles])
        out[sel] = values[inverse]
    return out.reshape(r.shape)


def total_slant_loss(frequency_GHz, geometry, ground_height_km=0.0,
                     surface_water_vapor_density=SURFACE_WATER_VAPOR_DENSITY):
    spreading = spreading_loss(frequency_GHz, slant_distance(geometry))
    absorption = slant_absorption(frequency_GHz, geometry, ground_height_km,
                                  surface_water_vapor_density=surface_water_vapor_density)
    return PathLoss(spreading, absorption)


def absorption_crossover_distance(frequency_GHz, altitude_km, cap_km=CROSSOVER_CAP_KM,
                                  surface_water_vapor_density=SURFACE_WATER_VAPOR_DENSITY):
    """Shortest terrestrial distance (km) where absorption exceeds spreading.

    Returns ``None`` when absorption stays below spreading up to ``cap_km``.
    The excess ``gamma*d - L_spr(d)`` is convex in ``d`` and negative at 1 m,
    so the crossing is unique and bisection finds it.
    """
    gamma = float(atmosphere.attenuation_profile(frequency_GHz, altitude_km,
                                                 surface_water_vapor_density))

    def excess(d):
        return gamma * d - spreading_loss(frequency_GHz, d)

    lo, hi = CROSSOVER_RESOLUTION_KM, float(cap_km)
    if excess(hi) <= 0:
        return None
    while hi - lo > CROSSOVER_RESOLUTION_KM:
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            hi = mid
        else:
            lo = mid
    return hi
