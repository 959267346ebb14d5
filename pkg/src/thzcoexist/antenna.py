"""ITU-R piecewise directional antenna pattern for frequencies above 70 GHz."""

from dataclasses import dataclass, field

import numpy as np

from .constants import SPEED_OF_LIGHT
from .errors import DomainError

MIN_GAIN_DBI = 7.7  # D = lambda at this gain


@dataclass(frozen=True)
class AntennaModel:
    """Reference antenna built from its boresight gain and carrier frequency.

    The derived fields are filled in by :func:`build_antenna`; angles are in
    degrees.
    """

    g_max_dBi: float
    frequency_GHz: float
    diameter_m: float = field(init=False)
    g1_dBi: float = field(init=False)
    theta_m_deg: float = field(init=False)
    theta_r_deg: float = field(init=False)

    def __post_init__(self):
        if not np.isfinite(self.g_max_dBi) or self.g_max_dBi < MIN_GAIN_DBI:
            raise DomainError(
                f"g_max must be at least {MIN_GAIN_DBI} dBi (sub-wavelength aperture otherwise)")
        if not self.frequency_GHz > 0:
            raise DomainError("frequency must be positive")
        d_over_lambda = 10 ** ((self.g_max_dBi - MIN_GAIN_DBI) / 20)
        g1 = 2 + 15 * np.log10(d_over_lambda)
        # lambda/D form; D/lambda as typeset would put theta_m far beyond 180 deg
        theta_m = 20 / d_over_lambda * np.sqrt(max(self.g_max_dBi - g1, 0.0))
        theta_r = 15.85 * d_over_lambda ** -0.6
        object.__setattr__(self, "diameter_m", self.wavelength_m * d_over_lambda)
        object.__setattr__(self, "g1_dBi", float(g1))
        object.__setattr__(self, "theta_m_deg", float(theta_m))
        object.__setattr__(self, "theta_r_deg", float(theta_r))

    @property
    def wavelength_m(self):
        return SPEED_OF_LIGHT / (self.frequency_GHz * 1e9)

    @property
    def d_over_lambda(self):
        return 10 ** ((self.g_max_dBi - MIN_GAIN_DBI) / 20)

    @property
    def large_aperture(self):
        """True when the D/lambda > 100 branch of the pattern applies."""
        return self.d_over_lambda > 100

    def breakpoints_deg(self):
        """Angles where the pattern switches branch."""
        if self.large_aperture:
            return (self.theta_m_deg, self.theta_r_deg, 120.0)
        return (self.theta_m_deg, 100 / self.d_over_lambda, 120.0)


def build_antenna(g_max_dBi, frequency_GHz):
    return AntennaModel(float(g_max_dBi), float(frequency_GHz))


def gain_at(antenna, off_axis_deg):
    """Gain (dBi) at an off-axis angle in degrees; vectorised over angles."""
    phi = np.asarray(off_axis_deg, dtype=float)
    if np.any(phi < 0) or np.any(phi > 180) or np.any(~np.isfinite(phi)):
        raise DomainError("off-axis angle must lie in [0, 180] deg")
    dl = antenna.d_over_lambda
    safe_phi = np.where(phi > 0, phi, 1.0)
    main = antenna.g_max_dBi - 2.5e-3 * (dl * phi) ** 2
    if antenna.large_aperture:
        shoulder = antenna.theta_r_deg
        sidelobe = 32 - 25 * np.log10(safe_phi)
        far = np.full_like(phi, -20.0)
    else:
        shoulder = 100 / dl
        sidelobe = 52 - 10 * np.log10(dl) - 25 * np.log10(safe_phi)
        far = np.full_like(phi, -10 * np.log10(dl))
    gain = np.select(
        [phi < antenna.theta_m_deg, phi < shoulder, phi < 120.0],
        [main, np.full_like(phi, antenna.g1_dBi), sidelobe],
        far,
    )
    return float(gain) if gain.ndim == 0 else gain


def off_axis_angle(direction_deg, boresight_deg):
    """Angle between two elevation directions in one vertical plane, in [0, 180]."""
    diff = np.abs(np.asarray(direction_deg, float) - np.asarray(boresight_deg, float)) % 360.0
    return np.minimum(diff, 360.0 - diff)
