"""Planar array factor, phase steering, zero-forcing null steering and sidelobe measurement.

Elements sit in the y-z plane, so broadside points along +x (azimuth 0,
elevation 0). Azimuth rotates toward +y, elevation toward +z.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import maximum_filter

from .errors import DomainError, InfeasibleError

DEFAULT_RESOLUTION_DEG = 0.1
SAME_DIRECTION_TOL = 1e-9


@dataclass
class PlanarArray:
    nx: int
    ny: int
    spacing_wavelengths: float = 0.5
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise DomainError("element counts must be at least 1")
        if not self.spacing_wavelengths > 0:
            raise DomainError("element spacing must be positive")
        if self.weights is None:
            self.weights = np.ones(self.size, dtype=complex)
        self.weights = np.asarray(self.weights, dtype=complex).reshape(self.size)
        if not np.all(np.isfinite(self.weights)):
            raise DomainError("weights must be finite")

    @property
    def size(self):
        return self.nx * self.ny

    def positions(self):
        """Element (y, z) coordinates in wavelengths, centred on the array origin."""
        iy = np.arange(self.nx) - (self.nx - 1) / 2
        iz = np.arange(self.ny) - (self.ny - 1) / 2
        yy, zz = np.meshgrid(iy, iz, indexing="ij")
        return self.spacing_wavelengths * yy.ravel(), self.spacing_wavelengths * zz.ravel()

    def with_weights(self, weights):
        return PlanarArray(self.nx, self.ny, self.spacing_wavelengths, weights)


@dataclass(frozen=True)
class BeamPattern:
    azimuth_deg: np.ndarray
    elevation_deg: np.ndarray
    magnitude_dB: np.ndarray  # shape (n_el, n_az), peak at 0 dB
    resolution_deg: float

    def peak_direction(self):
        i, j = np.unravel_index(np.argmax(self.magnitude_dB), self.magnitude_dB.shape)
        return float(self.azimuth_deg[j]), float(self.elevation_deg[i])


def _direction_cosines(az_deg, el_deg):
    az, el = np.radians(az_deg), np.radians(el_deg)
    return np.cos(el) * np.sin(az), np.sin(el)


def steering_vector(array, direction):
    """Phase terms exp(-j 2π r·u) of every element toward (azimuth, elevation)."""
    y, z = array.positions()
    uy, uz = _direction_cosines(*direction)
    return np.exp(-2j * np.pi * (y * uy + z * uz))


def array_factor(array, az_deg, el_deg, weights=None):
    """Complex array factor b(u)^H w, broadcasting over the direction arrays."""
    w = array.weights if weights is None else np.asarray(weights, dtype=complex)
    y, z = array.positions()
    uy, uz = _direction_cosines(np.asarray(az_deg, float), np.asarray(el_deg, float))
    phase = 2j * np.pi * (uy[..., None] * y + uz[..., None] * z)
    return np.exp(phase) @ w


def steer_weights(array, steer_direction):
    """Unit-magnitude conjugate-phase weights placing the beam peak at ``steer_direction``."""
    return steering_vector(array, steer_direction)


def null_steering_weights(array, steer_direction, null_directions):
    """Steering vector projected onto the orthogonal complement of the null directions."""
    nulls = list(null_directions)
    b0 = steering_vector(array, steer_direction)
    if not nulls:
        return b0
    if len(nulls) >= array.size:
        raise InfeasibleError("number of nulls must be below the number of elements")
    C = np.column_stack([steering_vector(array, d) for d in nulls])
    # a null that coincides with the steer direction leaves nothing to project
    Q, r = np.linalg.qr(C)
    rank = int(np.sum(np.abs(np.diag(r)) > 1e-10 * np.abs(r).max()))
    Q = Q[:, :rank]
    w = b0 - Q @ (Q.conj().T @ b0)
    if np.linalg.norm(w) <= SAME_DIRECTION_TOL * np.linalg.norm(b0):
        raise InfeasibleError("a null direction coincides with the steer direction")
    for d in nulls:
        if np.allclose(_direction_cosines(*d), _direction_cosines(*steer_direction), atol=1e-12):
            raise InfeasibleError("a null direction coincides with the steer direction")
    return w


def pattern(array, grid_resolution_deg=DEFAULT_RESOLUTION_DEG, weights=None):
    """Normalized |AF| in dB over azimuth and elevation in [-90, 90], built row by row."""
    if not grid_resolution_deg > 0:
        raise DomainError("grid resolution must be positive")
    n = int(round(180 / grid_resolution_deg))
    grid = np.linspace(-90.0, 90.0, n + 1)
    w = array.weights if weights is None else np.asarray(weights, dtype=complex)
    W = w.reshape(array.nx, array.ny)
    d = array.spacing_wavelengths
    iy = d * (np.arange(array.nx) - (array.nx - 1) / 2)
    iz = d * (np.arange(array.ny) - (array.ny - 1) / 2)
    mag = np.empty((grid.size, grid.size))
    # the element lattice is separable: sum over z first, then over y
    for i, el in enumerate(grid):
        uy, uz = _direction_cosines(grid, el)
        col = W @ np.exp(2j * np.pi * iz * uz)
        mag[i] = np.abs(np.exp(2j * np.pi * np.outer(uy, iy)) @ col)
    peak = mag.max()
    with np.errstate(divide="ignore"):
        db = 20 * np.log10(mag / peak)
    return BeamPattern(grid, grid.copy(), db, float(grid_resolution_deg))


def angular_separation(az1, el1, az2, el2):
    a1, e1, a2, e2 = map(np.radians, (az1, el1, az2, el2))
    c = np.sin(e1) * np.sin(e2) + np.cos(e1) * np.cos(e2) * np.cos(a1 - a2)
    return np.degrees(np.arccos(np.clip(c, -1, 1)))


def measure_sll(beam, mainlobe_exclusion_deg):
    """Highest local maximum outside a cap around the peak, in dB relative to the peak.

    Using local maxima rather than every grid sample keeps the skirt of a
    mainlobe wider than the cap from being read as a sidelobe.
    """
    if not mainlobe_exclusion_deg > beam.resolution_deg:
        raise DomainError("exclusion radius must exceed the grid resolution")
    az0, el0 = beam.peak_direction()
    az, el = np.meshgrid(beam.azimuth_deg, beam.elevation_deg)
    outside = angular_separation(az, el, az0, el0) > mainlobe_exclusion_deg
    if not outside.any():
        raise DomainError("exclusion cap covers the whole grid")
    m = beam.magnitude_dB
    peaks = (m == maximum_filter(m, size=3, mode="nearest")) & outside & np.isfinite(m)
    if not peaks.any():
        return float(m[outside].max() - m.max())
    return float(m[peaks].max() - m.max())
