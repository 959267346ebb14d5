"""Pass prediction over a ground site and replay of band-switching and blanking policies."""

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import EARTH_RADIUS_KM, MU_EARTH, SIDEREAL_DAY_S
from .errors import DomainError

EARTH_ROTATION_DEG_S = 360.0 / SIDEREAL_DAY_S
PASS_STEP_S = 1.0


@dataclass(frozen=True)
class CircularOrbit:
    altitude_km: float
    inclination_deg: float
    raan_deg: float = 0.0
    initial_phase_deg: float = 0.0
    epoch_s: float = 0.0

    def __post_init__(self):
        if not self.altitude_km > 0:
            raise DomainError("orbit altitude must be positive")

    @property
    def radius_km(self):
        return EARTH_RADIUS_KM + self.altitude_km

    @property
    def period_s(self):
        return 2 * math.pi * math.sqrt(self.radius_km**3 / MU_EARTH)


@dataclass(frozen=True)
class GroundStation:
    latitude_deg: float
    longitude_deg: float
    name: str = "station"

    def __post_init__(self):
        if not -90 <= self.latitude_deg <= 90:
            raise DomainError("station latitude must lie in [-90, 90]")


@dataclass(frozen=True)
class PassInterval:
    start_s: float
    end_s: float
    max_elevation_deg: float
    satellite_id: str = "sat-0"

    def __post_init__(self):
        if not self.start_s < self.end_s:
            raise DomainError("pass must start before it ends")

    @property
    def duration_s(self):
        return self.end_s - self.start_s


@dataclass(frozen=True)
class SwitchPolicy:
    primary_band_GHz: float
    fallback_band_GHz: float
    trigger_elevation_deg: float = 0.0
    switch_latency_s: float = 0.005

    def __post_init__(self):
        if self.primary_band_GHz == self.fallback_band_GHz:
            raise DomainError("primary and fallback bands must differ")
        if self.switch_latency_s < 0:
            raise DomainError("switch latency cannot be negative")

    @classmethod
    def centralized(cls, primary_band_GHz, fallback_band_GHz, trigger_elevation_deg=0.0):
        return cls(primary_band_GHz, fallback_band_GHz, trigger_elevation_deg, 0.005)

    @classmethod
    def distributed(cls, primary_band_GHz, fallback_band_GHz, trigger_elevation_deg=0.0):
        return cls(primary_band_GHz, fallback_band_GHz, trigger_elevation_deg, 0.100)


@dataclass(frozen=True)
class SwitchEvent:
    t_start: float
    t_end: float
    band_GHz: float
    state: str  # primary, switching or fallback


@dataclass
class SwitchingReport:
    time_in_primary_s: float
    time_in_fallback_s: float
    downtime_s: float
    violation_s: float
    events: list = field(default_factory=list)


# -- geometry ----------------------------------------------------------------

def _eci_unit(orbit, t_s):
    t = np.asarray(t_s, dtype=float)
    if np.any(t < orbit.epoch_s):
        raise DomainError("propagation time precedes the orbit epoch")
    mean_motion = 2 * math.pi / orbit.period_s
    u = math.radians(orbit.initial_phase_deg) + mean_motion * (t - orbit.epoch_s)
    raan, inc = math.radians(orbit.raan_deg), math.radians(orbit.inclination_deg)
    cu, su = np.cos(u), np.sin(u)
    x = math.cos(raan) * cu - math.sin(raan) * su * math.cos(inc)
    y = math.sin(raan) * cu + math.cos(raan) * su * math.cos(inc)
    z = su * math.sin(inc)
    return x, y, z


def _ecef_unit(orbit, t_s):
    """Satellite direction in Earth-fixed axes; Greenwich aligned with inertial x at t = 0."""
    x, y, z = _eci_unit(orbit, t_s)
    g = np.radians(EARTH_ROTATION_DEG_S * np.asarray(t_s, dtype=float))
    cg, sg = np.cos(g), np.sin(g)
    return cg * x + sg * y, -sg * x + cg * y, z


def _station_unit(lat_deg, lon_deg):
    lat, lon = math.radians(lat_deg), math.radians(lon_deg)
    return np.array([math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat)])


def propagate(orbit, t_s):
    """Sub-satellite latitude, longitude (deg, in [-180, 180)) and altitude at ``t_s``."""
    x, y, z = _ecef_unit(orbit, t_s)
    lat = np.degrees(np.arcsin(np.clip(z, -1, 1)))
    lon = (np.degrees(np.arctan2(y, x)) + 180.0) % 360.0 - 180.0
    if np.ndim(lat) == 0:
        return float(lat), float(lon), orbit.altitude_km
    return lat, lon, orbit.altitude_km


def elevation_from(station_lat_deg, station_lon_deg, orbit, t_s):
    """Topocentric elevation (deg) of the satellite seen from a sea-level site."""
    g = _station_unit(station_lat_deg, station_lon_deg)
    x, y, z = _ecef_unit(orbit, t_s)
    cos_c = g[0] * x + g[1] * y + g[2] * z
    r, R = orbit.radius_km, EARTH_RADIUS_KM
    # components of the line of sight along the local vertical and horizontal
    up = r * cos_c - R
    horiz = r * np.sqrt(np.clip(1 - cos_c**2, 0, None))
    el = np.degrees(np.arctan2(up, horiz))
    return float(el) if np.ndim(el) == 0 else el


# -- passes ------------------------------------------------------------------

def _runs(mask):
    """Start and stop (exclusive) indices of the True runs in ``mask``."""
    d = np.diff(np.concatenate(([0], mask.astype(np.int8), [0])))
    return np.flatnonzero(d == 1), np.flatnonzero(d == -1)


def predict_passes(station, orbit, window_s, min_elevation_deg=0.0, start_s=None, satellite_id="sat-0"):
    """Visibility intervals sampled on a 1 s grid.

    A pass covers the samples with elevation at or above the threshold; each
    sample stands for the second that follows it, so a pass ends one second
    after its last visible sample (clipped to the window).
    """
    if not window_s > 0:
        raise DomainError("window must be positive")
    t0 = orbit.epoch_s if start_s is None else float(start_s)
    t_end = t0 + window_s
    t = t0 + PASS_STEP_S * np.arange(int(math.ceil(window_s / PASS_STEP_S)))
    el = elevation_from(station.latitude_deg, station.longitude_deg, orbit, t)
    el = np.atleast_1d(el)
    starts, stops = _runs(el >= min_elevation_deg)
    return [PassInterval(float(t[a]), float(min(t[b - 1] + PASS_STEP_S, t_end)),
                         float(el[a:b].max()), satellite_id)
            for a, b in zip(starts, stops)]


def stitch_passes(chunks):
    """Concatenate pass lists from consecutive sub-windows, joining split passes."""
    out = []
    for p in (p for chunk in chunks for p in chunk):
        if out and out[-1].satellite_id == p.satellite_id and out[-1].end_s == p.start_s:
            prev = out.pop()
            p = PassInterval(prev.start_s, p.end_s, max(prev.max_elevation_deg, p.max_elevation_deg),
                             p.satellite_id)
        out.append(p)
    return out


def merge_intervals(passes):
    """Union of pass intervals as sorted, disjoint (start, end) pairs."""
    spans = sorted((p.start_s, p.end_s) if isinstance(p, PassInterval) else tuple(p) for p in passes)
    merged = []
    for a, b in spans:
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    return merged


def _overlap(spans_a, spans_b):
    total = 0.0
    for a0, a1 in spans_a:
        for b0, b1 in spans_b:
            total += max(0.0, min(a1, b1) - max(a0, b0))
    return total


# -- policies ----------------------------------------------------------------

def simulate_switching(passes, policy, window_s, start_s=0.0, trigger_passes=None):
    """Replay band switching against protected passes.

    The link leaves the primary band when a trigger interval opens; the
    retune takes ``switch_latency_s``, during which no traffic flows but the
    transmitter is still on the primary band. It returns to the primary band
    as soon as the trigger interval closes. By default the trigger intervals
    are the passes that reach the policy's trigger elevation. Overlapping
    passes are merged first. Violation time is primary-band emission while
    any pass is active.
    """
    t_lo, t_hi = float(start_s), float(start_s) + window_s
    if trigger_passes is None:
        trigger_passes = [p for p in passes if p.max_elevation_deg >= policy.trigger_elevation_deg]
    protected = [(max(a, t_lo), min(b, t_hi)) for a, b in merge_intervals(passes) if b > t_lo and a < t_hi]
    triggers = [(max(a, t_lo), min(b, t_hi)) for a, b in merge_intervals(trigger_passes)
                if b > t_lo and a < t_hi]

    events, emitting = [], []
    cursor = t_lo
    for a, b in triggers:
        if a > cursor:
            events.append(SwitchEvent(cursor, a, policy.primary_band_GHz, "primary"))
            emitting.append((cursor, a))
        switch_end = min(a + policy.switch_latency_s, t_hi)
        if switch_end > a:
            events.append(SwitchEvent(a, switch_end, policy.primary_band_GHz, "switching"))
            emitting.append((a, switch_end))
        if b > switch_end:
            events.append(SwitchEvent(switch_end, b, policy.fallback_band_GHz, "fallback"))
        cursor = max(b, switch_end)
    if cursor < t_hi:
        events.append(SwitchEvent(cursor, t_hi, policy.primary_band_GHz, "primary"))
        emitting.append((cursor, t_hi))

    def total(state):
        return math.fsum(e.t_end - e.t_start for e in events if e.state == state)

    return SwitchingReport(total("primary"), total("fallback"), total("switching"),
                           _overlap(emitting, protected), events)


def blanking_availability(num_satellites, footprint_diameter_km, orbit_altitude_km, window_s, station,
                          inclination_deg=98.0, trials=8, step_s=1.0, seed=0):
    """Fraction of time the site lies outside every satellite footprint.

    Planes get uniformly random RAAN and in-plane phase; the result is the
    mean over ``trials`` independent phasings. Satellite ``i`` keeps the same
    draw whatever the constellation size, so availability can only fall as
    satellites are added or footprints widen.
    """
    if not footprint_diameter_km > 0:
        raise DomainError("footprint diameter must be positive")
    if num_satellites == 0:
        return 1.0
    g = _station_unit(station.latitude_deg, station.longitude_deg)
    cos_limit = math.cos(min(footprint_diameter_km / 2 / EARTH_RADIUS_KM, math.pi))
    t = step_s * np.arange(int(math.ceil(window_s / step_s)))
    fractions = []
    for trial in range(trials):
        raan = np.random.default_rng([seed, trial, 0]).uniform(0, 360, num_satellites)
        phase = np.random.default_rng([seed, trial, 1]).uniform(0, 360, num_satellites)
        covered = np.zeros(t.size, dtype=bool)
        for ra, ph in zip(raan, phase):
            orbit = CircularOrbit(orbit_altitude_km, inclination_deg, float(ra), float(ph))
            x, y, z = _ecef_unit(orbit, t)
            covered |= (g[0] * x + g[1] * y + g[2] * z) >= cos_limit
        fractions.append(1.0 - covered.mean())
    return math.fsum(fractions) / trials
