"""Data behind each reproduced figure, as named CSV tables plus headline numbers."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import datasets
from .arrays import PlanarArray, array_factor, measure_sll, null_steering_weights, pattern, steer_weights
from .linkbudget import (LinkScenario, gain_loss_decomposition, max_rfi_over_grid, qam,
                         required_bandwidth, required_tx_power, rfi_grid, rfi_threshold_contour,
                         tilt_threshold)
from .errors import SaturationError
from .propagation import (SlantGeometry, absorption_crossover_distance, terrestrial_path_loss,
                          total_slant_loss)

FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig8", "fig9")
WATER_LINE_GHZ = 183.31
PATH_FREQUENCIES = {"a": 150.0, "b": WATER_LINE_GHZ, "c": 230.0}
PROBE_ALTITUDES_KM = (0.0, 2.0, 5.0, 10.0)
CONTOUR_PANELS = {"a": (18.6, 20.0), "b": (18.6, 40.0), "c": (33.4, 20.0), "d": (33.4, 40.0)}
FIG5_FREQUENCIES = {"a": WATER_LINE_GHZ, "b": 230.0}
FIG5_DISTANCES_KM = tuple(np.round(np.arange(0.05, 1.0001, 0.05), 2))


@dataclass
class Table:
    columns: tuple
    rows: list


@dataclass
class FigureData:
    name: str
    tables: dict = field(default_factory=dict)  # file stem -> Table
    headlines: list = field(default_factory=list)


def _map(fn, items, jobs):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _panels(selected, available):
    if selected is None:
        return list(available)
    if selected not in available:
        raise KeyError(f"panel must be one of {', '.join(available)}")
    return [selected]


def fig1(panel=None, **_):
    out = FigureData("fig1")
    distances = 10 ** np.linspace(-3, 2, 101)
    for p in _panels(panel, PATH_FREQUENCIES):
        f = PATH_FREQUENCIES[p]
        rows = []
        for h in PROBE_ALTITUDES_KM:
            for d in distances:
                loss = terrestrial_path_loss(f, d, h)
                rows.append((f, h, d, loss.spreading_dB, loss.absorption_dB, loss.total_dB))
        out.tables[f"fig1_{p}"] = Table(("frequency_GHz", "altitude_km", "distance_km", "spreading_dB",
                                         "absorption_dB", "total_dB"), rows)
        at10 = terrestrial_path_loss(f, 10.0, 0.0)
        out.headlines.append(f"panel {p}: {f} GHz, h=0, d=10 km -> spreading {at10.spreading_dB:.2f} dB, "
                             f"absorption {at10.absorption_dB:.2f} dB")
    return out


def _crossover_row(args):
    f, h = args
    d = absorption_crossover_distance(f, h)
    return d


def fig2(jobs=1, **_):
    out = FigureData("fig2")
    freqs = np.round(np.arange(100.0, 275.0001, 0.5), 1)
    bands = datasets.rr5340_bands()
    cells = [(float(f), h) for h in PROBE_ALTITUDES_KM for f in freqs]
    dists = _map(_crossover_row, cells, jobs)
    rows = [(f, h, d, any(lo <= f <= hi for lo, hi in bands)) for (f, h), d in zip(cells, dists)]
    out.tables["fig2"] = Table(("frequency_GHz", "altitude_km", "crossover_km", "rr5340"), rows)
    for h in PROBE_ALTITUDES_KM:
        sub = [(d, f) for (f, hh), d in zip(cells, dists) if hh == h and d is not None]
        if sub:
            d, f = min(sub)
            out.headlines.append(f"h={h:g} km: shortest crossover {d:.3f} km at {f:g} GHz")
        else:
            out.headlines.append(f"h={h:g} km: no crossover below the search cap")
    return out


def fig3(**_):
    out = FigureData("fig3")
    orders = (4, 16, 64, 256, 1024)
    streams = {"a": (16, 32, 64, 128), "b": (1, 2, 4, 8)}
    for p, ks in streams.items():
        rows = [(m, qam(m).bits_per_symbol, k, 1, required_bandwidth(1e12, qam(m), k, 1) / 1e9)
                for k in ks for m in orders]
        out.tables[f"fig3_{p}"] = Table(("modulation_order", "bits_per_symbol", "mimo_streams",
                                         "sideband_factor", "bandwidth_GHz"), rows)
    out.headlines.append(f"16-QAM, 8 streams: {required_bandwidth(1e12, qam(16), 8) / 1e9:g} GHz")
    out.headlines.append(f"1024-QAM, 8 streams: {required_bandwidth(1e12, qam(1024), 8) / 1e9:g} GHz")
    return out


FIG4_ALTITUDES_KM = (1, 2, 5, 10, 20, 30, 50, 75, 100, 150, 200, 300, 400, 407, 500, 600, 700, 800)
FIG4_ELEVATIONS_DEG = (0.0, 9.0, 30.0, 60.0, 90.0)
BEAM_STEER = (0.0, -30.0)
BEAM_NULLS = ((0.0, 10.0), (0.0, 30.0), (0.0, 60.0))


def _beam_table(beam):
    rows = [(float(az), float(el), float(beam.magnitude_dB[i, j]))
            for i, el in enumerate(beam.elevation_deg) for j, az in enumerate(beam.azimuth_deg)]
    return Table(("azimuth_deg", "elevation_deg", "pattern_dB"), rows)


def fig4(panel=None, **_):
    out = FigureData("fig4")
    chosen = _panels(panel, ("a", "b", "c", "d", "e"))
    for p in chosen:
        if p in PATH_FREQUENCIES:
            f = PATH_FREQUENCIES[p]
            rows = []
            for el in FIG4_ELEVATIONS_DEG:
                for r in FIG4_ALTITUDES_KM:
                    loss = total_slant_loss(f, SlantGeometry(float(r), el))
                    rows.append((f, el, float(r), loss.spreading_dB, loss.absorption_dB, loss.total_dB))
            out.tables[f"fig4_{p}"] = Table(("frequency_GHz", "elevation_deg", "altitude_km", "spreading_dB",
                                             "absorption_dB", "total_dB"), rows)
    if {"d", "e"} & set(chosen):
        arr = PlanarArray(8, 8)
        conventional = steer_weights(arr, BEAM_STEER)
        nulled = null_steering_weights(arr, BEAM_STEER, BEAM_NULLS)
        if "d" in chosen:
            out.tables["fig4_d"] = _beam_table(pattern(arr, 1.0, conventional))
            sll = measure_sll(pattern(arr, 0.1), 10.0)
            out.headlines.append(f"8x8 uniform broadside sidelobe level {sll:.2f} dB")
        if "e" in chosen:
            out.tables["fig4_e"] = _beam_table(pattern(arr, 1.0, nulled))
            peak = abs(array_factor(arr, *BEAM_STEER, weights=nulled))
            depths = [20 * np.log10(abs(array_factor(arr, *d, weights=nulled)) / peak + 1e-300) for d in BEAM_NULLS]
            ref = abs(array_factor(arr, *BEAM_STEER, weights=conventional)) / np.linalg.norm(conventional)
            loss = 20 * np.log10(ref / (peak / np.linalg.norm(nulled)))
            out.headlines.append("null depths " + ", ".join(f"{x:.1f}" for x in depths)
                                 + f" dB; mainlobe loss {loss:.3f} dB")
    return out


def _fig5_cell(args):
    f, m, d = args
    try:
        return required_tx_power(f, d, qam(m))
    except SaturationError:
        return None


def fig5(panel=None, fc=None, jobs=1, **_):
    out = FigureData("fig5")
    if fc is not None:
        panels = {"fc": float(fc)}
    else:
        panels = {p: FIG5_FREQUENCIES[p] for p in _panels(panel, FIG5_FREQUENCIES)}
    orders = tuple(datasets.defaults()["modulation_orders"])
    for p, f in panels.items():
        cells = [(f, m, float(d)) for m in orders for d in FIG5_DISTANCES_KM]
        powers = _map(_fig5_cell, cells, jobs)
        table = {(m, d): pw for (_, m, d), pw in zip(cells, powers)}
        rows = [(f, float(d)) + tuple(table[(m, float(d))] for m in orders) for d in FIG5_DISTANCES_KM]
        stem = f"fig5_{p}" if p != "fc" else f"fig5_{f:g}GHz"
        out.tables[stem] = Table(("frequency_GHz", "distance_km") + tuple(f"qam{m}_tx_dBW" for m in orders), rows)
        for d in (0.1, 0.5):
            out.headlines.append(f"{f:g} GHz, 64-QAM, {d * 1000:g} m: {table[(64, d)]:.2f} dBW")
        gaps = [table[(1024, float(d))] - table[(16, float(d))] for d in FIG5_DISTANCES_KM
                if table[(1024, float(d))] is not None and table[(16, float(d))] is not None]
        out.headlines.append(f"{f:g} GHz: mean 16-QAM to 1024-QAM gap {np.mean(gaps):.2f} dB")
    return out


CONTOUR_ALTITUDES = np.arange(400.0, 720.0001, 1.0)
CONTOUR_ELEVATIONS = np.arange(0.0, 90.0001, 0.25)


def _contour_chunk(args):
    p_tx, g_sat, lo, hi = args
    s = LinkScenario(frequency_GHz=230.0, tx_power_dBW=p_tx, satellite_gain_dBi=g_sat)
    return rfi_threshold_contour(s, -160.0, (lo, hi))


def fig6(panel=None, jobs=1, **_):
    out = FigureData("fig6")
    for p in _panels(panel, CONTOUR_PANELS):
        p_tx, g_sat = CONTOUR_PANELS[p]
        s = LinkScenario(frequency_GHz=230.0, tx_power_dBW=p_tx, satellite_gain_dBi=g_sat)
        grid = rfi_grid(s, CONTOUR_ALTITUDES[:, None], CONTOUR_ELEVATIONS[None, :])
        rows = [(float(r), float(el), float(grid[i, j]))
                for i, r in enumerate(CONTOUR_ALTITUDES) for j, el in enumerate(CONTOUR_ELEVATIONS)]
        out.tables[f"fig6_{p}_grid"] = Table(("altitude_km", "elevation_deg", "rfi_dBW"), rows)
        chunks = [(p_tx, g_sat, float(a), float(a)) for a in CONTOUR_ALTITUDES]
        contour = [row for part in _map(_contour_chunk, chunks, jobs) for row in part]
        crow = [(c.altitude_km, k, lo, hi) for c in contour for k, (lo, hi) in enumerate(c.intervals)]
        out.tables[f"fig6_{p}_contour"] = Table(("altitude_km", "interval", "theta_low_deg", "theta_high_deg"), crow)
        ends = {c.altitude_km: c.intervals for c in contour if c.altitude_km in (400.0, 720.0)}
        desc = "; ".join(f"{r:g} km: " + (", ".join(f"[{a:.2f}, {b:.2f}]" for a, b in iv) or "none")
                         for r, iv in sorted(ends.items()))
        out.headlines.append(f"panel {p} (P_tx={p_tx} dBW, G_sat={g_sat} dBi) max {grid.max():.2f} dBW; {desc}")
    return out


def fig8(**_):
    out = FigureData("fig8")
    base = LinkScenario(frequency_GHz=230.0, tx_power_dBW=18.6, satellite_gain_dBi=20.0)
    rows = []
    for tilt in np.arange(0.0, 90.0001, 1.0):
        s = replace(base, tx_tilt_deg=float(tilt))
        grid = rfi_grid(s, CONTOUR_ALTITUDES[:, None], CONTOUR_ELEVATIONS[None, :])
        i, j = np.unravel_index(np.argmax(grid), grid.shape)
        rows.append((float(tilt), float(grid[i, j]), float(CONTOUR_ALTITUDES[i]), float(CONTOUR_ELEVATIONS[j])))
    out.tables["fig8"] = Table(("tilt_deg", "max_rfi_dBW", "altitude_km", "elevation_deg"), rows)
    for tilt in (30.0, 60.0):
        s = replace(base, tx_tilt_deg=tilt)
        out.headlines.append(f"tilt {tilt:g} deg: max RFI {max_rfi_over_grid(s, CONTOUR_ALTITUDES, CONTOUR_ELEVATIONS):.2f} dBW")
    th = tilt_threshold(base, -160.0, CONTOUR_ALTITUDES, CONTOUR_ELEVATIONS)
    out.headlines.append("smallest violating tilt " + ("none" if th is None else f"{th:.2f} deg"))
    return out


def first_crossing(rows, threshold_dBW=-160.0):
    """Lowest tabulated elevation with received power above the threshold."""
    for row in rows:
        if row.received_dBW > threshold_dBW:
            return row.elevation_deg
    return None


def fig9(**_):
    out = FigureData("fig9")
    s = LinkScenario(frequency_GHz=230.0, tx_power_dBW=33.4, satellite_gain_dBi=20.0, satellite_altitude_km=700.0)
    table = gain_loss_decomposition(s, np.arange(0.0, 90.0001, 0.25))
    out.tables["fig9"] = Table(("elevation_deg", "ground_gain_dBi", "path_gain_dB", "received_dBW"),
                               [(r.elevation_deg, r.ground_gain_dBi, r.path_gain_dB, r.received_dBW) for r in table])
    cross = first_crossing(table)
    out.headlines.append("RFI exceeds -160 dBW from " + ("never" if cross is None else f"{cross:.2f} deg"))
    return out


def build(name, panel=None, fc=None, jobs=1):
    if name not in FIGURES:
        raise KeyError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    return globals()[name](panel=panel, fc=fc, jobs=jobs)
