"""Loading of the static datasets shipped in ``thzcoexist/data``.

Set ``THZCOEXIST_DATA_DIR`` to point at an alternative directory holding files
with the same names and columns (see ``docs/datasets.md``).
"""

import csv
import json
import os
from functools import lru_cache
from pathlib import Path

import numpy as np

DATA_ENV_VAR = "THZCOEXIST_DATA_DIR"
_PACKAGE_DATA = Path(__file__).parent / "data"


def data_dir():
    override = os.environ.get(DATA_ENV_VAR)
    return Path(override) if override else _PACKAGE_DATA


def _read_rows(name):
    path = data_dir() / name
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def _version_of(name):
    with open(data_dir() / name) as fh:
        for ln in fh:
            if not ln.startswith("#"):
                break
            if "dataset version" in ln:
                return ln.rsplit("dataset version", 1)[1].strip()
    return "unknown"


def _float_or_none(text):
    text = text.strip()
    return float(text) if text else None


@lru_cache(maxsize=None)
def line_table(species):
    """Spectroscopic line table as a float array, one row per line.

    ``species`` is ``"oxygen"`` (columns f0, a1..a6) or ``"water"``
    (columns f0, b1..b6).
    """
    if species not in ("oxygen", "water"):
        raise KeyError(species)
    rows = _read_rows(f"p676_{species}.csv")
    table = np.array([[float(v) for v in row.values()] for row in rows])
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def reference_layers():
    rows = _read_rows("p835_reference.csv")
    return tuple(
        (float(r["h_base_km"]), float(r["h_top_km"]), float(r["T_base_K"]),
         float(r["lapse_K_per_km"]), float(r["P_base_hPa"]))
        for r in rows
    )


@lru_cache(maxsize=None)
def upper_atmosphere():
    return {r["name"]: float(r["value"]) for r in _read_rows("p835_upper.csv")}


@lru_cache(maxsize=None)
def protected_band_rows():
    out = []
    for r in _read_rows("protected_bands.csv"):
        out.append(dict(
            band_low_GHz=float(r["band_low_GHz"]),
            band_high_GHz=float(r["band_high_GHz"]),
            threshold_nadir_dBW=_float_or_none(r["threshold_nadir_dBW"]),
            threshold_limb_dBW=_float_or_none(r["threshold_limb_dBW"]),
            lowest_satellite_altitude_km=float(r["lowest_altitude_km"]),
            satellite_name=r["satellite"],
        ))
    return tuple(out)


@lru_cache(maxsize=None)
def rr5340_bands():
    return tuple((float(r["band_low_GHz"]), float(r["band_high_GHz"]))
                 for r in _read_rows("rr5340_bands.csv"))


@lru_cache(maxsize=None)
def defaults():
    with open(data_dir() / "defaults.json") as fh:
        return json.load(fh)


def versions():
    """Dataset version tags, recorded in every CSV the CLI writes."""
    return {
        "p676": _version_of("p676_oxygen.csv"),
        "p835": _version_of("p835_reference.csv"),
        "table_v": _version_of("protected_bands.csv"),
        "rr5340": _version_of("rr5340_bands.csv"),
        "defaults": defaults().get("version", "unknown"),
    }
