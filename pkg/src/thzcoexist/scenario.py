"""JSON scenario loading and schema validation."""

import json
from dataclasses import dataclass, fields
from functools import lru_cache
from pathlib import Path

import jsonschema

from .linkbudget import LinkScenario
from .sharing import CircularOrbit, GroundStation, SwitchPolicy

_DATA = Path(__file__).parent / "data"
PRESETS = ("nrc",)
LATENCY_PRESETS = {"centralized": 0.005, "distributed": 0.100}


class ScenarioError(ValueError):
    """Raised for unreadable or schema-invalid scenario documents."""


@lru_cache(maxsize=None)
def schema():
    with open(_DATA / "scenario.schema.json") as fh:
        return json.load(fh)


def _path(error):
    out = "$"
    for part in error.absolute_path:
        out += f"[{part}]" if isinstance(part, int) else f".{part}"
    return out


def validate(doc):
    validator = jsonschema.Draft202012Validator(schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: (_path(e), e.message))
    if errors:
        raise ScenarioError("\n".join(f"{_path(e)}: {e.message}" for e in errors))
    return doc


def load(path_or_preset):
    """Read and validate a scenario file, or a named preset such as ``nrc``."""
    if path_or_preset in PRESETS:
        path = _DATA / "presets" / f"{path_or_preset}.json"
    else:
        path = Path(path_or_preset)
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"$: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return Scenario.from_dict(validate(doc))


@dataclass
class Scenario:
    doc: dict

    @classmethod
    def from_dict(cls, doc):
        return cls(doc)

    @property
    def seed(self):
        return self.doc.get("seed", 0)

    def link(self):
        return LinkScenario(**self.doc.get("link", {}))

    def station(self):
        st = self.doc.get("station")
        if st is None:
            raise ScenarioError("$.station: required for pass and coexistence commands")
        return GroundStation(st["latitude_deg"], st["longitude_deg"], st.get("name", "station"))

    def orbits(self):
        allowed = {f.name for f in fields(CircularOrbit)}
        out = []
        for i, o in enumerate(self.doc.get("orbits", [])):
            params = {k: v for k, v in o.items() if k in allowed}
            out.append((o.get("id", f"sat-{i}"), CircularOrbit(**params)))
        return out

    def pass_window(self):
        p = self.doc.get("passes", {})
        return p.get("start_s", 0.0), p.get("window_s", 86400.0), p.get("min_elevation_deg", 0.0)

    def policy(self):
        p = dict(self.doc.get("policy", {}))
        if not p:
            return None
        preset = p.pop("preset", None)
        if preset and "switch_latency_s" not in p:
            p["switch_latency_s"] = LATENCY_PRESETS[preset]
        return SwitchPolicy(**p)

    def blanking(self):
        return self.doc.get("blanking")
