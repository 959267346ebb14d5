"""Deterministic CSV output with a trailing metadata comment block."""

import csv
import io
import math

from . import __version__, datasets


def format_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float) or hasattr(v, "dtype"):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(round(v, 9) + 0.0)
    if v is None:
        return ""
    return str(v)


def render_csv(columns, rows, seed=None, extra=None):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    buf.write(f"# tool_version={__version__}\n")
    for name, tag in sorted(datasets.versions().items()):
        buf.write(f"# dataset.{name}={tag}\n")
    buf.write(f"# seed={'none' if seed is None else seed}\n")
    for key, value in sorted((extra or {}).items()):
        buf.write(f"# {key}={value}\n")
    return buf.getvalue()


def write_csv(path, columns, rows, seed=None, extra=None):
    text = render_csv(columns, rows, seed, extra)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return text


def read_csv(path_or_text):
    """Parse a CSV written by :func:`render_csv`, skipping the metadata block."""
    text = path_or_text
    if "\n" not in text:
        with open(text) as fh:
            text = fh.read()
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))
