"""Command-line entry point: ``thzcoexist {atten,figure,passes,coexist}``."""

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import figures, scenario as scenario_mod
from .atmosphere import attenuation_profile, specific_attenuation, standard_profile
from .errors import DegenerateInputError, DomainError, InfeasibleError, SaturationError
from .sharing import blanking_availability, predict_passes, simulate_switching, stitch_passes
from .tables import render_csv, write_csv

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 2, 3
MODEL_ERRORS = (DomainError, SaturationError, InfeasibleError, DegenerateInputError)


class UsageError(Exception):
    pass


def _emit(text, output):
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def cmd_atten(args):
    if not args.step > 0:
        raise UsageError("--step must be positive")
    if args.to < args.start:
        raise UsageError("--to must not be below --from")
    n = int(math.floor((args.to - args.start) / args.step + 1e-9)) + 1
    freqs = args.start + args.step * np.arange(n)
    sample = standard_profile(args.height, args.rho0)
    rows = []
    for f in freqs:
        g = specific_attenuation(round(float(f), 9), sample)
        rows.append((round(float(f), 9), g.gamma_oxygen_dB_km, g.gamma_water_dB_km, g.total_dB_km))
    text = render_csv(("frequency_GHz", "gamma_oxygen_dB_km", "gamma_water_dB_km", "gamma_total_dB_km"),
                      rows, extra={"height_km": args.height, "rho0_g_m3": args.rho0})
    _emit(text, args.output)
    return EXIT_OK


def cmd_figure(args):
    try:
        data = figures.build(args.name, panel=args.panel, fc=args.fc, jobs=args.jobs)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from exc
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for stem, table in data.tables.items():
        write_csv(outdir / f"{stem}.csv", table.columns, table.rows)
        print(f"wrote {outdir / (stem + '.csv')} ({len(table.rows)} rows)")
    for line in data.headlines:
        print(line)
    return EXIT_OK


def _load(args):
    try:
        return scenario_mod.load(args.scenario)
    except scenario_mod.ScenarioError as exc:
        raise UsageError(str(exc)) from exc


def _all_passes(sc):
    station = sc.station()
    start, window, min_el = sc.pass_window()
    passes = []
    for sat_id, orbit in sc.orbits():
        passes.extend(predict_passes(station, orbit, window, min_el, start_s=max(start, orbit.epoch_s),
                                     satellite_id=sat_id))
    return sorted(passes, key=lambda p: (p.start_s, p.satellite_id))


PASS_COLUMNS = ("satellite_id", "t_start", "t_end", "duration_s", "max_elevation_deg")


def _pass_rows(passes):
    return [(p.satellite_id, p.start_s, p.end_s, p.duration_s, p.max_elevation_deg) for p in passes]


def cmd_passes(args):
    sc = _load(args)
    passes = _all_passes(sc)
    _emit(render_csv(PASS_COLUMNS, _pass_rows(passes), seed=sc.seed), args.output)
    return EXIT_OK


def cmd_coexist(args):
    sc = _load(args)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    start, window, _ = sc.pass_window()
    passes = _all_passes(sc) if sc.doc.get("orbits") else []
    write_csv(outdir / "passes.csv", PASS_COLUMNS, _pass_rows(passes), seed=sc.seed)
    summary = [("window_s", window), ("passes", len(passes))]
    policy = sc.policy()
    if policy is not None:
        report = simulate_switching(passes, policy, window, start_s=start)
        write_csv(outdir / "switching.csv", ("t_start", "t_end", "band", "state"),
                  [(e.t_start, e.t_end, e.band_GHz, e.state) for e in report.events], seed=sc.seed)
        summary += [("time_in_primary_s", report.time_in_primary_s),
                    ("time_in_fallback_s", report.time_in_fallback_s),
                    ("downtime_s", report.downtime_s), ("violation_s", report.violation_s)]
    blank = sc.blanking()
    if blank is not None:
        avail = blanking_availability(
            blank["num_satellites"], blank["footprint_diameter_km"], blank.get("orbit_altitude_km", 705.0),
            blank.get("window_s", 86400.0), sc.station(), inclination_deg=blank.get("inclination_deg", 98.0),
            trials=blank.get("trials", 8), step_s=blank.get("step_s", 1.0), seed=sc.seed)
        summary.append(("availability", avail))
    write_csv(outdir / "report.csv", ("metric", "value"), summary, seed=sc.seed)
    for key, value in summary:
        print(f"{key}: {value:.6f}" if isinstance(value, float) else f"{key}: {value}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser():
    parser = _Parser(prog="thzcoexist", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("atten", help="specific attenuation sweep at one height")
    p.add_argument("--from", dest="start", type=float, required=True, help="first frequency (GHz)")
    p.add_argument("--to", type=float, required=True, help="last frequency (GHz)")
    p.add_argument("--step", type=float, default=0.1, help="frequency step (GHz)")
    p.add_argument("--height", type=float, default=0.0, help="height above sea level (km)")
    p.add_argument("--rho0", type=float, default=7.5, help="surface water vapour density (g/m^3)")
    p.add_argument("-o", "--output", help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_atten)

    p = sub.add_parser("figure", help="write the data behind one figure")
    p.add_argument("name", choices=figures.FIGURES)
    p.add_argument("--panel", help="restrict to one panel letter")
    p.add_argument("--fc", type=float, help="carrier frequency for fig5 (GHz)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--outdir", default=".", help="directory for the CSV files")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("passes", help="predict satellite passes for a scenario")
    p.add_argument("scenario", help="scenario JSON file or preset name (nrc)")
    p.add_argument("-o", "--output", help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_passes)

    p = sub.add_parser("coexist", help="passes, band-switching replay and blanking availability")
    p.add_argument("scenario", help="scenario JSON file or preset name (nrc)")
    p.add_argument("--outdir", default=".", help="directory for the CSV files")
    p.set_defaults(func=cmd_coexist)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("thzcoexist: error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"thzcoexist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MODEL_ERRORS as exc:
        print(f"thzcoexist: model error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
