import json
import subprocess
import sys
from pathlib import Path

import pytest

from thzcoexist import cli, scenario
from thzcoexist.tables import read_csv

ROOT = Path(__file__).resolve().parents[1]


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_atten_row_count_and_water_peak(tmp_path, capsys):
    out = tmp_path / "a.csv"
    code, _, _ = run(["atten", "--from", "100", "--to", "275", "--step", "0.1", "--height", "0", "-o", str(out)], capsys)
    assert code == 0
    rows = read_csv(str(out))
    assert len(rows) == 1751
    window = [r for r in rows if 180 <= float(r["frequency_GHz"]) <= 187]
    best = max(window, key=lambda r: float(r["gamma_water_dB_km"]))
    assert abs(float(best["frequency_GHz"]) - 183.3) <= 0.1


def test_atten_deterministic_and_metadata(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        run(["atten", "--from", "150", "--to", "160", "--step", "0.5", "-o", str(p)], capsys)
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.splitlines()[0] == "frequency_GHz,gamma_oxygen_dB_km,gamma_water_dB_km,gamma_total_dB_km"
    tail = [ln for ln in text.splitlines() if ln.startswith("#")]
    assert any(ln.startswith("# tool_version=") for ln in tail)
    assert any(ln.startswith("# dataset.p676=") for ln in tail)
    assert any(ln.startswith("# seed=") for ln in tail)


def test_atten_usage_errors(capsys):
    assert run(["atten", "--from", "200", "--to", "100"], capsys)[0] == 2
    assert run(["atten", "--from", "100", "--to", "200", "--step", "0"], capsys)[0] == 2


def test_atten_domain_error_exit_3(capsys):
    code, _, err = run(["atten", "--from", "300", "--to", "400", "--step", "10"], capsys)
    assert code == 3 and "frequency" in err


def test_unknown_figure_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["figure", "fig7"])
    assert exc.value.code == 2


def test_bad_panel_is_usage_error(tmp_path, capsys):
    assert run(["figure", "fig6", "--panel", "z", "--outdir", str(tmp_path)], capsys)[0] == 2


def test_figure_fig3(tmp_path, capsys):
    code, out, _ = run(["figure", "fig3", "--outdir", str(tmp_path)], capsys)
    assert code == 0
    rows = read_csv(str(tmp_path / "fig3_b.csv"))
    cell = [r for r in rows if r["modulation_order"] == "16" and r["mimo_streams"] == "8"]
    assert float(cell[0]["bandwidth_GHz"]) == 31.25
    assert "31.25 GHz" in out


def test_figure_fig5_monotone(tmp_path, capsys):
    code, _, _ = run(["figure", "fig5", "--fc", "230", "--outdir", str(tmp_path)], capsys)
    assert code == 0
    rows = read_csv(str(tmp_path / "fig5_230GHz.csv"))
    cols = [c for c in rows[0] if c.endswith("_tx_dBW")]
    for c in cols:
        vals = [float(r[c]) for r in rows]
        assert all(a <= b for a, b in zip(vals, vals[1:]))
    for r in rows:
        vals = [float(r[c]) for c in cols]
        assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_figure_fig6_panel_b(tmp_path, capsys):
    code, out, _ = run(["figure", "fig6", "--panel", "b", "--outdir", str(tmp_path)], capsys)
    assert code == 0
    rows = read_csv(str(tmp_path / "fig6_b_contour.csv"))
    first = {float(r["altitude_km"]): float(r["theta_low_deg"]) for r in rows if r["interval"] == "0"}
    assert abs(first[400.0] - 9.73) <= 1.5
    assert abs(first[720.0] - 12.26) <= 1.5


def test_figure_jobs_do_not_change_output(tmp_path, capsys):
    one, two = tmp_path / "one", tmp_path / "two"
    run(["figure", "fig2", "--outdir", str(one)], capsys)
    run(["figure", "fig2", "--jobs", "2", "--outdir", str(two)], capsys)
    assert (one / "fig2.csv").read_bytes() == (two / "fig2.csv").read_bytes()


def test_coexist_nrc_preset(tmp_path, capsys):
    code, out, _ = run(["coexist", "nrc", "--outdir", str(tmp_path)], capsys)
    assert code == 0
    avail = float(next(ln for ln in out.splitlines() if ln.startswith("availability")).split(":")[1])
    assert avail >= 0.99
    first = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    run(["coexist", "nrc", "--outdir", str(tmp_path)], capsys)
    assert first == {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    switching = read_csv(str(tmp_path / "switching.csv"))
    assert set(switching[0]) == {"t_start", "t_end", "band", "state"}


def test_zero_latency_scenario(tmp_path, capsys):
    doc = json.loads((ROOT / "docs" / "presets" / "nrc.json").read_text())
    doc["policy"] = {"primary_band_GHz": 230.0, "fallback_band_GHz": 140.0, "switch_latency_s": 0.0}
    del doc["blanking"]
    path = tmp_path / "s.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(["coexist", str(path), "--outdir", str(tmp_path)], capsys)
    assert code == 0
    assert "downtime_s: 0.000000" in out and "violation_s: 0.000000" in out


def test_passes_command(tmp_path, capsys):
    out = tmp_path / "p.csv"
    assert run(["passes", "nrc", "-o", str(out)], capsys)[0] == 0
    rows = read_csv(str(out))
    assert rows and all(float(r["t_end"]) > float(r["t_start"]) for r in rows)


def test_schema_errors_are_path_qualified(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"unknown": 1, "orbits": [{"altitude_km": -5, "inclination_deg": 98}]}))
    code, _, err = run(["coexist", str(path)], capsys)
    assert code == 2
    assert "$.orbits[0].altitude_km" in err
    assert "'unknown' was unexpected" in err


def test_invalid_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run(["passes", str(path)], capsys)[0] == 2


def test_missing_scenario_file(capsys):
    assert run(["passes", "/nonexistent/scenario.json"], capsys)[0] == 2


def test_published_schema_matches_packaged():
    shipped = json.loads((ROOT / "src" / "thzcoexist" / "data" / "scenario.schema.json").read_text())
    published = json.loads((ROOT / "docs" / "scenario.schema.json").read_text())
    assert shipped == published == scenario.schema()


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "thzcoexist.cli", "figure", "fig9", "--outdir", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "RFI exceeds -160 dBW from" in proc.stdout
