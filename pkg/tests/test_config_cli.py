import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from jclab.cli import main
from jclab.config import Axis, config_from_dict, load_config
from jclab.errors import ConfigError
from jclab.scenarios import FIGURES, format_csv, run_scenario, summarize, sweep


def read_rows(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[float(v) for v in r] for r in rows[1:]]


def write_config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


@pytest.mark.parametrize("scenario", sorted(FIGURES))
def test_figure_scenarios_are_deterministic_and_finite(tmp_path, scenario, capsys):
    out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([scenario, "--out", str(out_a)]) == 0
    assert main([scenario, "--out", str(out_b), "--threads", "2"]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    assert b"\r" not in out_a.read_bytes()
    header, rows = read_rows(out_a)
    assert header[0] == "kt"
    assert all(math.isfinite(v) for r in rows for v in r)
    assert "rows:" in capsys.readouterr().out


def test_fig2_row_and_bell_death(tmp_path, capsys):
    out = tmp_path / "fig2.csv"
    assert main(["fig2", "--out", str(out)]) == 0
    header, rows = read_rows(out)
    row = next(r for r in rows if r[0] == 1.0)
    assert row[header.index("concurrence")] == pytest.approx(0.60474687635763, abs=1e-12)
    assert row[header.index("bell_max")] == pytest.approx(2.239499217396096, abs=1e-12)
    assert row[header.index("classical_bound")] == 2.0
    assert "bell_death_kt: 2.302777304" in capsys.readouterr().out


def test_fig3_field_entropy_asymptote(tmp_path):
    cfg = write_config(tmp_path, {"grid": [{"variable": "kt", "values": [40.0]}]})
    out = tmp_path / "fig3.csv"
    assert main(["fig3", "--config", cfg, "--out", str(out)]) == 0
    header, rows = read_rows(out)
    assert rows[0][header.index("linear_entropy_field")] == pytest.approx(0.5 * (1 - math.exp(-4)), abs=1e-6)


def test_json_output(tmp_path):
    out = tmp_path / "fig4.json"
    assert main(["fig4", "--out", str(out), "--format", "json"]) == 0
    doc = json.loads(out.read_text())
    assert doc["columns"][0] == "kt" and len(doc["rows"]) == 301
    assert doc["grid"][0] == {"variable": "kt", "min": 0.0, "max": 6.0, "points": 301}


def test_sweep_bell_death_over_ratios():
    cfg = config_from_dict({"grid": [{"variable": "g_over_k", "values": [0.5, 1.0, 2.0]}],
                            "metric": "bell_death_kt"}, "sweep")
    ds = sweep(cfg)
    kts = ds.column("bell_death_kt")
    assert len(kts) == 3
    np.testing.assert_allclose(kts, 2.302777304, atol=1e-9)


def test_sweep_concurrence_rises_then_falls():
    cfg = config_from_dict({"grid": [{"variable": "kt", "min": 0.0, "max": 30.0, "points": 301}],
                            "metrics": ["concurrence"]}, "sweep")
    c = sweep(cfg).column("concurrence")
    peak = int(np.argmax(c))
    assert 0 < peak < len(c) - 1
    assert np.all(np.diff(c[: peak + 1]) > 0) and np.all(np.diff(c[peak:]) <= 0)
    assert c[0] == 0.0 and c[-1] < 1e-12


def test_sweep_two_axes_and_input_axis():
    cfg = config_from_dict({"grid": [{"variable": "kt", "values": [1.0, 2.0]},
                                     {"variable": "vartheta", "values": [0.0, math.pi / 2]}],
                            "metrics": ["output_concurrence_p1", "fidelity_p1"]}, "sweep")
    ds = sweep(cfg)
    assert ds.columns == ("kt", "vartheta", "output_concurrence_p1", "fidelity_p1")
    assert len(ds.rows) == 4
    assert ds.rows[3][2] == pytest.approx(0.026115971597542, abs=1e-12)


@pytest.mark.parametrize("data, message", [
    ({"grid": [], "metric": "concurrence"}, "non-empty grid"),
    ({"grid": [{"variable": "kt", "min": 0, "max": 1, "points": 5}], "metric": "nope"}, "unknown metric"),
    ({"grid": [{"variable": "kt", "min": 1, "max": 0, "points": 5}], "metric": "x"}, "min < max"),
    ({"grid": [{"variable": "kt", "min": 0, "max": 1, "points": 1}], "metric": "x"}, "at least 2"),
    ({"grid": [{"variable": "omega", "min": 0, "max": 1, "points": 3}], "metric": "x"}, "unknown grid variable"),
    ({"grid": [{"variable": "g", "min": 0.5, "max": 1, "points": 3}], "metric": "x"}, "needs a time"),
    ({"grid": [{"variable": "g", "min": 0, "max": 1, "points": 3}], "metric": "x"}, "g must be positive"),
])
def test_sweep_errors(data, message):
    with pytest.raises(ConfigError, match=message):
        sweep(config_from_dict(data, "sweep"))


def test_config_errors(tmp_path, capsys):
    bad = write_config(tmp_path, {"paramz": {}})
    assert main(["fig2", "--config", bad]) == 2
    assert "unknown config keys" in capsys.readouterr().err
    assert main(["fig2", "--config", str(tmp_path / "missing.json")]) == 2
    (tmp_path / "broken.json").write_text("{")
    assert main(["fig2", "--config", str(tmp_path / "broken.json")]) == 2
    mismatch = write_config(tmp_path, {"scenario": "fig3"})
    assert main(["fig2", "--config", mismatch]) == 2
    with pytest.raises(ConfigError):
        config_from_dict({"params": {"g": -1}}, "fig2")
    with pytest.raises(ConfigError):
        config_from_dict({"grid": [{"variable": "kt", "values": [1.0]},
                                   {"variable": "t", "values": [1.0]}]}, "sweep")


def test_threads_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("JCLAB_THREADS", "2")
    assert main(["fig6", "--out", str(tmp_path / "f.csv")]) == 0
    monkeypatch.setenv("JCLAB_THREADS", "many")
    assert main(["fig6", "--out", str(tmp_path / "g.csv")]) == 2


def test_default_output_path(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["fig3"]) == 0
    assert (tmp_path / "fig3.csv").exists()
    cfg = write_config(tmp_path, {"output_path": "sub/out.json", "format": "json"})
    assert main(["fig3", "--config", cfg]) == 0
    assert (tmp_path / "sub" / "out.json").exists()


def test_validate_with_tiny_truncation(tmp_path, capsys):
    cfg = write_config(tmp_path, {"fock_dim": 2, "params": {"g": 1, "k": 1}})
    assert main(["validate", "--config", cfg, "--out", str(tmp_path / "report.csv")]) == 1
    out = capsys.readouterr().out
    assert "FAIL oracle_vs_closed_form" in out and "TruncationTooSmall" in out
    assert "g/k=" in out
    text = (tmp_path / "report.csv").read_text()
    assert text.startswith("check,max_dev,tol,passed\n")


@pytest.mark.slow
def test_validate_default_grid(tmp_path, capsys):
    assert main(["validate", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert "15/15 checks passed" in out


def test_summaries_mention_classical_interval():
    ds = run_scenario(config_from_dict({}, "fig4"))
    line = [s for s in summarize(ds) if "optimal_fidelity_p0 >" in s][0]
    assert "kt in [0.5, 4.54]" in line


def test_axis_helpers():
    ax = Axis("kt", 0.0, 1.0, 3)
    np.testing.assert_allclose(ax.grid(), [0.0, 0.5, 1.0])
    assert Axis("g", values=(1.0, 2.0)).to_dict() == {"variable": "g", "values": [1.0, 2.0]}
    with pytest.raises(ConfigError):
        Axis("g", values=())


def test_csv_cells_roundtrip():
    ds = run_scenario(config_from_dict({"grid": [{"variable": "kt", "values": [0.1, 1.0 / 3.0]}]}, "fig2"))
    text = format_csv(ds)
    second = text.splitlines()[2].split(",")
    assert float(second[0]) == 1.0 / 3.0


def test_module_entry_point(tmp_path):
    out = tmp_path / "fig6.csv"
    proc = subprocess.run([sys.executable, "-m", "jclab", "fig6", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists()


def test_load_config_defaults():
    cfg = load_config(None, "fig1")
    assert cfg.params.g == 1.0 and cfg.grid == ()
