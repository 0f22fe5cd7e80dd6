"""CLI surface: argument plumbing, exit codes, subcommand outputs."""

import json

import numpy as np
import pytest

from khosim.cli import main


def test_dn_run_exits_zero(tmp_path, capsys):
    rc = main(
        [
            "dn",
            "--K", "0.5",
            "--eta", "0.25",
            "--center", "0,1.1",
            "--kicks", "2",
            "--grid-cells", "128",
            "--out", str(tmp_path / "out"),
        ]
    )
    assert rc == 0
    assert (tmp_path / "out" / "series.csv").exists()
    assert "dn_series: done" in capsys.readouterr().out


def test_config_error_exits_two(tmp_path, capsys):
    rc = main(["dn", "--kicks", "0", "--out", str(tmp_path / "out")])
    assert rc == 2
    assert "config error" in capsys.readouterr().err


def test_missing_config_file_exits_three(tmp_path, capsys):
    rc = main(["dn", "--config", str(tmp_path / "nope.json")])
    assert rc == 3
    assert "I/O error" in capsys.readouterr().err


def test_bad_center_exits_two(tmp_path):
    assert main(["dn", "--center", "1,2,3", "--out", str(tmp_path / "o")]) == 2


def test_bad_grid_cells_exits_two(tmp_path):
    assert main(["dn", "--grid-cells", "12ab", "--out", str(tmp_path / "o")]) == 2


def test_rectangular_grid_cells(tmp_path):
    rc = main(
        [
            "dn",
            "--eta", "0.25",
            "--center", "0,0.3",
            "--kicks", "1",
            "--grid-cells", "128x64",
            "--out", str(tmp_path / "out"),
        ]
    )
    assert rc == 0
    doc = json.loads((tmp_path / "out" / "record.json").read_text())
    assert doc["config"]["grid_cells"] == 128
    assert doc["config"]["grid_p_extent"] == pytest.approx(64 * 0.0625 / 2)


def test_config_file_with_override(tmp_path):
    cfg = dict(kind="dn_series", K=0.7, eta=0.25, n_kicks=1, x0=[0.0, 0.5],
               grid_cells=128, out_dir=str(tmp_path / "a"))
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    rc = main(["dn", "--config", str(path), "--K", "0.9", "--out", str(tmp_path / "b")])
    assert rc == 0
    doc = json.loads((tmp_path / "b" / "record.json").read_text())
    assert doc["config"]["K"] == 0.9
    assert doc["config"]["eta"] == 0.25


def test_perturb_without_reservoir_exits_two(tmp_path):
    assert main(["perturb", "--D", "0", "--out", str(tmp_path / "o")]) == 2


def test_evolve_snapshot_flag(tmp_path):
    rc = main(
        [
            "evolve",
            "--center", "0,1.1",
            "--kicks", "2",
            "--grid-cells", "128",
            "--snapshot-every", "1",
            "--out", str(tmp_path / "out"),
        ]
    )
    assert rc == 0
    doc = json.loads((tmp_path / "out" / "record.json").read_text())
    assert len(doc["snapshots"]) == 4


def test_sweep_reports_workers_from_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("KHO_WORKERS", "2")
    rc = main(
        [
            "sweep",
            "--center", "0,0.3",
            "--kicks", "1",
            "--grid-cells", "128",
            "--K-list", "0.5",
            "--eta-list", "0.25",
            "--D-list", "0.01,0.05",
            "--workers", "1",
            "--out", str(tmp_path / "out"),
        ]
    )
    assert rc == 0
    assert "workers=2" in capsys.readouterr().out


def test_collapse_subcommand(tmp_path, capsys):
    rc = main(
        [
            "collapse",
            "--center", "0,0.3",
            "--kicks", "12",
            "--grid-cells", "128",
            "--K-list", "0.5",
            "--eta-list", "0.25,0.125",
            "--D-list", "0.01",
            "--workers", "1",
            "--out", str(tmp_path / "out"),
        ]
    )
    assert rc == 0
    doc = json.loads((tmp_path / "out" / "collapse.json").read_text())
    entry = doc["K=0.5"]
    assert set(entry) >= {"alpha", "objective", "objective_at_zero", "improvement"}
    assert entry["objective"] > 0


def test_peaks_subcommand_too_few_points(tmp_path):
    rc = main(
        [
            "peaks",
            "--center", "0,0.3",
            "--kicks", "6",
            "--grid-cells", "128",
            "--K-list", "0.5",
            "--eta-list", "0.25",
            "--D-list", "0.05,0.1",
            "--workers", "1",
            "--out", str(tmp_path / "out"),
        ]
    )
    assert rc == 0
    doc = json.loads((tmp_path / "out" / "slope.json").read_text())
    assert "slope_error" in doc or "slope" in doc
