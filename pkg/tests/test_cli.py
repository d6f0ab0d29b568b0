"""Tests for the `simulate` command"""

import argparse
import json

import pytest

from xcrelay.cli.main import main, parse_relayers, parse_seeds
from xcrelay.cli.presets import PRESETS, get_preset, scalability_variants
from xcrelay.metrics import config_key
from xcrelay.sim import RunTrace, validate_config

SMALL_CONFIG = """\
seed = 3
duration = 60.0

[workload]
pattern = "constant"
rate = 0.2
start = 1.0
stop = 30.0

[[agents]]
label = "C"
strategy = "coordinated"
count = 2
"""


def test_parse_seeds():
    """Test single seeds and inclusive ranges"""
    assert parse_seeds("5") == [5]
    assert parse_seeds("1..3") == [1, 2, 3]
    with pytest.raises(argparse.ArgumentTypeError):
        parse_seeds("3..1")


def test_parse_relayers():
    """Test relayer count lists"""
    assert parse_relayers("1,2,4") == [1, 2, 4]
    with pytest.raises(argparse.ArgumentTypeError):
        parse_relayers("1,0")
    with pytest.raises(argparse.ArgumentTypeError):
        parse_relayers("a,b")


def test_presets_validate():
    """Test every preset expands to valid configs"""
    for name, preset in PRESETS.items():
        for label, overrides in preset.expand(seed=1):
            config = validate_config(overrides)
            assert config.seed == 1, (name, label)
    with pytest.raises(KeyError):
        get_preset("unknown")


def test_scalability_variants_share_config():
    """Test the coordinated series differs only in its roster"""
    runs = dict(get_preset("scalability").expand(seed=0, relayer_counts=[1, 2, 4]))
    assert sorted(runs) == sorted(scalability_variants([1, 2, 4]))
    keys = {
        config_key(validate_config(runs[f"coordinated-{n}"]).model_dump(mode="json"))
        for n in (1, 2, 4)
    }
    assert len(keys) == 1


def test_allocation_flag_respects_variants():
    """Test --allocation overrides presets but not variants that pick a mode"""
    runs = dict(get_preset("scenario1").expand(seed=0, allocation="approach1"))
    assert runs["scenario1"]["coordinator"]["allocation_mode"] == "approach1"
    runs = dict(get_preset("approach2-delay").expand(seed=0, allocation="open"))
    assert runs["approach2"]["coordinator"]["allocation_mode"] == "approach2"


def test_missing_config_exits_1(tmp_path, capsys):
    """Test a missing config file is a configuration error"""
    code = main(["--config", str(tmp_path / "missing.toml"), "--out", str(tmp_path), "--quiet"])
    assert code == 1
    assert "not found" in capsys.readouterr().err


def test_invalid_config_exits_1(tmp_path, capsys):
    """Test field diagnostics are printed for invalid configs"""
    path = tmp_path / "bad.toml"
    path.write_text('[[agents]]\nlabel = "X"\nstrategy = "nope"\n', encoding="utf-8")
    assert main(["--config", str(path), "--out", str(tmp_path), "--quiet"]) == 1
    assert "agents.0.strategy" in capsys.readouterr().err


def test_scenario1_writes_reports(tmp_path, capsys):
    """Test a checked scenario run writes JSON, CSV and the trace"""
    out = tmp_path / "results"
    code = main(["--scenario", "scenario1", "--seed", "7", "--out", str(out), "--check", "--trace"])
    assert code == 0

    document = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert document["scenario"] == "scenario1"
    assert document["passed"] is True
    assert document["runs"][0]["report"]["duplicate_reverts"] == 6

    rows = (out / "report.csv").read_text(encoding="utf-8").splitlines()
    assert rows[0].startswith("run,seed,relayer")
    assert len(rows) == 4

    trace = RunTrace.read(out / "trace.ndjson")
    assert trace.run.seed == 7
    assert "== scenario1 (seed 7) ==" in capsys.readouterr().out


def test_config_run_with_seed_range(tmp_path):
    """Test a seed range writes one directory per seed"""
    path = tmp_path / "small.toml"
    path.write_text(SMALL_CONFIG, encoding="utf-8")
    out = tmp_path / "out"

    code = main(["--config", str(path), "--seeds", "1..2", "--out", str(out), "--quiet"])
    assert code == 0
    for seed in (1, 2):
        document = json.loads((out / f"seed-{seed}" / "report.json").read_text(encoding="utf-8"))
        assert document["runs"][0]["label"] == "small"
        assert document["runs"][0]["report"]["seed"] == seed
        assert document["runs"][0]["report"]["requested"] == 6


def test_csv_only_format(tmp_path):
    """Test --format csv skips the JSON document"""
    path = tmp_path / "small.toml"
    path.write_text(SMALL_CONFIG, encoding="utf-8")
    out = tmp_path / "out"

    assert main(["--config", str(path), "--out", str(out), "--format", "csv", "--quiet"]) == 0
    assert (out / "report.csv").exists()
    assert not (out / "report.json").exists()


def test_multi_run_preset_writes_trace_per_run(tmp_path):
    """Test each run of a multi-run preset gets its own trace file"""
    out = tmp_path / "delay"
    code = main(["--scenario", "approach2-delay", "--out", str(out), "--trace", "--quiet"])
    assert code == 0

    assert not (out / "trace.ndjson").exists()
    for label in ("approach1", "approach2"):
        trace = RunTrace.read(out / f"trace-{label}.ndjson")
        assert trace.run.config["coordinator"]["allocation_mode"] == label
