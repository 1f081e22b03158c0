"""CLI subcommands, output shapes, and exit codes."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from evoexpr.cli import main

TINY_CONFIG = """
eca:
  model: steady-state
  n_gen: 300
environment:
  inputs: [10, 20, 30]
  target: 100
experiment:
  n_runs: 2
  log_stride: 50
  output_dir: {out}
"""


def write_config(tmp_path: Path) -> Path:
    path = tmp_path / "exp.yaml"
    path.write_text(TINY_CONFIG.format(out=tmp_path / "artifacts"))
    return path


# ----------------------------------------------------------------- eval

def test_eval_optimal_program(capsys):
    rc = main(["eval", "* 10 10", "--inputs", "10,20,30", "--target", "100"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "value=100" in out
    assert "consumed=3" in out
    assert "fitness=0" in out
    assert "infix=10*10" in out


def test_eval_reference_program_row_one(capsys):
    rc = main([
        "eval",
        "+ / 20 30 / * - 30 20 10 / * 20 30 10",
        "--inputs", "10,20,30",
        "--target", "100",
    ])
    out = capsys.readouterr().out
    assert rc == 0
    assert "value=1" in out
    assert "fitness=99" in out


def test_eval_incomplete_genome_fails(capsys):
    rc = main(["eval", "+ 10", "--inputs", "10,20,30", "--target", "100"])
    captured = capsys.readouterr()
    assert rc == 1
    assert "incomplete" in captured.out
    assert "fitness=INF" in captured.out


def test_eval_parse_error_names_token_and_position(capsys):
    rc = main(["eval", "+ 40 10", "--inputs", "10,20,30", "--target", "100"])
    captured = capsys.readouterr()
    assert rc == 1
    assert "40" in captured.err
    assert "position 2" in captured.err


def test_eval_bad_inputs_flag_is_usage_error(capsys):
    rc = main(["eval", "* 10 10", "--inputs", "ten,twenty", "--target", "100"])
    assert rc == 2


# ------------------------------------------------------------------ run

def test_run_prints_classification_and_writes_artifacts(tmp_path, capsys):
    rc = main(["run", "--config", str(write_config(tmp_path))])
    out = capsys.readouterr().out
    assert rc == 0
    assert "classification=" in out
    assert "generation_of_first_optimum=" in out
    assert "terminal_distinct_genomes=" in out
    run_dir = tmp_path / "artifacts" / "run_seed_0"
    assert (run_dir / "generations.csv").is_file()
    assert (run_dir / "population.tsv").is_file()
    assert (run_dir / "meta").is_file()


def test_run_seed_override_is_deterministic(tmp_path, capsys):
    cfg = write_config(tmp_path)
    rc1 = main(["run", "--config", str(cfg), "--seed", "11"])
    out1 = capsys.readouterr().out
    rc2 = main(["run", "--config", str(cfg), "--seed", "11"])
    out2 = capsys.readouterr().out
    assert rc1 == rc2 == 0
    assert out1 == out2
    meta = json.loads((tmp_path / "artifacts" / "run_seed_11" / "meta").read_text())
    assert meta["seed"] == 11


def test_run_output_flag_overrides_config(tmp_path, capsys):
    rc = main([
        "run", "--config", str(write_config(tmp_path)),
        "--output", str(tmp_path / "elsewhere"),
    ])
    assert rc == 0
    assert (tmp_path / "elsewhere" / "run_seed_0" / "meta").is_file()


def test_run_missing_config_is_config_error(tmp_path, capsys):
    rc = main(["run", "--config", str(tmp_path / "nope.yaml")])
    assert rc == 2
    assert "config error" in capsys.readouterr().err


def test_run_invalid_config_names_field(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text("eca:\n  model: generational\n  np: 0\nenvironment:\n  inputs: [10]\n  target: 1\n")
    rc = main(["run", "--config", str(path)])
    captured = capsys.readouterr()
    assert rc == 2
    assert "np" in captured.err


# ------------------------------------------------------------ experiment

def test_experiment_prints_summary(tmp_path, capsys):
    rc = main(["experiment", "--config", str(write_config(tmp_path))])
    out = capsys.readouterr().out
    assert rc == 0
    assert "runs=2" in out
    assert "fraction_converged=" in out
    assert "fraction_oscillating=" in out
    assert "fraction_with_optimum=" in out
    assert (tmp_path / "artifacts" / "summary").is_file()
    assert (tmp_path / "artifacts" / "run_1" / "meta").is_file()


# ----------------------------------------------------------- repro-tables

def test_repro_tables_all_pass(capsys):
    rc = main(["repro-tables"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "11/11 checks passed" in out
    assert out.count("PASS") == 11
    assert "FAIL" not in out


# ----------------------------------------------------------------- usage

def test_unknown_flag_is_usage_error():
    assert main(["eval", "* 10 10", "--inputs", "10", "--target", "100", "--bogus"]) == 2


def test_unknown_subcommand_is_usage_error():
    assert main(["dance"]) == 2


def test_missing_subcommand_is_usage_error():
    assert main([]) == 2


def test_help_lists_flags(capsys):
    rc = main(["eval", "--help"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "--inputs" in out
    assert "--target" in out
