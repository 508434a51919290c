"""
Tests for the rklab command line: argument handling, exit codes and report files.
"""
import json
from pathlib import Path
import pandas as pd
import pytest
from rklab.cli import build_parser, load_config_file, main
from rklab.exceptions import ConfigError, EXIT_OK, EXIT_STATISTICAL_FAILURE, EXIT_USAGE

GRAPHS_DIR = Path(__file__).resolve().parent.parent / "graphs"
SINGLE_EDGE = str(GRAPHS_DIR / "single_edge.json")


def ising_args(*extra):
	return ["ising-table", "--graph", SINGLE_EDGE, "--beta", "0", "0.5", "1", *extra]


class TestArguments:
	"""Test cases for parsing and configuration errors."""

	def test_subcommands(self):
		"""Test one subcommand per experiment."""
		args = build_parser().parse_args(["rn-check", "--graph", "g.json", "--t", "0.5", "1"])
		assert args.experiment == "rn-check"
		assert args.t == [0.5, 1.0]
		assert args.power_control is None

	def test_missing_required_parameter(self):
		"""Test exit code 2 when rk2 has no --u."""
		assert main(["rk2", "--graph", SINGLE_EDGE, "--replicates", "1000"]) == EXIT_USAGE

	def test_unknown_subcommand(self):
		"""Test exit code 2 for an unknown experiment."""
		assert main(["rk3", "--graph", SINGLE_EDGE]) == EXIT_USAGE

	def test_missing_graph(self):
		"""Test exit code 2 without --graph."""
		assert main(["ising-table", "--beta", "1"]) == EXIT_USAGE

	def test_unreadable_graph(self, tmp_path):
		"""Test exit code 2 for a graph file that does not exist."""
		assert main(["ising-table", "--graph", str(tmp_path / "none.json"), "--beta", "1"]) == EXIT_USAGE

	def test_version(self, capsys):
		"""Test that --version exits cleanly."""
		assert main(["--version"]) == EXIT_OK
		assert "rklab" in capsys.readouterr().out


class TestConfigFile:
	"""Test cases for --config files."""

	def test_yaml_mapping(self, tmp_path):
		"""Test that dashed keys are normalized."""
		path = tmp_path / "run.yaml"
		path.write_text("graph: g.json\ndump-dir: paths\nbeta: [0.5]\n", encoding="utf-8")
		assert load_config_file(str(path)) == {"graph": "g.json", "dump_dir": "paths", "beta": [0.5]}

	def test_not_a_mapping(self, tmp_path):
		"""Test that a list document is rejected."""
		path = tmp_path / "run.yaml"
		path.write_text("- 1\n- 2\n", encoding="utf-8")
		with pytest.raises(ConfigError):
			load_config_file(str(path))

	def test_missing_file(self, tmp_path):
		"""Test exit code 2 for a missing config file."""
		assert main(["ising-table", "--config", str(tmp_path / "missing.yaml")]) == EXIT_USAGE

	def test_flags_override_file(self, tmp_path):
		"""Test that flags take precedence over the config file."""
		config = tmp_path / "run.yaml"
		config.write_text(f"graph: {SINGLE_EDGE}\nbeta: [0.5]\nseed: 3\n", encoding="utf-8")
		out = tmp_path / "r.json"
		assert main(["ising-table", "--config", str(config), "--seed", "5", "--out", str(out)]) == EXIT_OK
		report = json.loads(out.read_text(encoding="utf-8"))
		assert report["master_seed"] == 5
		assert report["config"]["beta"] == [0.5]


class TestReports:
	"""End-to-end runs of the exact Ising table."""

	def test_json_report_and_sidecar(self, tmp_path):
		"""Test the report, the table CSV and the timing sidecar."""
		out = tmp_path / "r.json"
		assert main(ising_args("--out", str(out))) == EXIT_OK
		report = json.loads(out.read_text(encoding="utf-8"))
		assert report["experiment"] == "ising-table"
		assert report["verdict"] == "pass"
		assert "wall_time_seconds" not in json.dumps(report)
		table = pd.read_csv(tmp_path / "r.ising.csv")
		assert table["beta"].tolist() == [0.0, 0.5, 1.0]
		meta = json.loads((tmp_path / "r.json.meta.json").read_text(encoding="utf-8"))
		assert set(meta) == {"started_at", "wall_time_seconds", "threads"}

	def test_byte_identical_reruns(self, tmp_path):
		"""Test that equal configurations give identical report bytes."""
		first, second = tmp_path / "a.json", tmp_path / "b.json"
		assert main(ising_args("--out", str(first))) == EXIT_OK
		assert main(ising_args("--out", str(second), "--threads", "2")) == EXIT_OK
		assert first.read_bytes() == second.read_bytes()

	def test_format_both(self, tmp_path):
		"""Test that `both` writes JSON and the CSV check summary."""
		out = tmp_path / "r.json"
		assert main(ising_args("--out", str(out), "--format", "both")) == EXIT_OK
		summary = pd.read_csv(tmp_path / "r.csv")
		assert list(summary.columns) == ["name", "estimate", "stderr", "target", "stat", "p", "verdict"]
		assert set(summary["verdict"]) == {"pass"}
		assert (tmp_path / "r.json").exists()

	def test_stdout(self, capsys):
		"""Test that the JSON body goes to stdout without --out."""
		assert main(ising_args()) == EXIT_OK
		assert json.loads(capsys.readouterr().out)["experiment"] == "ising-table"

	def test_statistical_failure_exit_code(self, tmp_path, mocker):
		"""Test exit code 1 when a check fails."""
		mocker.patch("rklab.processors.ising_table_processor.IsingTableProcessor.derivative_gap", return_value=1.0)
		out = tmp_path / "r.json"
		assert main(ising_args("--out", str(out))) == EXIT_STATISTICAL_FAILURE
		assert json.loads(out.read_text(encoding="utf-8"))["verdict"] == "fail"
