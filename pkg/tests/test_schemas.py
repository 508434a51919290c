"""
Unit tests for the run configuration and report schemas.
"""
import json
import math
import pytest
from rklab.schemas.report import CheckRecord, ExperimentReport, StatisticKind, Verdict
from rklab.schemas.run_config import ExperimentId, RunConfig
from rklab.exceptions import ConfigError, EXIT_NUMERICAL_FAILURE, EXIT_OK, EXIT_STATISTICAL_FAILURE


def make_report(single_edge, verdict, checks=None):
	return ExperimentReport(
		experiment="rk2",
		version="test",
		config={},
		config_hash="0" * 64,
		graph=single_edge.to_spec(),
		master_seed=1,
		thresholds={},
		numerics={},
		replicates={},
		completed={},
		numerical_failures={},
		failure_rate=0.0,
		checks=checks or [],
		verdict=verdict,
	)


class TestExperimentId:
	"""Test cases for ExperimentId."""

	def test_codes_stable(self):
		"""Test the integer folded into replicate streams."""
		assert ExperimentId.RK2.code == 1
		assert ExperimentId.INVERSE_RK1.code == 4
		assert ExperimentId.ISING_TABLE.code == 7
		assert len({e.code for e in ExperimentId}) == len(ExperimentId)


class TestRunConfig:
	"""Test cases for RunConfig validation, echo and hash."""

	def test_rk2_requires_u(self):
		"""Test that rk2 without --u is a configuration error."""
		with pytest.raises(ConfigError, match="--u"):
			RunConfig(experiment="rk2", graph="g.json", replicates=1000)

	@pytest.mark.parametrize("u", [0.0, -1.0])
	def test_rk2_rejects_nonpositive_u(self, u):
		"""Test that u must be positive."""
		with pytest.raises(ConfigError):
			RunConfig(experiment="rk2", graph="g.json", u=u, replicates=1000)

	def test_rk2_minimum_replicates(self):
		"""Test the rk2 replicate floor."""
		with pytest.raises(ConfigError, match="1000"):
			RunConfig(experiment="rk2", graph="g.json", u=1.0, replicates=999)

	def test_rk1_requires_start(self):
		"""Test that rk1 needs both s and z0."""
		with pytest.raises(ConfigError, match="--z0"):
			RunConfig(experiment="rk1", graph="g.json", s=1.0, replicates=10)
		with pytest.raises(ConfigError, match="--s"):
			RunConfig(experiment="rk1", graph="g.json", z0="a", replicates=10)

	def test_negative_beta(self):
		"""Test that ising-table betas are nonnegative."""
		with pytest.raises(ConfigError):
			RunConfig(experiment="ising-table", graph="g.json", beta=[0.5, -0.1])

	def test_nonpositive_horizon(self):
		"""Test that horizons must be positive."""
		with pytest.raises(ConfigError):
			RunConfig(experiment="martingale-check", graph="g.json", t=[0.0], replicates=10)

	@pytest.mark.parametrize("seed", [-1, 2 ** 64])
	def test_seed_range(self, seed):
		"""Test that the seed is a 64-bit unsigned integer."""
		with pytest.raises(ConfigError):
			RunConfig(experiment="ising-table", graph="g.json", beta=[1.0], seed=seed)

	def test_missing_replicates(self):
		"""Test that Monte Carlo experiments need a replicate count."""
		with pytest.raises(ConfigError, match="--replicates"):
			RunConfig(experiment="rn-check", graph="g.json")

	def test_ising_table_needs_no_replicates(self):
		"""Test that the exact table validates without replicates."""
		config = RunConfig(experiment="ising-table", graph="g.json", beta=[0.0, 1.0])
		assert config.replicates is None

	def test_echo_excludes_presentation(self):
		"""Test that output and threading fields stay out of the echo."""
		config = RunConfig(experiment="rk2", graph="g.json", u=1.0, replicates=1000, out="r.json", threads=3)
		echo = config.echo()
		for field in ("out", "format", "threads", "dump_dir", "log_level"):
			assert field not in echo
		assert echo["experiment"] == "rk2"
		assert echo["u"] == 1.0

	def test_hash_ignores_threads(self):
		"""Test that the config hash does not depend on presentation fields."""
		a = RunConfig(experiment="rk2", graph="g.json", u=1.0, replicates=1000, threads=1)
		b = RunConfig(experiment="rk2", graph="g.json", u=1.0, replicates=1000, threads=8, format="both")
		c = RunConfig(experiment="rk2", graph="g.json", u=1.5, replicates=1000, threads=1)
		assert a.config_hash() == b.config_hash()
		assert a.config_hash() != c.config_hash()
		assert len(a.config_hash()) == 64


class TestExperimentReport:
	"""Test cases for ExperimentReport."""

	@pytest.mark.parametrize(
		"verdict,code",
		[
			(Verdict.PASS, EXIT_OK),
			(Verdict.FAIL, EXIT_STATISTICAL_FAILURE),
			(Verdict.FAILURE_RATE_BREACH, EXIT_NUMERICAL_FAILURE),
		],
	)
	def test_exit_code(self, single_edge, verdict, code):
		"""Test the verdict to exit code mapping."""
		assert make_report(single_edge, verdict).exit_code == code

	def test_non_finite_as_null(self, single_edge):
		"""Test that infinite statistics serialize as null."""
		check = CheckRecord(name="x", kind=StatisticKind.Z, estimate=1.0, statistic=math.inf, passed=False)
		data = json.loads(make_report(single_edge, Verdict.FAIL, [check]).to_json())
		assert data["checks"][0]["statistic"] is None
		assert data["checks"][0]["kind"] == "z"
		assert data["verdict"] == "fail"

	def test_floats_round_trip(self, single_edge):
		"""Test that floats parse back to the identical double."""
		value = 0.1 + 0.2
		check = CheckRecord(name="x", kind=StatisticKind.EXACT, estimate=value, passed=True)
		data = json.loads(make_report(single_edge, Verdict.PASS, [check]).to_json())
		assert data["checks"][0]["estimate"] == value

	def test_failed_checks(self, single_edge):
		"""Test that failed_checks keeps only failures."""
		checks = [
			CheckRecord(name="ok", kind=StatisticKind.COUNT, passed=True),
			CheckRecord(name="bad", kind=StatisticKind.COUNT, passed=False),
		]
		assert [c.name for c in make_report(single_edge, Verdict.FAIL, checks).failed_checks] == ["bad"]

	def test_reload_from_json(self, single_edge):
		"""Test that a written report validates back into an identical report."""
		checks = [CheckRecord(name="mean[a]", kind=StatisticKind.Z, estimate=0.1 + 0.2, stderr=0.01, target=0.3, statistic=0.5, p_value=0.6, passed=True)]
		report = make_report(single_edge, Verdict.PASS, checks)
		reloaded = ExperimentReport.from_dict(json.loads(report.to_json()))
		assert isinstance(reloaded, ExperimentReport)
		assert reloaded.verdict == Verdict.PASS
		assert reloaded.checks[0].kind == StatisticKind.Z
		assert reloaded.to_json() == report.to_json()
