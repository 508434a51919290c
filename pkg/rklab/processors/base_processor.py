"""
Base processor for Monte Carlo experiments: replicate fan-out, check records and report assembly.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence
import numpy as np
import rklab
from rklab.config import settings
from rklab.logging_config import run_fields
from rklab.schemas.graph import WeightedGraph
from rklab.schemas.path import JumpPath, ReversedRun
from rklab.schemas.report import CheckRecord, ExperimentReport, StatisticKind, Verdict
from rklab.schemas.run_config import ExperimentId, RunConfig
from rklab.services.mjp_service import MjpService
from rklab.services.reinforced_service import ReinforcedService
from rklab.exceptions import NumericalFailureError
from rklab.utils.rng import replicate_stream
from rklab.utils import stats

logger = logging.getLogger(__name__)

# Marker for a replicate dropped after a numerical failure
FAILED = object()


class BaseProcessor:
	"""
	Base class for experiments.

	Subclasses implement `_execute`, which runs pipelines through
	`run_pipeline` and records checks with the `check_*` helpers.
	Replicate r of pipeline p draws from replicate_stream(seed, experiment, r, p),
	and results are collected in replicate order, so the report does not
	depend on the thread count.
	"""
	experiment: ExperimentId

	def __init__(self, g: WeightedGraph, config: RunConfig):
		self.g = g
		self.config = config
		self.seed = config.seed
		self.threads = config.threads
		self.checks: List[CheckRecord] = []
		self.warnings: List[str] = []
		self.replicates: Dict[str, int] = {}
		self.completed: Dict[str, int] = {}
		self.failures: Dict[str, int] = {}
		self.tables: Dict[str, List[Dict[str, Any]]] = {}
		self.processor_name = self.__class__.__name__

	def execute(self) -> ExperimentReport:
		"""Run the experiment and assemble its report."""
		logger.info("=" * 80)
		logger.info(
			f"{self.processor_name} starting ({self.experiment.value}, seed={self.seed}, threads={self.threads})",
			extra=run_fields(self.experiment.value, self.seed, threads=self.threads),
		)
		logger.info("=" * 80)
		self._execute()
		report = self._build_report()
		logger.info("=" * 80)
		logger.info(
			f"{self.processor_name} finished: verdict={report.verdict.value}, "
			f"{len(report.failed_checks)}/{len(report.checks)} checks failed, "
			f"failure rate {report.failure_rate:.3g}"
		)
		logger.info("=" * 80)
		return report

	def _execute(self) -> None:
		raise NotImplementedError("Subclasses must implement _execute method")

	# ------------------------------------------------------------------
	# Replicates
	# ------------------------------------------------------------------

	def run_pipeline(
		self,
		name: str,
		pipeline: int,
		n: int,
		task: Callable[[int, np.random.Generator], Any],
	) -> List[Any]:
		"""
		Run `task(r, rng)` for r = 0..n-1 and return the successful results in r order.

		NumericalFailureError drops the replicate and counts it under `name`.
		"""
		code = self.experiment.code
		every = max(settings.progress_every, 1)

		def run_one(r: int) -> Any:
			rng = replicate_stream(self.seed, code, r, pipeline)
			try:
				return task(r, rng)
			except NumericalFailureError as e:
				logger.warning(f"{name} replicate {r} dropped: {e.message}")
				return FAILED

		results: List[Any] = [None] * n
		completed_count = 0
		with ThreadPoolExecutor(max_workers=self.threads) as executor:
			future_to_replicate = {executor.submit(run_one, r): r for r in range(n)}
			for future in as_completed(future_to_replicate):
				results[future_to_replicate[future]] = future.result()
				completed_count += 1
				if completed_count % every == 0 or completed_count == n:
					logger.info(
						f"{name}: {completed_count}/{n} replicates",
						extra=run_fields(self.experiment.value, self.seed, name, completed=completed_count, requested=n),
					)

		kept = [res for res in results if res is not FAILED]
		self.replicates[name] = n
		self.completed[name] = len(kept)
		self.failures[name] = n - len(kept)
		if self.failures[name]:
			logger.warning(f"{name}: {self.failures[name]} of {n} replicates dropped after numerical failures")
		return kept

	def record_failure(self, name: str, count: int = 1) -> None:
		"""Count replicates dropped by the experiment itself (e.g. depletion away from x0)."""
		self.failures[name] = self.failures.get(name, 0) + count
		self.completed[name] = self.completed.get(name, 0) - count

	def dump_path(self, label: str, r: int, path: JumpPath) -> None:
		if self._should_dump(r):
			MjpService.dump_path_csv(path, self.g, self._dump_file(label, r))

	def dump_run(self, label: str, r: int, run: ReversedRun) -> None:
		if self._should_dump(r):
			ReinforcedService.dump_run_csv(run, self.g, self._dump_file(label, r))

	def _should_dump(self, r: int) -> bool:
		return self.config.dump_dir is not None and r < settings.dump_max_paths

	def _dump_file(self, label: str, r: int) -> Path:
		directory = Path(self.config.dump_dir)
		directory.mkdir(parents=True, exist_ok=True)
		return directory / f"{self.experiment.value}_{label}_{r:05d}.csv"

	# ------------------------------------------------------------------
	# Checks
	# ------------------------------------------------------------------

	def _add(self, record: CheckRecord) -> CheckRecord:
		self.checks.append(record)
		level = logging.INFO if record.passed else logging.WARNING
		logger.log(level, f"check {record.name}: {'pass' if record.passed else 'FAIL'} (stat={record.statistic}, p={record.p_value})")
		return record

	def check_z(self, name: str, estimate: float, stderr: float, target: float, note: Optional[str] = None) -> CheckRecord:
		"""Pass iff |estimate - target| / stderr <= z threshold."""
		z = stats.z_score(estimate, target, stderr)
		return self._add(CheckRecord(
			name=name, kind=StatisticKind.Z, estimate=estimate, stderr=stderr, target=target,
			statistic=z, p_value=stats.two_sided_p(z), passed=bool(abs(z) <= settings.z_threshold), note=note,
		))

	def check_mean(self, name: str, values: Sequence[float], target: float, note: Optional[str] = None) -> CheckRecord:
		mean, stderr = stats.mean_stderr(values)
		return self.check_z(name, mean, stderr, target, note)

	def check_two_sample_mean(self, name: str, a: Sequence[float], b: Sequence[float], note: Optional[str] = None) -> CheckRecord:
		"""Estimate is the A mean, target the B mean, stderr the combined one."""
		mean_a, se_a = stats.mean_stderr(a)
		mean_b, se_b = stats.mean_stderr(b)
		return self.check_z(name, mean_a, math.hypot(se_a, se_b), mean_b, note)

	def check_two_sample_variance(self, name: str, a: Sequence[float], b: Sequence[float]) -> CheckRecord:
		var_a, se_a = stats.variance_stderr(a)
		var_b, se_b = stats.variance_stderr(b)
		return self.check_z(name, var_a, math.hypot(se_a, se_b), var_b)

	def check_weighted_mean(
		self,
		name: str,
		values: Sequence[float],
		weights: Sequence[float],
		target: float,
		target_stderr: float = 0.0,
	) -> CheckRecord:
		"""Self-normalized weighted mean against a target; warns on small effective sample size."""
		mean, stderr, ess = stats.weighted_moment_ci(values, weights)
		if ess < settings.ess_warning:
			self.warnings.append(f"{name}: effective sample size {ess:.3g} below {settings.ess_warning}")
		return self.check_z(name, mean, math.hypot(stderr, target_stderr), target, note=f"ess={ess!r}")

	def check_ks(self, name: str, a: Sequence[float], b: Sequence[float]) -> CheckRecord:
		"""Pass iff the two-sample KS p-value is at least the threshold."""
		statistic, p_value = stats.two_sample_ks(a, b)
		return self._add(CheckRecord(
			name=name, kind=StatisticKind.KS, statistic=statistic, p_value=p_value,
			passed=bool(p_value >= settings.ks_p_threshold),
		))

	def check_exact(self, name: str, estimate: float, target: float, tolerance: float, note: Optional[str] = None) -> CheckRecord:
		"""Pass iff |estimate - target| <= tolerance."""
		deviation = abs(estimate - target)
		return self._add(CheckRecord(
			name=name, kind=StatisticKind.EXACT, estimate=estimate, target=target,
			statistic=deviation, passed=bool(deviation <= tolerance), note=note or f"tolerance={tolerance!r}",
		))

	def check_count(self, name: str, count: int, allowed: int, total: int, note: Optional[str] = None) -> CheckRecord:
		"""Pass iff count <= allowed."""
		return self._add(CheckRecord(
			name=name, kind=StatisticKind.COUNT, estimate=float(count), target=float(allowed),
			statistic=float(count) / total if total else 0.0, passed=bool(count <= allowed),
			note=note or f"{count} of {total}",
		))

	def check_joint_panel(self, prefix: str, a_Phi, a_field, b_Phi, b_field, vertices: Sequence[int]) -> None:
		"""
		Compare joint moments of (Phi, field) between two pipelines.

		Panel per vertex a: Phi_a, Phi_a^2, f_a, f_a^2, Phi_a f_a; per pair a < b: f_a f_b.
		"""
		a_Phi, a_field = np.asarray(a_Phi), np.asarray(a_field)
		b_Phi, b_field = np.asarray(b_Phi), np.asarray(b_field)
		names = self.g.vertices
		for a in vertices:
			label = f"{prefix}[{names[a]}]"
			self.check_two_sample_mean(f"{label}.Phi", a_Phi[:, a], b_Phi[:, a])
			self.check_two_sample_mean(f"{label}.Phi^2", a_Phi[:, a] ** 2, b_Phi[:, a] ** 2)
			self.check_two_sample_mean(f"{label}.field", a_field[:, a], b_field[:, a])
			self.check_two_sample_mean(f"{label}.field^2", a_field[:, a] ** 2, b_field[:, a] ** 2)
			self.check_two_sample_mean(f"{label}.Phi*field", a_Phi[:, a] * a_field[:, a], b_Phi[:, a] * b_field[:, a])
		for k, a in enumerate(vertices):
			for b in vertices[k + 1:]:
				self.check_two_sample_mean(
					f"{prefix}[{names[a]},{names[b]}].field*field",
					a_field[:, a] * a_field[:, b], b_field[:, a] * b_field[:, b],
				)

	# ------------------------------------------------------------------
	# Report
	# ------------------------------------------------------------------

	def _build_report(self) -> ExperimentReport:
		requested = sum(self.replicates.values())
		failed = sum(self.failures.values())
		failure_rate = failed / requested if requested else 0.0
		if requested:
			self.check_count(
				"numerical-failure-rate", failed,
				int(math.floor(settings.max_failure_rate * requested)), requested,
			)
		if failure_rate > settings.max_failure_rate:
			verdict = Verdict.FAILURE_RATE_BREACH
		elif any(not c.passed for c in self.checks):
			verdict = Verdict.FAIL
		else:
			verdict = Verdict.PASS
		return ExperimentReport(
			experiment=self.experiment.value,
			version=rklab.__version__,
			config=self.config.echo(),
			config_hash=self.config.config_hash(),
			graph=self.g.to_spec(),
			master_seed=self.seed,
			thresholds=settings.thresholds,
			numerics=settings.numerics,
			replicates=dict(self.replicates),
			completed=dict(self.completed),
			numerical_failures=dict(self.failures),
			failure_rate=failure_rate,
			checks=self.checks,
			warnings=self.warnings,
			multiplicity_note=(
				f"{len(self.checks)} checks at |z| <= {settings.z_threshold} / KS p >= {settings.ks_p_threshold}; "
				f"no multiplicity correction applied (Bonferroni level would be "
				f"{settings.ks_p_threshold / max(len(self.checks), 1):.3g})"
			),
			tables=self.tables,
			verdict=verdict,
		)
