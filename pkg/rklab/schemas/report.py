from enum import Enum
from typing import Any, Dict, List, Optional
from rklab.schemas.base import BaseSchema
from rklab.schemas.graph import GraphSpec
from rklab.exceptions import EXIT_OK, EXIT_STATISTICAL_FAILURE, EXIT_NUMERICAL_FAILURE


class StatisticKind(str, Enum):
	Z = "z"
	KS = "ks"
	EXACT = "exact"
	COUNT = "count"


class Verdict(str, Enum):
	PASS = "pass"
	FAIL = "fail"
	FAILURE_RATE_BREACH = "failure-rate-breach"


class CheckRecord(BaseSchema):
	"""One verified claim: estimate against target under a frozen tolerance rule."""
	name: str
	kind: StatisticKind
	estimate: Optional[float] = None
	stderr: Optional[float] = None
	target: Optional[float] = None
	statistic: Optional[float] = None
	p_value: Optional[float] = None
	passed: bool
	note: Optional[str] = None


class ExperimentReport(BaseSchema):
	"""
	Self-contained experiment result.
	
	Re-runnable from `config`; contains no wall-clock data so that reruns are
	byte-identical (timing goes to the sidecar file).
	"""
	experiment: str
	version: str
	config: Dict[str, Any]
	config_hash: str
	graph: GraphSpec
	master_seed: int
	thresholds: Dict[str, float]
	numerics: Dict[str, Any]
	replicates: Dict[str, int]
	completed: Dict[str, int]
	numerical_failures: Dict[str, int]
	failure_rate: float
	checks: List[CheckRecord]
	warnings: List[str] = []
	multiplicity_note: str = ""
	tables: Dict[str, List[Dict[str, Any]]] = {}
	verdict: Verdict
	
	@property
	def exit_code(self) -> int:
		if self.verdict == Verdict.FAILURE_RATE_BREACH:
			return EXIT_NUMERICAL_FAILURE
		if self.verdict == Verdict.FAIL:
			return EXIT_STATISTICAL_FAILURE
		return EXIT_OK
	
	@property
	def failed_checks(self) -> List[CheckRecord]:
		return [c for c in self.checks if not c.passed]
