from enum import Enum
from typing import Any, Dict, List, Optional
import hashlib
import json
from pydantic import Field, model_validator
from rklab.schemas.base import BaseSchema
from rklab.exceptions import ConfigError
from rklab.config import settings


class ExperimentId(str, Enum):
	RK2 = "rk2"
	INVERSE_RK2 = "inverse-rk2"
	RK1 = "rk1"
	INVERSE_RK1 = "inverse-rk1"
	MARTINGALE_CHECK = "martingale-check"
	RN_CHECK = "rn-check"
	ISING_TABLE = "ising-table"
	
	@property
	def code(self) -> int:
		"""Stable integer folded into every replicate stream key."""
		return list(ExperimentId).index(self) + 1


class OutputFormat(str, Enum):
	JSON = "json"
	CSV = "csv"
	BOTH = "both"


MONTE_CARLO_EXPERIMENTS = {
	ExperimentId.RK2,
	ExperimentId.INVERSE_RK2,
	ExperimentId.RK1,
	ExperimentId.INVERSE_RK1,
	ExperimentId.MARTINGALE_CHECK,
	ExperimentId.RN_CHECK,
}

# Fields that change presentation only; excluded from the echo and hash
PRESENTATION_FIELDS = {"out", "format", "threads", "dump_dir", "log_level"}

MIN_RK2_REPLICATES = 1000


class RunConfig(BaseSchema):
	"""Everything needed to reproduce one experiment run."""
	experiment: ExperimentId
	graph: str
	u: Optional[float] = None
	s: Optional[float] = None
	z0: Optional[str] = None
	t: List[float] = Field(default_factory=lambda: [0.25, 1.0])
	beta: Optional[List[float]] = None
	replicates: Optional[int] = None
	seed: int = 0
	power_control: bool = True
	out: Optional[str] = None
	format: OutputFormat = OutputFormat.JSON
	threads: int = Field(default_factory=lambda: settings.threads)
	dump_dir: Optional[str] = None
	log_level: Optional[str] = None
	
	@model_validator(mode="after")
	def check_required_params(self) -> "RunConfig":
		exp = self.experiment
		if not 0 <= self.seed < 2 ** 64:
			raise ConfigError(f"--seed must be a 64-bit unsigned integer, got {self.seed}")
		if self.threads < 1:
			raise ConfigError(f"--threads must be at least 1, got {self.threads}")
		if exp in (ExperimentId.RK2, ExperimentId.INVERSE_RK2):
			if self.u is None:
				raise ConfigError(f"{exp.value} requires --u")
			if not self.u > 0:
				raise ConfigError(f"--u must be positive, got {self.u}")
		if exp in (ExperimentId.RK1, ExperimentId.INVERSE_RK1):
			if self.s is None:
				raise ConfigError(f"{exp.value} requires --s")
			if not self.s > 0:
				raise ConfigError(f"--s must be positive, got {self.s}")
			if self.z0 is None:
				raise ConfigError(f"{exp.value} requires --z0")
		if exp in (ExperimentId.MARTINGALE_CHECK, ExperimentId.RN_CHECK):
			if not self.t or any(not v > 0 for v in self.t):
				raise ConfigError(f"{exp.value} requires one or more positive --t values")
		if exp == ExperimentId.ISING_TABLE:
			if not self.beta or any(not v >= 0 for v in self.beta):
				raise ConfigError("ising-table requires one or more nonnegative --beta values")
		if exp in MONTE_CARLO_EXPERIMENTS:
			if self.replicates is None:
				raise ConfigError(f"{exp.value} requires --replicates")
			minimum = MIN_RK2_REPLICATES if exp == ExperimentId.RK2 else 2
			if self.replicates < minimum:
				raise ConfigError(f"{exp.value} requires --replicates >= {minimum}, got {self.replicates}")
		return self
	
	def echo(self) -> Dict[str, Any]:
		"""Semantic part of the configuration, as echoed into the report."""
		data = self.to_dict()
		return {k: v for k, v in data.items() if k not in PRESENTATION_FIELDS}
	
	def config_hash(self) -> str:
		"""sha256 of the canonical JSON of the echo."""
		canonical = json.dumps(self.echo(), sort_keys=True, separators=(",", ":"))
		return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
