import os
from typing import Any, Dict
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

class Settings:
	# Logging / parallelism
	log_level: str = os.getenv("LOG_LEVEL", "INFO")
	threads: int = int(os.getenv("RKLAB_THREADS", "1"))
	progress_every: int = int(os.getenv("RKLAB_PROGRESS_EVERY", "1000"))

	# Reinforced processes: a site is depleted once its amplitude drops below tolerance * initial amplitude
	depletion_tolerance: float = float(os.getenv("RKLAB_DEPLETION_TOLERANCE", "1e-9"))
	hazard_rtol: float = float(os.getenv("RKLAB_HAZARD_RTOL", "1e-8"))
	hazard_max_steps: int = int(os.getenv("RKLAB_HAZARD_MAX_STEPS", "1000000"))
	# Magnetized holdings: "potential" (root solve on log F<s_i>) or "integrate" (RK45 on the hazard)
	hazard_inversion: str = os.getenv("RKLAB_HAZARD_INVERSION", "potential")

	# Ising enumeration
	max_free_spins: int = int(os.getenv("RKLAB_MAX_FREE_SPINS", "24"))
	enumeration_chunk_bits: int = int(os.getenv("RKLAB_ENUMERATION_CHUNK_BITS", "16"))

	# Frozen pass thresholds
	z_threshold: float = float(os.getenv("RKLAB_Z_THRESHOLD", "4.0"))
	ks_p_threshold: float = float(os.getenv("RKLAB_KS_P_THRESHOLD", "0.001"))
	max_failure_rate: float = float(os.getenv("RKLAB_MAX_FAILURE_RATE", "0.001"))
	ess_warning: float = float(os.getenv("RKLAB_ESS_WARNING", "10"))

	# Optional path dumps
	dump_max_paths: int = int(os.getenv("RKLAB_DUMP_MAX_PATHS", "10"))

	@property
	def thresholds(self) -> Dict[str, float]:
		"""Pass thresholds echoed into every report."""
		return {
			"z_threshold": self.z_threshold,
			"ks_p_threshold": self.ks_p_threshold,
			"max_failure_rate": self.max_failure_rate,
			"ess_warning": self.ess_warning,
		}

	@property
	def numerics(self) -> Dict[str, Any]:
		"""Integrator and enumeration settings echoed into every report."""
		return {
			"depletion_tolerance": self.depletion_tolerance,
			"hazard_rtol": self.hazard_rtol,
			"hazard_max_steps": self.hazard_max_steps,
			"hazard_inversion": self.hazard_inversion,
			"max_free_spins": self.max_free_spins,
		}

settings = Settings()
