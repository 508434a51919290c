"""
First generalized Ray-Knight theorem with its signed measure.

Sample A: (l_x(H_x0) + (phi_x + s)^2 / 2)_x for the jump process from z0, unit weight.
Sample B: ((phi_x + s)^2 / 2)_x under the signed weight 1 + phi_z0 / s, and
under the positive weight <sigma_z0> |s + phi_z0| / s where <.> is the Ising
model J = W |phi + s| |phi + s| with sigma_x0 = +1.
"""
import logging
import math
import numpy as np
from rklab.schemas.run_config import ExperimentId
from rklab.processors.base_processor import BaseProcessor
from rklab.services.gff_service import GffService
from rklab.services.ising_service import IsingService
from rklab.services.mjp_service import MjpService
from rklab.exceptions import InvalidParameterError
from rklab.utils import stats

logger = logging.getLogger(__name__)

X0_TOLERANCE = 1e-12
MAGNETIZATION_BATCH = 1024


class Rk1Processor(BaseProcessor):
	experiment = ExperimentId.RK1

	def start_vertex(self) -> int:
		z0 = self.g.index_of(self.config.z0)
		if z0 == self.g.x0_index:
			raise InvalidParameterError(f"z0 must differ from x0 ({self.g.x0})")
		if not self.config.s > 0:
			raise InvalidParameterError(f"s must be positive, got {self.config.s}")
		return z0

	def positive_weights(self, shifted: np.ndarray, z0: int) -> np.ndarray:
		"""<sigma_z0> |s + phi_z0| / s for each row of shifted = phi + s."""
		g = self.g
		s = self.config.s
		u, v = g.edge_pairs[:, 0], g.edge_pairs[:, 1]
		amplitudes = np.abs(shifted)
		couplings = g.edge_weights * amplitudes[:, u] * amplitudes[:, v]
		mags = np.concatenate([
			IsingService.batch_magnetizations(g, couplings[k:k + MAGNETIZATION_BATCH])[:, z0]
			for k in range(0, len(couplings), MAGNETIZATION_BATCH)
		])
		return mags * amplitudes[:, z0] / s

	def _execute(self) -> None:
		g = self.g
		s = self.config.s
		n = self.config.replicates
		z0 = self.start_vertex()

		def sample_a(r, rng):
			phi = GffService.sample_gff(g, rng)
			path = MjpService.simulate_until_hit(g, z0, rng, by_index=True)
			self.dump_path("A", r, path)
			return path.end_local_times + 0.5 * (phi + s) ** 2

		def sample_b(r, rng):
			return GffService.sample_gff(g, rng) + s

		a = np.array(self.run_pipeline("A", 0, n, sample_a))
		shifted = np.array(self.run_pipeline("B", 1, n, sample_b))
		b = 0.5 * shifted ** 2
		signed = shifted[:, z0] / s
		positive = self.positive_weights(shifted, z0)

		self.check_mean("signed-weight-mass", signed, 1.0)
		self.check_mean("positive-weight-mass", positive, 1.0)
		x0 = g.x0_index
		self.check_exact(f"x0[{g.x0}].A", float(np.max(np.abs(a[:, x0] - 0.5 * s * s))), 0.0, X0_TOLERANCE)
		self.check_exact(f"x0[{g.x0}].B", float(np.max(np.abs(b[:, x0] - 0.5 * s * s))), 0.0, X0_TOLERANCE)

		for vertex in g.free_indices:
			name = g.vertices[vertex]
			for power in (1, 2):
				a_values = a[:, vertex] ** power
				b_values = b[:, vertex] ** power
				mean_a, se_a = stats.mean_stderr(a_values)
				label = f"moment{power}[{name}]"
				signed_check = self.check_weighted_mean(f"{label}.signed", b_values, signed, mean_a, se_a)
				positive_check = self.check_weighted_mean(f"{label}.positive", b_values, positive, mean_a, se_a)
				mean_s, se_s, _ = stats.weighted_moment_ci(b_values, signed)
				mean_p, se_p, _ = stats.weighted_moment_ci(b_values, positive)
				self.check_z(f"{label}.signed-vs-positive", mean_s, math.hypot(se_s, se_p), mean_p)
				logger.debug(f"{label}: A={mean_a}, signed={signed_check.estimate}, positive={positive_check.estimate}")
