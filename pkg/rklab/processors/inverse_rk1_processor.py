"""
Inversion of the first Ray-Knight theorem.

Pipeline A: phi ~ GFF, jump process from z0 to H_x0, Phi = sqrt(2 l(H_x0) + (phi + s)^2); record (Phi, phi + s).
Pipeline B: an independent Phi built the same way, the magnetized reversed
process from z0 stopped at its first arrival at x0, sigma from the Ising
model J = W L_end L_end; record (Phi, sigma L_end).
"""
import logging
import numpy as np
from rklab.config import settings
from rklab.schemas.ising import IsingSpec
from rklab.schemas.path import EndKind, StopRule
from rklab.schemas.run_config import ExperimentId
from rklab.processors.rk1_processor import Rk1Processor
from rklab.services.gff_service import GffService
from rklab.services.ising_service import IsingService
from rklab.services.mjp_service import MjpService
from rklab.services.reinforced_service import ReinforcedService

logger = logging.getLogger(__name__)

X0_TOLERANCE = 1e-12


class InverseRk1Processor(Rk1Processor):
	experiment = ExperimentId.INVERSE_RK1

	def _amplitudes(self, z0: int, rng):
		g = self.g
		shifted = GffService.sample_gff(g, rng) + self.config.s
		path = MjpService.simulate_until_hit(g, z0, rng, by_index=True)
		Phi = np.sqrt(2.0 * path.end_local_times + shifted ** 2)
		return shifted, path, Phi

	def _execute(self) -> None:
		g = self.g
		n = self.config.replicates
		z0 = self.start_vertex()

		def pipeline_a(r, rng):
			shifted, path, Phi = self._amplitudes(z0, rng)
			self.dump_path("A", r, path)
			return Phi, shifted

		def pipeline_b(r, rng):
			_, _, Phi = self._amplitudes(z0, rng)
			run = ReinforcedService.simulate_magnetized_reversed(g, Phi, z0, StopRule.HIT_X0, rng, by_index=True)
			self.dump_run("B", r, run)
			if run.end_kind != EndKind.HIT_X0:
				return None
			sigma = IsingService.sample_spins(IsingSpec.from_amplitudes(g, run.L_end), rng)
			return Phi, sigma * run.L_end

		a = self.run_pipeline("A", 0, n, pipeline_a)
		b_all = self.run_pipeline("B", 1, n, pipeline_b)
		b = [res for res in b_all if res is not None]
		depleted = len(b_all) - len(b)
		if depleted:
			logger.warning(f"B: {depleted} runs depleted before reaching x0")
			self.record_failure("B", depleted)
		self.check_count(
			"hits-x0-before-depletion", depleted, int(settings.max_failure_rate * len(b_all)), len(b_all),
			note=f"{len(b)} of {len(b_all)} completed runs reach x0 before depletion",
		)

		if not a or not b:
			logger.error("No completed replicates in one of the pipelines; skipping the moment panel")
			return
		a_Phi, a_field = (np.array(col) for col in zip(*a))
		b_Phi, b_field = (np.array(col) for col in zip(*b))

		x0 = g.x0_index
		self.check_exact(
			f"field_x0[{g.x0}].A", float(np.max(np.abs(a_field[:, x0] - self.config.s))), 0.0, X0_TOLERANCE
		)
		self.check_joint_panel("panel", a_Phi, a_field, b_Phi, b_field, [int(i) for i in g.free_indices])
