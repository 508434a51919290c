"""
Inversion of the second Ray-Knight theorem.

Pipeline A: phi ~ GFF, jump process to tau_u, Phi = sqrt(phi^2 + 2 l(tau_u)); record (Phi, phi, l).
Pipeline B: an independent Phi built the same way, the magnetized reversed
process from x0 to depletion, then sigma from the Ising model with
J = W L_end L_end; record (Phi, sigma L_end, (Phi^2 - L_end^2) / 2).
The two joint laws must agree on the moment panel.
"""
import logging
import math
import numpy as np
from rklab.config import settings
from rklab.schemas.ising import IsingSpec
from rklab.schemas.path import EndKind, StopRule
from rklab.schemas.run_config import ExperimentId
from rklab.processors.base_processor import BaseProcessor
from rklab.services.gff_service import GffService
from rklab.services.ising_service import IsingService
from rklab.services.mjp_service import MjpService
from rklab.services.reinforced_service import ReinforcedService

logger = logging.getLogger(__name__)

X0_TOLERANCE = 1e-12


class InverseRk2Processor(BaseProcessor):
	experiment = ExperimentId.INVERSE_RK2

	def _amplitudes(self, rng):
		g = self.g
		phi = GffService.sample_gff(g, rng)
		path = MjpService.simulate_until_tau(g, self.config.u, rng)
		Phi = np.sqrt(phi ** 2 + 2.0 * path.end_local_times)
		return phi, path, Phi

	def _execute(self) -> None:
		g = self.g
		n = self.config.replicates
		x0 = g.x0_index

		def pipeline_a(r, rng):
			phi, path, Phi = self._amplitudes(rng)
			self.dump_path("A", r, path)
			return Phi, phi, path.end_local_times

		def pipeline_b(r, rng):
			_, _, Phi = self._amplitudes(rng)
			run = ReinforcedService.simulate_magnetized_reversed(g, Phi, x0, StopRule.DEPLETION, rng, by_index=True)
			self.dump_run("B", r, run)
			if run.end_kind != EndKind.DEPLETED or run.end_site != x0:
				return None
			sigma = IsingService.sample_spins(IsingSpec.from_amplitudes(g, run.L_end), rng)
			return Phi, sigma * run.L_end, 0.5 * (Phi ** 2 - run.L_end ** 2)

		a = self.run_pipeline("A", 0, n, pipeline_a)
		b_all = self.run_pipeline("B", 1, n, pipeline_b)
		b = [res for res in b_all if res is not None]
		away = len(b_all) - len(b)
		if away:
			logger.warning(f"B: {away} runs depleted away from x0 at the depletion tolerance")
			self.record_failure("B", away)
		self.check_count(
			"ends-at-x0", away, int(settings.max_failure_rate * len(b_all)), len(b_all),
			note=f"{len(b)} of {len(b_all)} completed runs end at x0",
		)

		if not a or not b:
			logger.error("No completed replicates in one of the pipelines; skipping the moment panel")
			return
		a_Phi, a_field, a_ell = (np.array(col) for col in zip(*a))
		b_Phi, b_field, b_ell = (np.array(col) for col in zip(*b))

		level = math.sqrt(2.0 * self.config.u)
		self.check_exact(f"Phi_x0[{g.x0}].A", float(np.max(np.abs(a_Phi[:, x0] - level))), 0.0, X0_TOLERANCE)
		self.check_exact(f"Phi_x0[{g.x0}].B", float(np.max(np.abs(b_Phi[:, x0] - level))), 0.0, X0_TOLERANCE)

		free = [int(i) for i in g.free_indices]
		self.check_joint_panel("panel", a_Phi, a_field, b_Phi, b_field, free)
		for vertex in free:
			name = g.vertices[vertex]
			self.check_two_sample_mean(f"local-time[{name}]", a_ell[:, vertex], b_ell[:, vertex])
			self.check_two_sample_mean(f"local-time^2[{name}]", a_ell[:, vertex] ** 2, b_ell[:, vertex] ** 2)
			self.check_mean(f"centered-field[{name}].B", b_field[:, vertex], 0.0)
