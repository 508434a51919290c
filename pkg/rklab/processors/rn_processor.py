"""
Change-of-measure suite.

For each horizon t and each reinforced process R in {Z, Z~, Z^}:
E_MJP[D_(t) f(X)] = E_R[f(R)], where D is the matching density (rn_vrjp,
rn_reversed, N / N_0) and f runs over a fixed panel of path functionals.
"""
import logging
from typing import Callable
import numpy as np
from rklab.schemas.graph import WeightedGraph
from rklab.schemas.path import JumpPath, StopRule
from rklab.schemas.run_config import ExperimentId
from rklab.processors.base_processor import BaseProcessor
from rklab.processors.martingale_processor import reference_budgets
from rklab.services.functional_service import FunctionalService, NMethod
from rklab.services.mjp_service import MjpService
from rklab.services.reinforced_service import ReinforcedService

logger = logging.getLogger(__name__)

FEATURES = ("jumps<=1", "first-target", "local-time")


def path_features(g: WeightedGraph, path: JumpPath) -> np.ndarray:
	"""
	Panel of functionals of a path up to its end:
	at most one jump, first jump lands on the smallest-index neighbor of the
	start, local time of the first free vertex.
	"""
	first = g.neighbors[path.start][0]
	return np.array([
		float(path.n_jumps <= 1),
		float(path.n_jumps > 0 and path.jump_targets[0] == first),
		float(path.end_local_times[g.free_indices[0]]),
	])


class RnProcessor(BaseProcessor):
	experiment = ExperimentId.RN_CHECK

	def _compare(
		self,
		label: str,
		pipeline: int,
		weighted: Callable,
		reinforced: Callable,
	) -> None:
		n = self.config.replicates
		mjp = np.array(self.run_pipeline(f"{label}.mjp", pipeline, n, weighted))
		other = np.array(self.run_pipeline(f"{label}.reinforced", pipeline + 1, n, reinforced))
		if len(mjp) < 2 or len(other) < 2:
			logger.error(f"{label}: not enough completed replicates to compare")
			return
		density = mjp[:, 0]
		self.check_mean(f"{label}.mass", density, 1.0)
		for k, feature in enumerate(FEATURES):
			self.check_two_sample_mean(f"{label}.{feature}", density * mjp[:, k + 1], other[:, k])

	def _execute(self) -> None:
		g = self.g
		x0 = g.x0_index
		Phi = reference_budgets(g)["graded"]
		for ti, horizon in enumerate(self.config.t):
			base = 6 * ti
			tag = f"t={horizon!r}"

			def vrjp_weighted(r, rng, horizon=horizon):
				path = MjpService.simulate_until_horizon(g, x0, horizon, rng, by_index=True)
				return np.concatenate(([FunctionalService.rn_vrjp(g, Phi, path, horizon)], path_features(g, path)))

			def vrjp(r, rng, horizon=horizon):
				path = ReinforcedService.simulate_vrjp_timechanged(g, Phi, x0, horizon, rng, by_index=True)
				self.dump_path(f"vrjp_{ti}", r, path)
				return path_features(g, path)

			def reversed_weighted(r, rng, horizon=horizon):
				path = MjpService.simulate_until_budget(g, x0, Phi, rng, horizon=horizon, by_index=True)
				return np.concatenate(([FunctionalService.rn_reversed(g, Phi, path, path.end_time)], path_features(g, path)))

			def reversed_run(r, rng, horizon=horizon):
				run = ReinforcedService.simulate_reversed_vrjp(g, Phi, x0, rng, horizon=horizon, by_index=True)
				self.dump_run(f"reversed_{ti}", r, run)
				return path_features(g, run.z_path)

			N0 = FunctionalService.initial_N(g, Phi)

			def magnetized_weighted(r, rng, horizon=horizon):
				path = MjpService.simulate_until_budget(g, x0, Phi, rng, horizon=horizon, by_index=True)
				N = FunctionalService.eval_N(g, Phi, path, path.end_time, NMethod.CLOSED)
				return np.concatenate(([N / N0], path_features(g, path)))

			def magnetized(r, rng, horizon=horizon):
				run = ReinforcedService.simulate_magnetized_reversed(
					g, Phi, x0, StopRule.DEPLETION, rng, horizon=horizon, by_index=True
				)
				self.dump_run(f"magnetized_{ti}", r, run)
				return path_features(g, run.z_path)

			self._compare(f"vrjp[{tag}]", base, vrjp_weighted, vrjp)
			self._compare(f"reversed[{tag}]", base + 2, reversed_weighted, reversed_run)
			self._compare(f"magnetized[{tag}]", base + 4, magnetized_weighted, magnetized)
