"""
Martingale suite: E[M_(t^T)] = M_0 for fixed sign configurations and E[N_(t^T)] = N_0,
with N strictly positive before the stop.
"""
import itertools
import logging
import math
from typing import Dict
import numpy as np
from rklab.schemas.graph import WeightedGraph
from rklab.schemas.path import EndReason
from rklab.schemas.run_config import ExperimentId
from rklab.processors.base_processor import BaseProcessor
from rklab.services.functional_service import FunctionalService, NMethod
from rklab.services.graph_service import GraphService
from rklab.services.mjp_service import MjpService

logger = logging.getLogger(__name__)


def reference_budgets(g: WeightedGraph) -> Dict[str, np.ndarray]:
	"""Constant and graded budgets, both with Phi^2 / 2 above 1."""
	index = np.arange(g.n)
	return {
		"constant": np.full(g.n, 2.0),
		"graded": 1.6 + 0.45 * (index % 3),
	}


class MartingaleProcessor(BaseProcessor):
	experiment = ExperimentId.MARTINGALE_CHECK

	def sign_vectors(self) -> Dict[str, np.ndarray]:
		g = self.g
		minus = np.ones(g.n)
		minus[g.free_indices] = -1.0
		alternating = np.ones(g.n)
		alternating[g.free_indices] = [1.0 if k % 2 == 0 else -1.0 for k in range(g.n_free)]
		return {"plus": np.ones(g.n), "minus": minus, "alternating": alternating}

	def _execute(self) -> None:
		g = self.g
		n = self.config.replicates
		x0 = g.x0_index
		budgets = reference_budgets(g)
		signs = self.sign_vectors()
		horizons = list(self.config.t)

		combinations = itertools.product(budgets.items(), horizons)
		for pipeline, ((budget_name, Phi), horizon) in enumerate(combinations):
			label = f"{budget_name},t={horizon!r}"

			def task(r, rng, Phi=Phi, horizon=horizon):
				path = MjpService.simulate_until_budget(g, x0, Phi, rng, horizon=horizon, by_index=True)
				stop = path.end_time
				values = [FunctionalService.eval_M(g, sigma, Phi, path, stop) for sigma in signs.values()]
				N = FunctionalService.eval_N(g, Phi, path, stop, NMethod.CLOSED)
				return values, N, path.end_reason == EndReason.HORIZON

			results = self.run_pipeline(label, pipeline, n, task)
			M_values = np.array([res[0] for res in results])
			N_values = np.array([res[1] for res in results])
			before_stop = np.array([res[2] for res in results], dtype=bool)

			for k, (sign_name, sigma) in enumerate(signs.items()):
				M0 = math.exp(-0.5 * GraphService.dirichlet_energy(g, sigma * Phi))
				self.check_mean(f"M[{label}][{sign_name}]", M_values[:, k], M0)
			self.check_mean(f"N[{label}]", N_values, FunctionalService.initial_N(g, Phi))
			nonpositive = int(np.sum(N_values[before_stop] <= 0))
			self.check_count(f"N-positive[{label}]", nonpositive, 0, int(before_stop.sum()))
