import logging
import numpy as np
from scipy import linalg
from rklab.schemas.graph import WeightedGraph
from rklab.services.graph_service import GraphService
from rklab.exceptions import InvalidParameterError
logger = logging.getLogger(__name__)


class GffService:
	"""Gaussian free field pinned to 0 at x0."""
	@staticmethod
	def sample_gff(g: WeightedGraph, rng: np.random.Generator) -> np.ndarray:
		"""
		Draw phi with phi_x0 = 0 and Cov(phi_U) = G_U.

		Consumes exactly |U| standard normals (ziggurat) from rng, then solves
		L^T phi_U = z with L the lower Cholesky factor of Lambda_U.
		"""
		phi = np.zeros(g.n)
		if g.n_free == 0:
			return phi
		L = GraphService.cholesky_free(g)
		z = rng.standard_normal(g.n_free)
		phi[g.free_indices] = linalg.solve_triangular(L, z, lower=True, trans="T")
		return phi

	@staticmethod
	def gff_normalizer_log(g: WeightedGraph) -> float:
		"""log C = -|U|/2 log(2 pi) - 1/2 log det G_U."""
		L = GraphService.cholesky_free(g)
		return float(-0.5 * g.n_free * np.log(2.0 * np.pi) + np.sum(np.log(np.diag(L))))

	@staticmethod
	def gff_log_density(g: WeightedGraph, phi) -> float:
		"""log C - 1/2 E(phi, phi) for a field pinned at x0."""
		phi = GraphService.check_vector(g, phi)
		if phi[g.x0_index] != 0.0:
			raise InvalidParameterError(f"GFF density requires phi_x0 = 0, got {phi[g.x0_index]}")
		return GffService.gff_normalizer_log(g) - 0.5 * GraphService.dirichlet_energy(g, phi)
