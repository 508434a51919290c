from functools import lru_cache
from typing import Callable, Dict, Optional, Tuple
import logging
import numpy as np
from scipy.special import logsumexp, expit
from rklab.config import settings
from rklab.schemas.graph import WeightedGraph
from rklab.schemas.ising import IsingSpec
from rklab.exceptions import TooManySpinsError, IndexMismatchError, NegativeCouplingError
logger = logging.getLogger(__name__)


@lru_cache(maxsize=256)
def _spin_block(n: int, free: Tuple[int, ...], fixed: Tuple[Tuple[int, int], ...], start: int, size: int) -> np.ndarray:
	"""
	Spin configurations start..start+size-1 of the enumeration over `free`.

	Bit k of the configuration number set means free[k] = -1. Unlisted
	vertices not in `fixed` are +1 (this covers the x0 boundary).
	"""
	sigma = np.ones((size, n))
	for vertex, value in fixed:
		sigma[:, vertex] = value
	if free:
		codes = np.arange(start, start + size, dtype=np.int64)
		bits = (codes[:, None] >> np.arange(len(free), dtype=np.int64)) & 1
		sigma[:, list(free)] = 1.0 - 2.0 * bits
	sigma.setflags(write=False)
	return sigma


@lru_cache(maxsize=256)
def _edge_block(
	n: int, free: Tuple[int, ...], fixed: Tuple[Tuple[int, int], ...], start: int, size: int,
	pairs: Tuple[Tuple[int, int], ...],
) -> np.ndarray:
	"""(size, m) products sigma_u sigma_v of a spin block, one column per edge."""
	sigma = _spin_block(n, free, fixed, start, size)
	ends = np.array(pairs, dtype=np.int64).reshape(-1, 2)
	products = sigma[:, ends[:, 0]] * sigma[:, ends[:, 1]]
	products.setflags(write=False)
	return products


class IsingService:
	"""
	Exact inference for ferromagnetic Ising models with boundary sigma_x0 = +1.

	Everything is exhaustive enumeration over the free spins, in chunks of
	2^RKLAB_ENUMERATION_CHUNK_BITS configurations reduced by log-sum-exp in
	chunk order, so results do not depend on how the work is split.
	"""
	@staticmethod
	def _enumerate(
		g: WeightedGraph,
		J: np.ndarray,
		field: Optional[np.ndarray] = None,
		fixed: Optional[Dict[int, int]] = None,
		observable: Optional[Callable[[np.ndarray], np.ndarray]] = None,
	) -> Tuple[np.ndarray, Optional[np.ndarray]]:
		"""
		Log-partition and Gibbs averages for a batch of coupling vectors.

		Args:
			J: (B, m) couplings aligned with g.edge_pairs
			field: optional (B, n) external field
			fixed: spins pinned in addition to the x0 boundary
			observable: maps a (k, n) spin block to a (k, d) array

		Returns:
			(log F of shape (B,), Gibbs mean of the observable of shape (B, d) or None)
		"""
		fixed = dict(fixed or {})
		fixed[g.x0_index] = 1
		free = tuple(int(i) for i in g.free_indices if int(i) not in fixed)
		if len(free) > settings.max_free_spins:
			raise TooManySpinsError(len(free), settings.max_free_spins)
		fixed_key = tuple(sorted(fixed.items()))
		total = 1 << len(free)
		chunk = 1 << min(len(free), settings.enumeration_chunk_bits)
		pairs = tuple(map(tuple, g.edge_pairs.tolist()))

		log_z = None
		mean = None
		for start in range(0, total, chunk):
			size = min(chunk, total - start)
			sigma = _spin_block(g.n, free, fixed_key, start, size)
			log_w = J @ _edge_block(g.n, free, fixed_key, start, size, pairs).T
			if field is not None:
				log_w = log_w + field @ sigma.T
			chunk_log_z = logsumexp(log_w, axis=1)
			if observable is not None:
				weights = np.exp(log_w - chunk_log_z[:, None])
				chunk_mean = weights @ observable(sigma)
			if log_z is None:
				log_z = chunk_log_z
				if observable is not None:
					mean = chunk_mean
				continue
			new_log_z = np.logaddexp(log_z, chunk_log_z)
			if observable is not None:
				mean = (
					mean * np.exp(log_z - new_log_z)[:, None]
					+ chunk_mean * np.exp(chunk_log_z - new_log_z)[:, None]
				)
			log_z = new_log_z
		return log_z, mean

	@staticmethod
	def _couplings(g: WeightedGraph, J) -> np.ndarray:
		J = np.atleast_2d(np.asarray(J, dtype=float))
		if J.shape[1] != len(g.edge_weights):
			raise IndexMismatchError(len(g.edge_weights), J.shape[1])
		if np.any(J < 0):
			raise NegativeCouplingError(float(J.min()))
		return J

	@staticmethod
	def log_partition(spec: IsingSpec, field=None) -> float:
		"""
		log F with F = sum_sigma exp(sum_e J_e sigma_u sigma_v), sigma_x0 = +1.

		`field` adds sum_x h_x sigma_x to the exponent; it exists only for the
		finite-difference check of the magnetizations.
		"""
		h = None if field is None else np.atleast_2d(np.asarray(field, dtype=float))
		log_z, _ = IsingService._enumerate(spec.graph, spec.couplings[None, :], field=h)
		return float(log_z[0])

	@staticmethod
	def partition_function(spec: IsingSpec) -> float:
		return float(np.exp(IsingService.log_partition(spec)))

	@staticmethod
	def magnetizations(spec: IsingSpec) -> np.ndarray:
		"""<sigma_x> per vertex; exactly 1 at x0."""
		return IsingService.batch_magnetizations(spec.graph, spec.couplings)[0]

	@staticmethod
	def batch_magnetizations(g: WeightedGraph, J) -> np.ndarray:
		"""Magnetizations for each row of a (B, m) coupling batch."""
		J = IsingService._couplings(g, J)
		_, mags = IsingService._enumerate(g, J, observable=lambda s: s)
		mags[:, g.x0_index] = 1.0
		return mags

	@staticmethod
	def pair_correlation(spec: IsingSpec, i: int, j: int) -> float:
		"""<sigma_i sigma_j> by enumeration."""
		_, corr = IsingService._enumerate(
			spec.graph, spec.couplings[None, :],
			observable=lambda s: (s[:, i] * s[:, j])[:, None],
		)
		return float(corr[0, 0])

	@staticmethod
	def log_partition_and_correlation(g: WeightedGraph, J, i: int, j: int) -> Tuple[float, float]:
		"""(log F, <sigma_i sigma_j>) in one enumeration, for the martingale closed form."""
		J = IsingService._couplings(g, J)
		log_z, corr = IsingService._enumerate(g, J, observable=lambda s: (s[:, i] * s[:, j])[:, None])
		return float(log_z[0]), float(corr[0, 0])

	@staticmethod
	def sample_spins(spec: IsingSpec, rng: np.random.Generator) -> np.ndarray:
		"""
		Exact Gibbs sample by sequential conditioning.

		Free spins are fixed in declared order; each takes +1 with probability
		F(+) / (F(+) + F(-)) from two restricted enumerations, using one uniform.
		"""
		g = spec.graph
		J = spec.couplings[None, :]
		fixed = {}
		for vertex in g.free_indices:
			vertex = int(vertex)
			log_plus, _ = IsingService._enumerate(g, J, fixed={**fixed, vertex: 1})
			log_minus, _ = IsingService._enumerate(g, J, fixed={**fixed, vertex: -1})
			p_plus = expit(log_plus[0] - log_minus[0])
			fixed[vertex] = 1 if rng.random() < p_plus else -1
		sigma = np.ones(g.n)
		for vertex, value in fixed.items():
			sigma[vertex] = value
		return sigma
