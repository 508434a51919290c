from enum import Enum
from typing import Tuple, Union
import itertools
import logging
import math
import numpy as np
from scipy.special import logsumexp
from rklab.config import settings
from rklab.schemas.graph import WeightedGraph
from rklab.schemas.path import JumpPath, EndReason
from rklab.services.graph_service import GraphService
from rklab.services.mjp_service import MjpService
from rklab.services.ising_service import IsingService
from rklab.exceptions import InvalidParameterError, InvalidTimeError, TooManySpinsError
logger = logging.getLogger(__name__)


class NMethod(str, Enum):
	SUM = "sum"
	CLOSED = "closed"


class FunctionalService:
	"""
	Martingales and Radon-Nikodym densities evaluated along jump paths.

	Everything is assembled in the log domain with the sign kept apart. The
	numerator products run over j != X_0 and the denominator products over
	j != X_t; for paths from x0 this is the usual j != x0 form.
	"""
	@staticmethod
	def depletion_time(path: JumpPath, Phi) -> float:
		"""T = first time some l_i reaches Phi_i^2 / 2 along the path (inf if never)."""
		caps = 0.5 * np.asarray(Phi, dtype=float) ** 2
		if path.end_reason == EndReason.BUDGET_DEPLETED:
			end = path.end_position
			if path.end_local_times[end] == caps[end]:
				return path.end_time
		ell = np.zeros(len(caps))
		epochs = path.epochs
		for k, vertex in enumerate(path.positions):
			duration = epochs[k + 1] - epochs[k]
			if ell[vertex] + duration >= caps[vertex]:
				return float(epochs[k] + (caps[vertex] - ell[vertex]))
			ell[vertex] += duration
		return math.inf

	@staticmethod
	def _check_time(path: JumpPath, Phi: np.ndarray, t: float) -> None:
		if not 0.0 <= t <= path.end_time:
			raise InvalidTimeError(f"Time {t} outside [0, {path.end_time}]")
		T = FunctionalService.depletion_time(path, Phi)
		if t > T:
			raise InvalidTimeError(f"Time {t} is beyond the depletion time {T}")

	@staticmethod
	def _log_ratio(values_start: np.ndarray, values_now: np.ndarray, x_start: int, x_now: int) -> float:
		"""log(prod_{j != x_start} values_start_j / prod_{j != x_now} values_now_j)."""
		numerator = np.delete(values_start, x_start)
		denominator = np.delete(values_now, x_now)
		if np.any(denominator <= 0):
			raise InvalidTimeError("An amplitude away from the current position vanished")
		return float(np.sum(np.log(numerator)) - np.sum(np.log(denominator)))

	@staticmethod
	def log_abs_M(g: WeightedGraph, sigma, Phi, path: JumpPath, t: float) -> Tuple[float, float]:
		"""(sign, log|M_t|) for the sign configuration sigma."""
		sigma = GraphService.check_vector(g, sigma)
		if not np.all(np.abs(sigma) == 1.0):
			raise InvalidParameterError("Sign configuration entries must be +1 or -1")
		Phi = GraphService.check_positive(g, Phi, "Phi")
		FunctionalService._check_time(path, Phi, t)
		amps = MjpService.budget_amplitudes(path, Phi, t)
		x_now = MjpService.position_at(path, t)
		x_start = path.start
		log_value = (
			-0.5 * GraphService.dirichlet_energy(g, sigma * amps)
			+ FunctionalService._log_ratio(Phi, amps, x_start, x_now)
		)
		return float(sigma[x_start] * sigma[x_now]), log_value

	@staticmethod
	def eval_M(g: WeightedGraph, sigma, Phi, path: JumpPath, t: float) -> float:
		"""
		M_t = exp(-E(s Phi(t), s Phi(t)) / 2) prod_{j != X_0} s_j Phi_j / prod_{j != X_t} s_j Phi_j(t).
		"""
		sign, log_value = FunctionalService.log_abs_M(g, sigma, Phi, path, t)
		return sign * math.exp(log_value)

	@staticmethod
	def eval_N(g: WeightedGraph, Phi, path: JumpPath, t: float, method: Union[NMethod, str] = NMethod.CLOSED) -> float:
		"""
		N_t = sum over sign configurations (sigma_x0 = +1) of M_t.

		`sum` enumerates the configurations; `closed` evaluates
		exp(sum_i W_i (l_i - Phi_i^2 / 2)) F(t) <s_X0 s_Xt>_(t) times the amplitude
		ratio, with the Ising model J = W Phi(t) Phi(t).
		"""
		method = NMethod(method)
		Phi = GraphService.check_positive(g, Phi, "Phi")
		if g.n_free > settings.max_free_spins:
			raise TooManySpinsError(g.n_free, settings.max_free_spins)
		if method == NMethod.SUM:
			signs = []
			logs = []
			for free_signs in itertools.product((1.0, -1.0), repeat=g.n_free):
				sigma = np.ones(g.n)
				sigma[g.free_indices] = free_signs
				sign, log_value = FunctionalService.log_abs_M(g, sigma, Phi, path, t)
				signs.append(sign)
				logs.append(log_value)
			log_total, sign_total = logsumexp(logs, b=signs, return_sign=True)
			return float(sign_total * math.exp(log_total))

		FunctionalService._check_time(path, Phi, t)
		ell = MjpService.local_times(path, t)
		amps = MjpService.budget_amplitudes(path, Phi, t)
		x_now = MjpService.position_at(path, t)
		u, v = g.edge_pairs[:, 0], g.edge_pairs[:, 1]
		log_z, corr = IsingService.log_partition_and_correlation(
			g, g.edge_weights * amps[u] * amps[v], path.start, x_now
		)
		log_value = (
			float(np.sum(g.degree * (ell - 0.5 * Phi ** 2)))
			+ log_z
			+ FunctionalService._log_ratio(Phi, amps, path.start, x_now)
		)
		return corr * math.exp(log_value)

	@staticmethod
	def rn_vrjp(g: WeightedGraph, phi, path: JumpPath, t: float) -> float:
		"""
		Density of the time-changed VRJP with respect to the jump process on [0, t]:
		exp((E(sqrt(phi^2 + 2l)) - E(phi)) / 2) prod_{j != X_0} phi_j / prod_{j != X_t} sqrt(phi_j^2 + 2 l_j).
		"""
		phi = GraphService.check_positive(g, phi, "phi")
		if not 0.0 <= t <= path.end_time:
			raise InvalidTimeError(f"Time {t} outside [0, {path.end_time}]")
		ell = MjpService.local_times(path, t)
		grown = np.sqrt(phi ** 2 + 2.0 * ell)
		x_now = MjpService.position_at(path, t)
		log_value = (
			0.5 * (GraphService.dirichlet_energy(g, grown) - GraphService.dirichlet_energy(g, phi))
			+ FunctionalService._log_ratio(phi, grown, path.start, x_now)
		)
		return math.exp(log_value)

	@staticmethod
	def rn_reversed(g: WeightedGraph, Phi, path: JumpPath, t: float) -> float:
		"""
		Density of the reversed VRJP with respect to the jump process, evaluated at t ^ T:
		exp(-(E(Phi(s)) - E(Phi)) / 2) prod_{j != X_0} Phi_j / prod_{j != X_s} Phi_j(s).
		"""
		Phi = GraphService.check_positive(g, Phi, "Phi")
		if not 0.0 <= t <= path.end_time:
			raise InvalidTimeError(f"Time {t} outside [0, {path.end_time}]")
		s = min(t, FunctionalService.depletion_time(path, Phi))
		amps = MjpService.budget_amplitudes(path, Phi, s)
		x_now = MjpService.position_at(path, s)
		log_value = (
			-0.5 * (GraphService.dirichlet_energy(g, amps) - GraphService.dirichlet_energy(g, Phi))
			+ FunctionalService._log_ratio(Phi, amps, path.start, x_now)
		)
		return math.exp(log_value)

	@staticmethod
	def initial_N(g: WeightedGraph, Phi) -> float:
		"""N_0 = sum over sign configurations of exp(-E(sigma Phi, sigma Phi) / 2)."""
		Phi = GraphService.check_positive(g, Phi, "Phi")
		if g.n_free > settings.max_free_spins:
			raise TooManySpinsError(g.n_free, settings.max_free_spins)
		logs = []
		for free_signs in itertools.product((1.0, -1.0), repeat=g.n_free):
			sigma = np.ones(g.n)
			sigma[g.free_indices] = free_signs
			logs.append(-0.5 * GraphService.dirichlet_energy(g, sigma * Phi))
		return float(math.exp(logsumexp(logs)))
