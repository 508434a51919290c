from typing import Callable, Optional, TextIO, Union
from pathlib import Path
import logging
import math
import numpy as np
import pandas as pd
from scipy import optimize
from scipy.integrate import solve_ivp
from rklab.config import settings
from rklab.schemas.graph import WeightedGraph, VertexId
from rklab.schemas.path import JumpPath, EndReason, EndKind, StopRule, ReversedRun
from rklab.services.graph_service import GraphService
from rklab.services.mjp_service import MjpService
from rklab.services.ising_service import IsingService
from rklab.exceptions import (
	ConfigError,
	InvalidParameterError,
	HazardIntegrationError,
	MagnetizationUnderflowError,
)
logger = logging.getLogger(__name__)

# Integrator step in log-distance to the cap: the remaining budget shrinks by at most 1/8 per step
DEPLETION_MAX_STEP = math.log(8.0 / 7.0)
ROOT_MAX_ITER = 200

END_REASONS = {
	EndKind.DEPLETED: EndReason.BUDGET_DEPLETED,
	EndKind.HIT_X0: EndReason.HIT_X0,
	EndKind.HORIZON: EndReason.HORIZON,
}


class _RunRecorder:
	"""Accumulates jumps and the other-clock bookkeeping of a reversed run."""
	def __init__(self, Phi: np.ndarray):
		self.Phi = Phi
		self.times = []
		self.targets = []
		self.y_times = []
		self.amplitudes = []
		self.y_local = np.zeros(len(Phi))

	def hold(self, site: int, before: float, after: float) -> None:
		self.y_local[site] += before - after

	def jump(self, t: float, target: int) -> None:
		self.times.append(t)
		self.targets.append(target)
		self.y_times.append(float(self.y_local.sum()))
		self.amplitudes.append(self.Phi - self.y_local)

	def finish(self, start, end_time, kind, ell, amps, site) -> ReversedRun:
		path = JumpPath(
			start=int(start),
			jump_times=np.array(self.times, dtype=float),
			jump_targets=np.array(self.targets, dtype=int),
			end_time=float(end_time),
			end_reason=END_REASONS[kind],
			end_local_times=ell.copy(),
		)
		return ReversedRun(
			z_path=path,
			L_end=amps.copy(),
			end_site=int(site),
			end_kind=kind,
			y_end_time=float(self.y_local.sum()),
			y_times=np.array(self.y_times, dtype=float),
			jump_amplitudes=np.array(self.amplitudes, dtype=float).reshape(-1, len(self.Phi)),
			Phi=self.Phi.copy(),
		)


class ReinforcedService:
	"""
	Vertex-reinforced jump processes on the time-changed clock.

	Z: forward VRJP, rates W_ij sqrt((phi_j^2 + 2 l_j) / (phi_i^2 + 2 l_i)).
	Z~: reversed VRJP, rates W_ij A_j / A_i with A = sqrt(Phi^2 - 2 l), stopped
	at the first depleted budget.
	Z^: magnetized reversed process, rates W_ij (A_j / A_i) (<s_j> / <s_i>)
	with the Ising model J_ij = W_ij A_i A_j and boundary s_x0 = +1.

	Only the current site's local time moves during a holding, so Z and Z~
	have closed-form cumulative hazards and are sampled by exact inversion.
	Z^ inverts its hazard through the potential log(F <s_i>) with a root
	solve, or by RK45 integration when RKLAB_HAZARD_INVERSION=integrate. Each holding consumes one uniform
	for the Exp(1) level and, if a jump happens, one uniform for the target.
	"""
	@staticmethod
	def next_jump_time(
		total_hazard: Callable[[float, float], float],
		cap: float,
		rng: np.random.Generator,
		stop_gap: float = 0.0,
	) -> Optional[float]:
		"""
		Sample a holding time from a time-varying hazard on [0, cap).

		Draws E ~ Exp(1) and returns h with int_0^h hazard = E, or None (the
		depletion signal) when the cumulative hazard stays below E.

		Args:
			total_hazard: called as total_hazard(h, cap - h); the second argument
				is the remaining budget computed without cancellation
			cap: remaining budget at the current site
			stop_gap: when positive, `cap` is a depletion cap at which the hazard
				may blow up; the integration runs in w = -log(1 - h / cap) with a
				constant step bound of log(8/7) and stops at cap - stop_gap

		Raises:
			HazardIntegrationError: non-finite hazard, integrator failure or step budget exhausted
		"""
		if not (cap > 0 and math.isfinite(cap)):
			raise InvalidParameterError(f"Holding cap must be positive and finite, got {cap}")
		level = -math.log1p(-rng.random())
		if level == 0.0:
			return 0.0

		evaluations = 0

		def hazard(h: float, remaining: float) -> float:
			nonlocal evaluations
			evaluations += 1
			if evaluations > settings.hazard_max_steps:
				raise HazardIntegrationError(f"Hazard integration exceeded {settings.hazard_max_steps} evaluations")
			value = total_hazard(h, remaining)
			if not math.isfinite(value) or value < 0:
				raise HazardIntegrationError(f"Hazard evaluated to {value} at h={h}")
			return value

		if stop_gap > 0:
			end = math.log(cap / stop_gap)
			if end <= 0:
				return None

			def rhs(w, y):
				remaining = cap * math.exp(-w)
				return [hazard(cap - remaining, remaining) * remaining]

			def to_time(w: float) -> float:
				return -cap * math.expm1(-w)

			max_step = DEPLETION_MAX_STEP
		else:
			end = cap

			def rhs(h, y):
				return [hazard(h, cap - h)]

			def to_time(h: float) -> float:
				return h

			max_step = cap / 8.0

		def crossed(x, y):
			return y[0] - level
		crossed.terminal = True
		crossed.direction = 1.0

		sol = solve_ivp(
			rhs, (0.0, end), [0.0], method="RK45",
			rtol=settings.hazard_rtol, atol=settings.hazard_rtol * 1e-3,
			max_step=max_step, events=crossed,
		)
		if sol.status == -1:
			raise HazardIntegrationError(f"Hazard integration failed: {sol.message}")
		if sol.status == 1 and len(sol.t_events[0]):
			return min(to_time(float(sol.t_events[0][0])), cap)
		return None

	@staticmethod
	def invert_hazard_potential(
		potential: Callable[[float], float],
		a_start: float,
		a_end: float,
		rng: np.random.Generator,
	) -> Optional[float]:
		"""
		Sample a holding time from a cumulative hazard given as a potential drop.

		The site amplitude falls from a_start towards a_end as sqrt(a_start^2 - 2h),
		and the cumulative hazard up to amplitude a is potential(a_start) - potential(a).
		Draws E ~ Exp(1) exactly like next_jump_time, solves the drop = E for the
		amplitude with brentq and returns the matching h, or None when the drop
		down to a_end stays below E.

		Raises:
			HazardIntegrationError: non-finite potential or root solve not converged
		"""
		if not (0.0 <= a_end and math.isfinite(a_start)):
			raise InvalidParameterError(f"Amplitude bracket [{a_end}, {a_start}] is invalid")
		level = -math.log1p(-rng.random())
		if level == 0.0:
			return 0.0
		if a_start <= a_end:
			return None

		def evaluate(a: float) -> float:
			value = potential(a)
			if not math.isfinite(value):
				raise HazardIntegrationError(f"Hazard potential evaluated to {value} at amplitude {a}")
			return value

		top = evaluate(a_start)
		if top - evaluate(a_end) < level:
			return None
		try:
			root = optimize.brentq(
				lambda a: top - evaluate(a) - level, a_end, a_start,
				xtol=1e-300, rtol=max(settings.hazard_rtol * 1e-4, 4.0 * np.finfo(float).eps),
				maxiter=ROOT_MAX_ITER,
			)
		except RuntimeError as e:
			raise HazardIntegrationError(f"Hazard root solve failed: {e}")
		return 0.5 * (a_start - root) * (a_start + root)

	@staticmethod
	def simulate_vrjp_timechanged(
		g: WeightedGraph,
		phi0,
		start: Union[int, VertexId],
		horizon: float,
		rng: np.random.Generator,
		by_index: bool = False,
	) -> JumpPath:
		"""Z on [0, horizon] from `start` with initial amplitudes phi0 > 0."""
		phi0 = GraphService.check_positive(g, phi0, "phi0")
		if not (horizon > 0 and math.isfinite(horizon)):
			raise InvalidParameterError(f"Horizon must be positive and finite, got {horizon}")
		pos = GraphService.resolve_vertex(g, start, by_index)
		start_index = pos
		a = phi0 ** 2
		ell = np.zeros(g.n)
		t = 0.0
		times, targets = [], []

		while True:
			nbrs = g.neighbors[pos]
			weights = g.neighbor_weights[pos] * np.sqrt(a[nbrs])
			c = float(weights.sum())
			level = -math.log1p(-rng.random())
			if c > 0:
				hold = math.sqrt(a[pos]) * level / c + level * level / (2.0 * c * c)
			else:
				hold = math.inf
			if t + hold >= horizon:
				ell[pos] += horizon - t
				return MjpService.make_path(start_index, times, targets, horizon, EndReason.HORIZON, ell)
			t += hold
			ell[pos] += hold
			a[pos] = phi0[pos] ** 2 + 2.0 * ell[pos]
			pos = ReinforcedService._pick(nbrs, weights, rng)
			times.append(t)
			targets.append(pos)

	@staticmethod
	def simulate_reversed_vrjp(
		g: WeightedGraph,
		Phi,
		start: Union[int, VertexId],
		rng: np.random.Generator,
		horizon: float = math.inf,
		by_index: bool = False,
	) -> ReversedRun:
		"""Z~ from `start`, stopped at the first depleted budget or at the horizon."""
		Phi = GraphService.check_positive(g, Phi, "Phi")
		pos = GraphService.resolve_vertex(g, start, by_index)
		start_index = pos
		ell = np.zeros(g.n)
		amps = Phi.copy()
		t = 0.0
		record = _RunRecorder(Phi)

		while True:
			b = Phi[pos] ** 2 - 2.0 * ell[pos]
			nbrs = g.neighbors[pos]
			weights = g.neighbor_weights[pos] * amps[nbrs]
			c = float(weights.sum())
			level = -math.log1p(-rng.random())
			sqrt_b = math.sqrt(max(b, 0.0))
			if c > 0 and level < c * sqrt_b:
				hold = sqrt_b * level / c - level * level / (2.0 * c * c)
			else:
				hold = None
			to_horizon = horizon - t
			if min(hold if hold is not None else math.inf, 0.5 * b) >= to_horizon:
				ell[pos] += to_horizon
				before = amps[pos]
				amps[pos] = math.sqrt(max(Phi[pos] ** 2 - 2.0 * ell[pos], 0.0))
				record.hold(pos, before, amps[pos])
				return record.finish(start_index, horizon, EndKind.HORIZON, ell, amps, pos)
			if hold is None:
				t += 0.5 * b
				ell[pos] = 0.5 * Phi[pos] ** 2
				record.hold(pos, amps[pos], 0.0)
				amps[pos] = 0.0
				return record.finish(start_index, t, EndKind.DEPLETED, ell, amps, pos)
			t += hold
			ell[pos] += hold
			before = amps[pos]
			amps[pos] = math.sqrt(max(Phi[pos] ** 2 - 2.0 * ell[pos], 0.0))
			record.hold(pos, before, amps[pos])
			pos = ReinforcedService._pick(nbrs, weights, rng)
			record.jump(t, pos)

	@staticmethod
	def simulate_magnetized_reversed(
		g: WeightedGraph,
		Phi,
		start: Union[int, VertexId],
		stop: Union[StopRule, str],
		rng: np.random.Generator,
		horizon: float = math.inf,
		by_index: bool = False,
	) -> ReversedRun:
		"""
		Z^ from `start`, stopped at depletion or at the first arrival at x0.

		A site counts as depleted once its amplitude falls to
		RKLAB_DEPLETION_TOLERANCE * Phi_i; its local time is then set to the
		full budget so that L_end is exactly 0 there. Depletion away from x0 is
		returned, not raised.

		Raises:
			MagnetizationUnderflowError: <s_i> at the current site is not positive
			HazardIntegrationError: see invert_hazard_potential and next_jump_time
		"""
		Phi = GraphService.check_positive(g, Phi, "Phi")
		stop = StopRule(stop)
		pos = GraphService.resolve_vertex(g, start, by_index)
		if stop == StopRule.HIT_X0 and pos == g.x0_index:
			raise InvalidParameterError("Hitting-time stop requires a start vertex other than x0")
		start_index = pos
		ell = np.zeros(g.n)
		amps = Phi.copy()
		t = 0.0
		record = _RunRecorder(Phi)

		while True:
			i = pos
			b = Phi[i] ** 2 - 2.0 * ell[i]
			to_horizon = horizon - t
			smooth = to_horizon < 0.5 * b
			if smooth:
				cap, floor = to_horizon, math.sqrt(max(b - 2.0 * to_horizon, 0.0))
			else:
				cap, floor = 0.5 * b, settings.depletion_tolerance * Phi[i]
			hold = ReinforcedService._magnetized_hold(g, amps, i, cap, floor, smooth, rng) if cap > 0 else None

			if hold is None:
				before = amps[i]
				if smooth:
					ell[i] += cap
					amps[i] = math.sqrt(max(Phi[i] ** 2 - 2.0 * ell[i], 0.0))
					record.hold(i, before, amps[i])
					return record.finish(start_index, horizon, EndKind.HORIZON, ell, amps, i)
				t += cap
				ell[i] = 0.5 * Phi[i] ** 2
				amps[i] = 0.0
				record.hold(i, before, 0.0)
				if i != g.x0_index:
					logger.debug(f"Magnetized run depleted away from x0 at vertex {g.vertices[i]}")
				return record.finish(start_index, t, EndKind.DEPLETED, ell, amps, i)

			t += hold
			ell[i] += hold
			before = amps[i]
			amps[i] = math.sqrt(max(Phi[i] ** 2 - 2.0 * ell[i], 0.0))
			record.hold(i, before, amps[i])
			rates = ReinforcedService.magnetized_rates_from_amplitudes(g, amps, i)
			nbrs = g.neighbors[i]
			pos = ReinforcedService._pick(nbrs, rates[nbrs], rng)
			record.jump(t, pos)
			if stop == StopRule.HIT_X0 and pos == g.x0_index:
				return record.finish(start_index, t, EndKind.HIT_X0, ell, amps, pos)

	@staticmethod
	def _magnetized_hold(
		g: WeightedGraph,
		amps: np.ndarray,
		i: int,
		cap: float,
		floor: float,
		smooth: bool,
		rng: np.random.Generator,
	) -> Optional[float]:
		"""One Z^ holding at i, the amplitude falling from amps[i] to `floor` over `cap`; None when it outlasts cap."""
		a_start = float(amps[i])
		method = settings.hazard_inversion
		if method == "potential":
			def potential(a: float) -> float:
				state = amps.copy()
				state[i] = a
				return ReinforcedService._log_potential(g, state, i)
			return ReinforcedService.invert_hazard_potential(potential, a_start, floor, rng)
		if method == "integrate":
			def hazard(h: float, remaining: float) -> float:
				state = amps.copy()
				state[i] = math.sqrt(max(a_start ** 2 - 2.0 * h, 0.0)) if smooth else math.sqrt(2.0 * remaining)
				return ReinforcedService._total_rate(g, state, i)
			gap = 0.0 if smooth else 0.5 * floor ** 2
			return ReinforcedService.next_jump_time(hazard, cap, rng, stop_gap=gap)
		raise ConfigError(f"RKLAB_HAZARD_INVERSION must be 'potential' or 'integrate', got {method!r}")

	@staticmethod
	def _log_potential(g: WeightedGraph, amps: np.ndarray, i: int) -> float:
		u, v = g.edge_pairs[:, 0], g.edge_pairs[:, 1]
		log_z, mag = IsingService.log_partition_and_correlation(
			g, g.edge_weights * amps[u] * amps[v], i, g.x0_index
		)
		if not mag > 0:
			raise MagnetizationUnderflowError(f"Magnetization at vertex {g.vertices[i]} is {mag} before depletion")
		return log_z + math.log(mag)

	@staticmethod
	def _site_magnetizations(g: WeightedGraph, amps: np.ndarray, i: int) -> np.ndarray:
		u, v = g.edge_pairs[:, 0], g.edge_pairs[:, 1]
		mags = IsingService.batch_magnetizations(g, (g.edge_weights * amps[u] * amps[v])[None, :])[0]
		if not mags[i] > 0:
			raise MagnetizationUnderflowError(
				f"Magnetization at vertex {g.vertices[i]} is {mags[i]} before depletion"
			)
		return mags

	@staticmethod
	def _total_rate(g: WeightedGraph, amps: np.ndarray, i: int) -> float:
		mags = ReinforcedService._site_magnetizations(g, amps, i)
		nbrs = g.neighbors[i]
		return float(np.sum(g.neighbor_weights[i] * amps[nbrs] * mags[nbrs]) / (amps[i] * mags[i]))

	@staticmethod
	def magnetized_rates_from_amplitudes(g: WeightedGraph, amps: np.ndarray, i: int) -> np.ndarray:
		"""Per-vertex jump rates out of i given the amplitude vector (0 off the neighborhood)."""
		mags = ReinforcedService._site_magnetizations(g, amps, i)
		rates = np.zeros(g.n)
		nbrs = g.neighbors[i]
		rates[nbrs] = g.neighbor_weights[i] * amps[nbrs] * mags[nbrs] / (amps[i] * mags[i])
		return rates

	@staticmethod
	def magnetized_rates(g: WeightedGraph, Phi, ell, i: int) -> np.ndarray:
		"""Z^ rates out of vertex index i at local times ell."""
		amps = ReinforcedService.amplitudes(g, Phi, ell)
		return ReinforcedService.magnetized_rates_from_amplitudes(g, amps, i)

	@staticmethod
	def log_hazard_potential(g: WeightedGraph, Phi, ell, i: int) -> float:
		"""
		log(F <s_i>) at the given state.

		Along a holding at i its decrease equals the cumulative Z^ hazard.
		"""
		return ReinforcedService._log_potential(g, ReinforcedService.amplitudes(g, Phi, ell), i)

	@staticmethod
	def amplitudes(g: WeightedGraph, Phi, ell) -> np.ndarray:
		"""sqrt(Phi^2 - 2 l), clipped at 0."""
		Phi = GraphService.check_positive(g, Phi, "Phi")
		ell = np.asarray(ell, dtype=float)
		return np.sqrt(np.maximum(Phi ** 2 - 2.0 * ell, 0.0))

	@staticmethod
	def time_change_inverse(path: JumpPath, phi0, t: float, reversed_clock: bool = False) -> float:
		"""
		Other-clock time at t.

		Forward: sum_i (sqrt(phi_i^2 + 2 l_i(t)) - phi_i).
		Reversed: sum_i (Phi_i - sqrt(Phi_i^2 - 2 l_i(t))).
		"""
		phi0 = np.asarray(phi0, dtype=float)
		ell = MjpService.local_times(path, t)
		if reversed_clock:
			return float(np.sum(phi0 - np.sqrt(np.maximum(phi0 ** 2 - 2.0 * ell, 0.0))))
		return float(np.sum(np.sqrt(phi0 ** 2 + 2.0 * ell) - phi0))

	@staticmethod
	def dump_run_csv(run: ReversedRun, g: WeightedGraph, file: Union[str, Path, TextIO]) -> None:
		"""
		Write `z_time,y_time,vertex,L_<id>...`: the start, every jump epoch and the end.
		"""
		path = run.z_path
		Phi = run.Phi if run.Phi is not None else run.L_end
		frame = pd.DataFrame({
			"z_time": np.concatenate(([0.0], path.jump_times, [path.end_time])),
			"y_time": np.concatenate(([0.0], run.y_times, [run.y_end_time])),
			"vertex": [g.vertices[i] for i in path.positions] + [g.vertices[path.end_position]],
		})
		amplitudes = np.vstack([Phi[None, :], run.jump_amplitudes, run.L_end[None, :]])
		for k, vertex in enumerate(g.vertices):
			frame[f"L_{vertex}"] = amplitudes[:, k]
		frame.to_csv(file, index=False, float_format="%.17g")

	@staticmethod
	def _pick(nbrs: np.ndarray, weights: np.ndarray, rng: np.random.Generator) -> int:
		cumulative = np.cumsum(weights)
		k = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
		return int(nbrs[min(k, len(nbrs) - 1)])
