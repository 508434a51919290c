from typing import Optional, Union, TextIO
from pathlib import Path
import logging
import math
import numpy as np
import pandas as pd
from rklab.schemas.graph import WeightedGraph, VertexId
from rklab.schemas.path import JumpPath, EndReason
from rklab.services.graph_service import GraphService
from rklab.exceptions import InvalidParameterError, InvalidTimeError
logger = logging.getLogger(__name__)


class MjpService:
	"""
	Markov jump process with rates W_ij and its local times.

	Random stream consumption per holding interval is frozen: one uniform U1
	gives the holding time -log(1 - U1) / W_i; only if the jump is realised, a
	second uniform U2 picks the target by inverse CDF over the neighbors in
	ascending index order. Stops truncate the final holding, never reject.
	"""
	@staticmethod
	def _run(
		g: WeightedGraph,
		start: int,
		rng: np.random.Generator,
		caps: Optional[np.ndarray] = None,
		cap_reason: EndReason = EndReason.HORIZON,
		horizon: float = math.inf,
		stop_at_x0: bool = False,
	) -> JumpPath:
		"""
		Core loop shared by every stopping rule.

		Args:
			caps: per-vertex local-time caps; the path stops when the current
				vertex's local time reaches its cap (inf = no cap)
			cap_reason: end reason reported when a cap stops the path
			horizon: absolute time limit
			stop_at_x0: stop on the first arrival at x0
		"""
		n = g.n
		if caps is None:
			caps = np.full(n, math.inf)
		ell = np.zeros(n)
		t = 0.0
		pos = start
		times = []
		targets = []
		cumweights = [np.cumsum(w) for w in g.neighbor_weights]

		if stop_at_x0 and pos == g.x0_index:
			return MjpService.make_path(start, times, targets, 0.0, EndReason.HIT_X0, ell)

		while True:
			rate = g.degree[pos]
			hold = -math.log1p(-rng.random()) / rate if rate > 0 else math.inf
			remaining = caps[pos] - ell[pos]
			to_horizon = horizon - t
			if hold >= min(remaining, to_horizon):
				if remaining <= to_horizon:
					t += remaining
					ell[pos] = caps[pos]
					return MjpService.make_path(start, times, targets, t, cap_reason, ell)
				ell[pos] += to_horizon
				return MjpService.make_path(start, times, targets, horizon, EndReason.HORIZON, ell)

			t += hold
			ell[pos] += hold
			cw = cumweights[pos]
			k = int(np.searchsorted(cw, rng.random() * cw[-1], side="right"))
			pos = int(g.neighbors[pos][min(k, len(cw) - 1)])
			times.append(t)
			targets.append(pos)
			if stop_at_x0 and pos == g.x0_index:
				return MjpService.make_path(start, times, targets, t, EndReason.HIT_X0, ell)

	@staticmethod
	def make_path(start, times, targets, end_time, reason, ell) -> JumpPath:
		return JumpPath(
			start=int(start),
			jump_times=np.array(times, dtype=float),
			jump_targets=np.array(targets, dtype=int),
			end_time=float(end_time),
			end_reason=reason,
			end_local_times=ell.copy(),
		)

	@staticmethod
	def simulate_until_tau(g: WeightedGraph, u: float, rng: np.random.Generator) -> JumpPath:
		"""Path from x0 stopped at tau_u, the first time l_x0 reaches u (exactly)."""
		if not (u > 0 and math.isfinite(u)):
			raise InvalidParameterError(f"Local-time level u must be positive and finite, got {u}")
		caps = np.full(g.n, math.inf)
		caps[g.x0_index] = u
		return MjpService._run(g, g.x0_index, rng, caps=caps, cap_reason=EndReason.INVERSE_LOCAL_TIME)

	@staticmethod
	def simulate_until_hit(g: WeightedGraph, z0: Union[int, VertexId], rng: np.random.Generator, by_index: bool = False) -> JumpPath:
		"""Path from z0 stopped at the first arrival at x0 (empty if z0 = x0)."""
		start = GraphService.resolve_vertex(g, z0, by_index)
		return MjpService._run(g, start, rng, stop_at_x0=True)

	@staticmethod
	def simulate_until_budget(
		g: WeightedGraph,
		start: Union[int, VertexId],
		Phi,
		rng: np.random.Generator,
		horizon: float = math.inf,
		by_index: bool = False,
	) -> JumpPath:
		"""
		Path stopped at T = first time some l_i reaches Phi_i^2 / 2, or at the
		horizon if that comes first.
		"""
		Phi = GraphService.check_positive(g, Phi, "Phi")
		start_index = GraphService.resolve_vertex(g, start, by_index)
		return MjpService._run(
			g, start_index, rng, caps=0.5 * Phi ** 2,
			cap_reason=EndReason.BUDGET_DEPLETED, horizon=horizon,
		)

	@staticmethod
	def simulate_until_horizon(g: WeightedGraph, start: Union[int, VertexId], t: float, rng: np.random.Generator, by_index: bool = False) -> JumpPath:
		"""Plain path on [0, t]."""
		if not (t > 0 and math.isfinite(t)):
			raise InvalidParameterError(f"Horizon must be positive and finite, got {t}")
		return MjpService._run(g, GraphService.resolve_vertex(g, start, by_index), rng, horizon=t)

	@staticmethod
	def local_times(path: JumpPath, t: float) -> np.ndarray:
		"""Occupation time of every vertex on [0, t]."""
		if not 0.0 <= t <= path.end_time:
			raise InvalidTimeError(f"Time {t} outside [0, {path.end_time}]")
		if t == path.end_time:
			return path.end_local_times.copy()
		epochs = path.epochs
		durations = np.clip(np.minimum(epochs[1:], t) - epochs[:-1], 0.0, None)
		ell = np.zeros(len(path.end_local_times))
		np.add.at(ell, path.positions, durations)
		return ell

	@staticmethod
	def position_at(path: JumpPath, t: float) -> int:
		"""X_t with the right-continuous convention."""
		if not 0.0 <= t <= path.end_time:
			raise InvalidTimeError(f"Time {t} outside [0, {path.end_time}]")
		return int(path.positions[MjpService.jump_count(path, t)])

	@staticmethod
	def jump_count(path: JumpPath, t: float) -> int:
		"""Number of jumps in [0, t]."""
		return int(np.searchsorted(path.jump_times, t, side="right"))

	@staticmethod
	def budget_amplitudes(path: JumpPath, Phi, t: float) -> np.ndarray:
		"""Phi(t) = sqrt(Phi^2 - 2 l(t)), clipped at 0 for a depleted vertex."""
		Phi = np.asarray(Phi, dtype=float)
		ell = MjpService.local_times(path, t)
		return np.sqrt(np.maximum(Phi ** 2 - 2.0 * ell, 0.0))

	@staticmethod
	def dump_path_csv(path: JumpPath, g: WeightedGraph, file: Union[str, Path, TextIO]) -> None:
		"""Write `time,vertex` rows: the start at time 0, then one row per jump."""
		frame = pd.DataFrame({
			"time": np.concatenate(([0.0], path.jump_times)),
			"vertex": [g.vertices[i] for i in path.positions],
		})
		frame.to_csv(file, index=False, float_format="%.17g")

