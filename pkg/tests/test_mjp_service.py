"""
Unit tests for MjpService.
"""
import io
import math
import numpy as np
import pandas as pd
import pytest
from rklab.schemas.path import EndReason
from rklab.services.mjp_service import MjpService
from rklab.exceptions import InvalidParameterError, InvalidTimeError


def two_jump_path():
	"""x0 on [0, 1), a on [1, 2.5), x0 on [2.5, 3]."""
	return MjpService.make_path(0, [1.0, 2.5], [1, 0], 3.0, EndReason.HORIZON, np.array([1.5, 1.5]))


class TestSimulateUntilTau:
	"""Test cases for MjpService.simulate_until_tau."""

	def test_exact_local_time_at_x0(self, unit_edge, rng):
		"""Test l_x0(tau_u) = u exactly and the path ends at x0."""
		for _ in range(200):
			path = MjpService.simulate_until_tau(unit_edge, 1.0, rng)
			assert path.end_local_times[0] == 1.0
			assert path.end_position == 0
			assert path.end_reason == EndReason.INVERSE_LOCAL_TIME

	def test_local_times_conserve_time(self, four_cycle, rng):
		"""Test sum of local times = end time."""
		path = MjpService.simulate_until_tau(four_cycle, 0.7, rng)
		assert path.end_local_times.sum() == pytest.approx(path.end_time, rel=1e-12)
		np.testing.assert_allclose(MjpService.local_times(path, path.end_time * (1 - 1e-15)), path.end_local_times, atol=1e-12)

	def test_triangle_mean_local_time(self, triangle, rng):
		"""Test E l_a(tau_1) = 1 on the triangle."""
		values = np.array([MjpService.simulate_until_tau(triangle, 1.0, rng).end_local_times[1] for _ in range(20000)])
		stderr = values.std(ddof=1) / math.sqrt(len(values))
		assert abs(values.mean() - 1.0) <= 4 * stderr

	@pytest.mark.parametrize("u", [0.0, -1.0, float("inf")])
	def test_bad_level(self, triangle, rng, u):
		"""Test that u must be positive and finite."""
		with pytest.raises(InvalidParameterError):
			MjpService.simulate_until_tau(triangle, u, rng)


class TestSimulateUntilHit:
	"""Test cases for MjpService.simulate_until_hit."""

	def test_start_at_x0(self, triangle, rng):
		"""Test the empty path when z0 = x0."""
		path = MjpService.simulate_until_hit(triangle, "x0", rng)
		assert path.n_jumps == 0
		assert path.end_time == 0.0
		assert path.end_reason == EndReason.HIT_X0

	def test_no_time_at_x0(self, triangle, rng):
		"""Test l_x0(H_x0) = 0 from z0 = a."""
		for _ in range(200):
			path = MjpService.simulate_until_hit(triangle, "a", rng)
			assert path.end_local_times[0] == 0.0
			assert path.end_position == 0

	def test_single_edge_exponential(self, single_edge, rng):
		"""Test that H_x0 from a is Exp(2)."""
		values = np.array([MjpService.simulate_until_hit(single_edge, "a", rng).end_time for _ in range(20000)])
		stderr = values.std(ddof=1) / math.sqrt(len(values))
		assert abs(values.mean() - 0.5) <= 4 * stderr


class TestSimulateUntilBudget:
	"""Test cases for MjpService.simulate_until_budget."""

	def test_depleted_vertex_exact(self, four_cycle, rng):
		"""Test l_X_T(T) = Phi_X_T^2 / 2 exactly."""
		Phi = np.array([1.2, 0.9, 1.1, 0.8])
		for _ in range(200):
			path = MjpService.simulate_until_budget(four_cycle, "x0", Phi, rng)
			end = path.end_position
			assert path.end_reason == EndReason.BUDGET_DEPLETED
			assert path.end_local_times[end] == 0.5 * Phi[end] ** 2
			assert np.all(path.end_local_times <= 0.5 * Phi ** 2)

	def test_long_first_holding(self, unit_edge, rng):
		"""Test T = 1 at x0 when the first holding exceeds Phi_x0^2 / 2 = 1."""
		Phi = np.array([math.sqrt(2.0), 1e6])
		seen = 0
		for _ in range(300):
			path = MjpService.simulate_until_budget(unit_edge, "x0", Phi, rng)
			if path.n_jumps == 0:
				seen += 1
				assert path.end_time == pytest.approx(1.0, rel=1e-15)
				assert path.end_position == 0
		assert seen > 0

	def test_horizon_first(self, triangle, rng):
		"""Test that a short horizon stops the path before depletion."""
		path = MjpService.simulate_until_budget(triangle, "x0", [5.0, 5.0, 5.0], rng, horizon=0.3)
		assert path.end_reason == EndReason.HORIZON
		assert path.end_time == 0.3

	def test_amplitudes_at_zero(self, triangle, rng):
		"""Test Phi(0) = Phi."""
		Phi = np.array([1.5, 2.0, 0.5])
		path = MjpService.simulate_until_budget(triangle, "x0", Phi, rng)
		np.testing.assert_array_equal(MjpService.budget_amplitudes(path, Phi, 0.0), Phi)
		assert MjpService.budget_amplitudes(path, Phi, path.end_time)[path.end_position] == 0.0

	def test_requires_positive_budget(self, triangle, rng):
		"""Test that Phi must be positive."""
		with pytest.raises(InvalidParameterError):
			MjpService.simulate_until_budget(triangle, "x0", [1.0, 0.0, 1.0], rng)


class TestSimulateUntilHorizon:
	"""Test cases for MjpService.simulate_until_horizon."""

	def test_holding_times_exponential(self, triangle, rng):
		"""Test that the first holding at x0 is Exp(W_x0) = Exp(2)."""
		holds = []
		for _ in range(20000):
			path = MjpService.simulate_until_horizon(triangle, "x0", 50.0, rng)
			holds.append(path.jump_times[0])
		holds = np.array(holds)
		stderr = holds.std(ddof=1) / math.sqrt(len(holds))
		assert abs(holds.mean() - 0.5) <= 4 * stderr

	def test_rng_consumption(self, single_edge, make_rng):
		"""Test one uniform per holding plus one per realised jump."""
		path = MjpService.simulate_until_horizon(single_edge, "x0", 2.0, make_rng(5))
		replay = make_rng(5)
		for _ in range(2 * path.n_jumps + 1):
			replay.random()
		original = make_rng(5)
		MjpService.simulate_until_horizon(single_edge, "x0", 2.0, original)
		assert original.random() == replay.random()


class TestPathQueries:
	"""Test cases for local_times, position_at and jump_count."""

	def test_zero(self):
		"""Test that nothing has accrued at t = 0."""
		np.testing.assert_array_equal(MjpService.local_times(two_jump_path(), 0.0), [0.0, 0.0])

	def test_single_jump(self):
		"""Test l_x0 = 1, l_a = 0.5 at t = 1.5."""
		np.testing.assert_array_equal(MjpService.local_times(two_jump_path(), 1.5), [1.0, 0.5])

	def test_conservation(self):
		"""Test that the local times sum to t."""
		for t in (0.2, 1.0, 2.5, 2.9):
			assert MjpService.local_times(two_jump_path(), t).sum() == pytest.approx(t, rel=1e-15)

	def test_right_continuous(self):
		"""Test that X_t at a jump time is the new vertex."""
		path = two_jump_path()
		assert MjpService.position_at(path, 0.999) == 0
		assert MjpService.position_at(path, 1.0) == 1
		assert MjpService.position_at(path, 2.5) == 0
		assert MjpService.jump_count(path, 2.5) == 2

	def test_outside_path(self):
		"""Test that times beyond the end are rejected."""
		with pytest.raises(InvalidTimeError):
			MjpService.local_times(two_jump_path(), 3.5)


class TestDumpPath:
	"""Test cases for MjpService.dump_path_csv."""

	def test_rows(self, single_edge):
		"""Test one start row plus one row per jump."""
		buffer = io.StringIO()
		MjpService.dump_path_csv(two_jump_path(), single_edge, buffer)
		buffer.seek(0)
		frame = pd.read_csv(buffer)
		assert list(frame.columns) == ["time", "vertex"]
		assert frame["time"].tolist() == [0.0, 1.0, 2.5]
		assert frame["vertex"].tolist() == ["x0", "a", "x0"]
