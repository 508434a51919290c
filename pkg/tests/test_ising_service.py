"""
Unit tests for IsingService and IsingSpec.
"""
import itertools
import math
import numpy as np
import pytest
from rklab.schemas.ising import IsingSpec
from rklab.services.ising_service import IsingService, _edge_block
from rklab.utils.stats import chi_square_pvalue
from rklab.exceptions import IndexMismatchError, NegativeCouplingError, TooManySpinsError


class TestIsingSpec:
	"""Test cases for IsingSpec construction."""

	def test_from_amplitudes(self, triangle):
		"""Test J_ij = W_ij L_i L_j in edge order."""
		spec = IsingSpec.from_amplitudes(triangle, [1.0, 2.0, 3.0])
		np.testing.assert_array_equal(spec.couplings, [2.0, 6.0, 3.0])

	def test_negative_coupling(self, triangle):
		"""Test that antiferromagnetic couplings are rejected."""
		with pytest.raises(NegativeCouplingError):
			IsingSpec(graph=triangle, couplings=np.array([1.0, -0.5, 1.0]))

	def test_wrong_length(self, triangle):
		"""Test that one coupling per edge is required."""
		with pytest.raises(IndexMismatchError):
			IsingSpec(graph=triangle, couplings=np.array([1.0, 1.0]))


class TestPartitionFunction:
	"""Test cases for IsingService.partition_function and log_partition."""

	def test_free_spins_count(self, four_cycle):
		"""Test F = 2^|U| at J = 0."""
		assert IsingService.partition_function(IsingSpec.from_beta(four_cycle, 0.0)) == pytest.approx(8.0, rel=1e-15)

	def test_two_spin(self, unit_edge):
		"""Test F = 2 cosh(1) on one edge with J = 1."""
		value = IsingService.partition_function(IsingSpec.from_beta(unit_edge, 1.0))
		assert value == pytest.approx(3.0861612696304874, rel=1e-12)

	@pytest.mark.parametrize("J", [0.1, 1.0, 5.0])
	def test_two_spin_closed_forms(self, unit_edge, J):
		"""Test 2 cosh(J) and tanh(J) on one edge."""
		spec = IsingSpec.from_beta(unit_edge, J)
		assert IsingService.partition_function(spec) == pytest.approx(2.0 * math.cosh(J), rel=1e-12)
		assert IsingService.magnetizations(spec)[1] == pytest.approx(math.tanh(J), abs=1e-12)

	def test_triangle_brute_force(self, triangle):
		"""Test the four-term sum exp(s_a + s_b + s_a s_b)."""
		expected = sum(math.exp(a + b + a * b) for a, b in itertools.product((1, -1), repeat=2))
		assert IsingService.partition_function(IsingSpec.from_beta(triangle, 1.0)) == pytest.approx(expected, rel=1e-13)

	def test_chunking_invariant(self, four_cycle, mocker):
		"""Test that the chunk size does not change the result."""
		spec = IsingSpec.from_amplitudes(four_cycle, [1.3, 0.7, 1.1, 0.4])
		whole = IsingService.log_partition(spec)
		mags = IsingService.magnetizations(spec)
		mocker.patch("rklab.services.ising_service.settings.enumeration_chunk_bits", 1)
		assert IsingService.log_partition(spec) == pytest.approx(whole, rel=1e-14)
		np.testing.assert_allclose(IsingService.magnetizations(spec), mags, rtol=1e-13)

	def test_edge_products_cached(self, four_cycle):
		"""Test that repeated enumerations on one graph reuse the read-only spin-edge block."""
		spec = IsingSpec.from_amplitudes(four_cycle, [1.3, 0.7, 1.1, 0.4])
		IsingService.log_partition(spec)
		hits = _edge_block.cache_info().hits
		IsingService.magnetizations(spec)
		assert _edge_block.cache_info().hits == hits + 1
		block = _edge_block(4, (1, 2, 3), ((0, 1),), 0, 8, tuple(map(tuple, four_cycle.edge_pairs.tolist())))
		assert block.shape == (8, len(four_cycle.edge_weights))
		assert not block.flags.writeable

	def test_too_many_spins(self, four_cycle, mocker):
		"""Test the free-spin guard."""
		mocker.patch("rklab.services.ising_service.settings.max_free_spins", 2)
		with pytest.raises(TooManySpinsError):
			IsingService.log_partition(IsingSpec.from_beta(four_cycle, 1.0))


class TestMagnetizations:
	"""Test cases for IsingService.magnetizations."""

	def test_zero_coupling(self, four_cycle):
		"""Test <s_x> = 0 off x0 and 1 at x0 when J = 0."""
		np.testing.assert_allclose(IsingService.magnetizations(IsingSpec.from_beta(four_cycle, 0.0)), [1.0, 0.0, 0.0, 0.0], atol=1e-15)

	def test_chain(self, chain):
		"""Test <s_b> = tanh(1)^2 on x0 - a - b."""
		mags = IsingService.magnetizations(IsingSpec.from_beta(chain, 1.0))
		assert mags[2] == pytest.approx(math.tanh(1.0) ** 2, rel=1e-12)
		assert mags[1] == pytest.approx(math.tanh(1.0), rel=1e-12)

	def test_griffiths_positivity(self, four_cycle):
		"""Test nonnegative magnetizations for ferromagnetic couplings."""
		for beta in (0.05, 0.5, 2.0):
			assert np.all(IsingService.magnetizations(IsingSpec.from_beta(four_cycle, beta)) >= 0.0)

	def test_field_derivative(self, triangle):
		"""Test <s_x> = d log F / d h_x by central differences."""
		spec = IsingSpec.from_amplitudes(triangle, [1.1, 0.6, 0.9])
		mags = IsingService.magnetizations(spec)
		step = 1e-5
		for vertex in triangle.free_indices:
			field = np.zeros(triangle.n)
			field[vertex] = step
			numeric = (IsingService.log_partition(spec, field) - IsingService.log_partition(spec, -field)) / (2 * step)
			assert numeric == pytest.approx(mags[vertex], rel=1e-6)

	def test_batch_matches_single(self, four_cycle):
		"""Test batched magnetizations row by row."""
		J = np.array([[0.2, 0.4, 0.1, 0.9, 0.3], [1.0, 0.0, 2.0, 0.5, 0.5]])
		batch = IsingService.batch_magnetizations(four_cycle, J)
		for row, couplings in zip(batch, J):
			np.testing.assert_allclose(row, IsingService.magnetizations(IsingSpec(graph=four_cycle, couplings=couplings)), rtol=1e-13, atol=1e-14)

	def test_pair_correlation_with_x0(self, triangle):
		"""Test <s_i s_x0> = <s_i>."""
		spec = IsingSpec.from_amplitudes(triangle, [1.1, 0.6, 0.9])
		assert IsingService.pair_correlation(spec, 1, 0) == pytest.approx(IsingService.magnetizations(spec)[1], rel=1e-14)


class TestSampleSpins:
	"""Test cases for IsingService.sample_spins."""

	def test_boundary(self, four_cycle, rng):
		"""Test s_x0 = +1 on every draw."""
		spec = IsingSpec.from_beta(four_cycle, 0.7)
		for _ in range(100):
			assert IsingService.sample_spins(spec, rng)[0] == 1.0

	def test_free_spins_fair(self, triangle, rng):
		"""Test each free spin is +1 with probability 1/2 at J = 0."""
		spec = IsingSpec.from_beta(triangle, 0.0)
		draws = np.array([IsingService.sample_spins(spec, rng) for _ in range(10000)])
		for vertex in (1, 2):
			frequency = np.mean(draws[:, vertex] == 1.0)
			assert abs(frequency - 0.5) <= 4 * math.sqrt(0.25 / len(draws))

	def test_single_edge_mean(self, unit_edge, rng):
		"""Test E s_a = tanh(1)."""
		spec = IsingSpec.from_beta(unit_edge, 1.0)
		draws = np.array([IsingService.sample_spins(spec, rng)[1] for _ in range(10000)])
		stderr = draws.std(ddof=1) / math.sqrt(len(draws))
		assert abs(draws.mean() - math.tanh(1.0)) <= 4 * stderr

	def test_configuration_law(self, triangle, rng):
		"""Test the joint law of (s_a, s_b) against enumerated Gibbs weights."""
		spec = IsingSpec.from_amplitudes(triangle, [1.0, 0.8, 0.5])
		J = spec.couplings
		configs = list(itertools.product((1.0, -1.0), repeat=2))
		weights = []
		for a, b in configs:
			sigma = np.array([1.0, a, b])
			weights.append(math.exp(sum(J[k] * sigma[u] * sigma[v] for k, (u, v) in enumerate(triangle.edge_pairs))))
		probabilities = np.array(weights) / sum(weights)
		draws = [tuple(IsingService.sample_spins(spec, rng)[1:]) for _ in range(8000)]
		counts = [sum(1 for d in draws if d == config) for config in configs]
		assert chi_square_pvalue(counts, probabilities) >= 0.001

	def test_deterministic(self, triangle, make_rng):
		"""Test that equal streams give equal spins."""
		spec = IsingSpec.from_beta(triangle, 0.4)
		np.testing.assert_array_equal(IsingService.sample_spins(spec, make_rng(1)), IsingService.sample_spins(spec, make_rng(1)))
