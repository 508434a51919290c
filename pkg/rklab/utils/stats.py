from typing import Sequence, Tuple
import math
import numpy as np
from scipy import stats
from rklab.exceptions import InvalidParameterError, DegenerateWeightsError


def two_sample_ks(a: Sequence[float], b: Sequence[float]) -> Tuple[float, float]:
	"""
	Two-sample Kolmogorov-Smirnov statistic with the asymptotic p-value.

	The p-value is the Kolmogorov distribution tail at D * sqrt(n m / (n + m)).
	"""
	a = np.asarray(a, dtype=float)
	b = np.asarray(b, dtype=float)
	if a.size == 0 or b.size == 0:
		raise InvalidParameterError("Two-sample KS requires two nonempty samples")
	statistic = float(stats.ks_2samp(a, b).statistic)
	scale = math.sqrt(a.size * b.size / (a.size + b.size))
	return statistic, float(stats.kstwobign.sf(statistic * scale))


def mean_stderr(values: Sequence[float]) -> Tuple[float, float]:
	"""Sample mean and its standard error."""
	values = np.asarray(values, dtype=float)
	if values.size < 2:
		raise InvalidParameterError("At least two values are needed for a standard error")
	return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def variance_stderr(values: Sequence[float]) -> Tuple[float, float]:
	"""Sample variance and its standard error sqrt((m4 - s^4) / n)."""
	values = np.asarray(values, dtype=float)
	if values.size < 2:
		raise InvalidParameterError("At least two values are needed for a standard error")
	variance = float(values.var(ddof=1))
	m4 = float(np.mean((values - values.mean()) ** 4))
	return variance, math.sqrt(max(m4 - variance ** 2, 0.0) / values.size)


def z_score(estimate: float, target: float, stderr: float) -> float:
	"""(estimate - target) / stderr; 0 for an exact match, inf for a mismatch with zero stderr."""
	difference = estimate - target
	if stderr > 0:
		return difference / stderr
	return 0.0 if difference == 0 else math.copysign(math.inf, difference)


def two_sided_p(z: float) -> float:
	return float(2.0 * stats.norm.sf(abs(z)))


def weighted_moment_ci(values: Sequence[float], weights: Sequence[float]) -> Tuple[float, float, float]:
	"""
	Self-normalized weighted mean with delta-method standard error.

	Returns:
		(sum w v / sum w, sqrt(sum w^2 (v - mean)^2) / |sum w|, (sum w)^2 / sum w^2)

	Raises:
		DegenerateWeightsError: weights sum to zero
	"""
	values = np.asarray(values, dtype=float)
	weights = np.asarray(weights, dtype=float)
	if values.shape != weights.shape or values.ndim != 1:
		raise InvalidParameterError("Values and weights must be one-dimensional with equal lengths")
	total = float(weights.sum())
	if values.size == 0 or total == 0.0:
		raise DegenerateWeightsError("Weights sum to zero")
	mean = float(np.dot(weights, values) / total)
	stderr = float(math.sqrt(np.sum(weights ** 2 * (values - mean) ** 2)) / abs(total))
	ess = total ** 2 / float(np.sum(weights ** 2))
	return mean, stderr, ess


def chi_square_pvalue(counts: Sequence[int], probabilities: Sequence[float]) -> float:
	"""Goodness-of-fit p-value of observed counts against category probabilities."""
	counts = np.asarray(counts, dtype=float)
	expected = np.asarray(probabilities, dtype=float) * counts.sum()
	return float(stats.chisquare(counts, expected).pvalue)
