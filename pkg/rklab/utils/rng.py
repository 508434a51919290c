import numpy as np


def replicate_stream(seed: int, experiment_code: int, replicate: int, pipeline: int = 0) -> np.random.Generator:
	"""
	Independent generator for one replicate of one pipeline.

	Counter-based construction: the key (experiment_code, pipeline, replicate)
	is folded into a SeedSequence spawn key together with the master seed, and
	the resulting state seeds a Philox bit generator. Distinct keys give
	distinct, non-overlapping streams, independent of scheduling.
	"""
	sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(experiment_code), int(pipeline), int(replicate)))
	return np.random.Generator(np.random.Philox(sequence))
