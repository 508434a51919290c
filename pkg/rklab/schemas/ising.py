import numpy as np
from pydantic import ConfigDict, model_validator
from rklab.schemas.base import BaseSchema
from rklab.schemas.graph import WeightedGraph
from rklab.exceptions import IndexMismatchError, InvalidParameterError, NegativeCouplingError


class IsingSpec(BaseSchema):
	"""
	Ferromagnetic Ising model on the graph's vertices with boundary sigma_x0 = +1.
	
	`couplings` holds one J per edge, aligned with `graph.edge_pairs`.
	"""
	model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)
	
	graph: WeightedGraph
	couplings: np.ndarray
	
	@model_validator(mode="after")
	def check_couplings(self) -> "IsingSpec":
		J = self.couplings
		if J.shape != (len(self.graph.edge_weights),):
			raise IndexMismatchError(len(self.graph.edge_weights), int(J.size))
		if not np.all(np.isfinite(J)):
			raise InvalidParameterError("Ising couplings must be finite")
		if np.any(J < 0):
			raise NegativeCouplingError(float(J.min()))
		return self
	
	@classmethod
	def from_amplitudes(cls, g: WeightedGraph, L: np.ndarray) -> "IsingSpec":
		"""J_ij = W_ij * L_i * L_j."""
		L = np.asarray(L, dtype=float)
		if L.shape != (g.n,):
			raise IndexMismatchError(g.n, int(L.size))
		u, v = g.edge_pairs[:, 0], g.edge_pairs[:, 1]
		return cls(graph=g, couplings=g.edge_weights * L[u] * L[v])
	
	@classmethod
	def from_beta(cls, g: WeightedGraph, beta: float) -> "IsingSpec":
		"""J = beta * W."""
		return cls(graph=g, couplings=beta * g.edge_weights)
