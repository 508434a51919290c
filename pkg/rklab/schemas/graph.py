from typing import List, Union
import numpy as np
from pydantic import ConfigDict
from rklab.exceptions import UnknownVertexError
from rklab.schemas.base import BaseSchema

VertexId = Union[int, str]


class EdgeSpec(BaseSchema):
	"""One undirected edge of a graph file."""
	u: VertexId
	v: VertexId
	w: float


class GraphSpec(BaseSchema):
	"""Graph file contents: {"vertices": [...], "x0": id, "edges": [{"u","v","w"}...]}."""
	vertices: List[VertexId]
	x0: VertexId
	edges: List[EdgeSpec] = []


class WeightedGraph(BaseSchema):
	"""
	Validated finite connected graph with conductances and a special vertex x0.
	
	Vertices are addressed by their index in declared order. Every vector
	(fields, local times, spins) is a numpy array of length n in that order;
	matrices "over U" use the same order with x0 removed.
	"""
	model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)
	
	vertices: List[VertexId]
	x0: VertexId
	x0_index: int
	edge_pairs: np.ndarray  # (m, 2) vertex indices, declared edge order
	edge_weights: np.ndarray  # (m,)
	conductance_matrix: np.ndarray  # (n, n) symmetric W
	degree: np.ndarray  # W_i
	free_indices: np.ndarray  # U in declared order
	laplacian_free: np.ndarray  # diag(W_i) - W restricted to U
	neighbors: List[np.ndarray]  # per-vertex neighbor indices, ascending
	neighbor_weights: List[np.ndarray]  # W_ij aligned with neighbors
	
	@property
	def n(self) -> int:
		return len(self.vertices)
	
	@property
	def n_free(self) -> int:
		return len(self.free_indices)
	
	def index_of(self, vertex: VertexId) -> int:
		"""Index of a declared vertex id; CLI strings match numeric ids."""
		for idx, v in enumerate(self.vertices):
			if v == vertex or str(v) == str(vertex):
				return idx
		raise UnknownVertexError(vertex)
	
	def to_spec(self) -> GraphSpec:
		"""Echo of the graph in file form."""
		return GraphSpec(
			vertices=list(self.vertices),
			x0=self.x0,
			edges=[
				EdgeSpec(u=self.vertices[int(a)], v=self.vertices[int(b)], w=float(w))
				for (a, b), w in zip(self.edge_pairs, self.edge_weights)
			],
		)
