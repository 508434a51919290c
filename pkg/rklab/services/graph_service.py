from typing import Any, Dict, Union
from pathlib import Path
import json
import logging
import numpy as np
import networkx as nx
import pydantic
from scipy import linalg
from rklab.schemas.graph import GraphSpec, WeightedGraph
from rklab.exceptions import (
	ValidationError,
	DisconnectedGraphError,
	NonPositiveWeightError,
	SelfLoopError,
	DuplicateEdgeError,
	MissingSpecialVertexError,
	UnknownVertexError,
	IndexMismatchError,
	InvalidParameterError,
	SingularGreenFunctionError,
)
logger = logging.getLogger(__name__)


class GraphService:
	"""Graph construction, Dirichlet form, generator and Green function killed outside U."""
	@staticmethod
	def build_graph(spec: Union[GraphSpec, Dict[str, Any]]) -> WeightedGraph:
		"""
		Validate a graph description and precompute adjacency, W_i and Lambda_U.

		Args:
			spec: GraphSpec or a dict in graph-file form

		Returns:
			Immutable WeightedGraph

		Raises:
			MissingSpecialVertexError, UnknownVertexError, SelfLoopError,
			NonPositiveWeightError, DuplicateEdgeError, DisconnectedGraphError
		"""
		if isinstance(spec, dict):
			try:
				spec = GraphSpec.from_dict(spec)
			except pydantic.ValidationError as e:
				raise ValidationError("Malformed graph description", detail=str(e))

		vertices = list(spec.vertices)
		index = {}
		for i, v in enumerate(vertices):
			if v in index:
				raise ValidationError(f"Duplicate vertex id {v}")
			index[v] = i
		if spec.x0 not in index:
			raise MissingSpecialVertexError(spec.x0)
		x0_index = index[spec.x0]
		n = len(vertices)

		pairs = []
		weights = []
		seen = set()
		for edge in spec.edges:
			if edge.u not in index:
				raise UnknownVertexError(edge.u)
			if edge.v not in index:
				raise UnknownVertexError(edge.v)
			a, b = index[edge.u], index[edge.v]
			if a == b:
				raise SelfLoopError(edge.u)
			if not np.isfinite(edge.w) or edge.w <= 0:
				raise NonPositiveWeightError(edge.u, edge.v, edge.w)
			key = (min(a, b), max(a, b))
			if key in seen:
				raise DuplicateEdgeError(edge.u, edge.v)
			seen.add(key)
			pairs.append((a, b))
			weights.append(float(edge.w))

		nx_graph = nx.Graph()
		nx_graph.add_nodes_from(range(n))
		nx_graph.add_edges_from(pairs)
		components = nx.number_connected_components(nx_graph)
		if components != 1:
			raise DisconnectedGraphError(components)

		edge_pairs = np.array(pairs, dtype=int).reshape(-1, 2)
		edge_weights = np.array(weights, dtype=float)
		W = np.zeros((n, n))
		W[edge_pairs[:, 0], edge_pairs[:, 1]] = edge_weights
		W[edge_pairs[:, 1], edge_pairs[:, 0]] = edge_weights
		degree = W.sum(axis=1)
		free = np.array([i for i in range(n) if i != x0_index], dtype=int)
		laplacian = np.diag(degree) - W
		neighbors = [np.flatnonzero(W[i] > 0) for i in range(n)]

		for arr in (edge_pairs, edge_weights, W, degree, free, laplacian):
			arr.setflags(write=False)

		g = WeightedGraph(
			vertices=vertices,
			x0=spec.x0,
			x0_index=x0_index,
			edge_pairs=edge_pairs,
			edge_weights=edge_weights,
			conductance_matrix=W,
			degree=degree,
			free_indices=free,
			laplacian_free=np.ascontiguousarray(laplacian[np.ix_(free, free)]),
			neighbors=neighbors,
			neighbor_weights=[W[i, nb] for i, nb in enumerate(neighbors)],
		)
		logger.debug(f"Built graph with {n} vertices and {len(pairs)} edges (x0={spec.x0})")
		return g

	@staticmethod
	def load_graph(path: Union[str, Path]) -> WeightedGraph:
		"""Read a graph JSON file and build the graph."""
		path = Path(path)
		try:
			with path.open("r", encoding="utf-8") as fh:
				data = json.load(fh)
		except FileNotFoundError:
			raise ValidationError(f"Graph file not found: {path}")
		except json.JSONDecodeError as e:
			raise ValidationError(f"Graph file {path} is not valid JSON", detail=f"Graph file {path} is not valid JSON: {e}")
		if not isinstance(data, dict):
			raise ValidationError(f"Graph file {path} must contain a JSON object")
		logger.info(f"Loaded graph file {path}")
		return GraphService.build_graph(data)

	@staticmethod
	def check_vector(g: WeightedGraph, f) -> np.ndarray:
		"""Coerce f to a float array indexed by the vertex set."""
		arr = np.asarray(f, dtype=float)
		if arr.shape != (g.n,):
			raise IndexMismatchError(g.n, int(arr.size))
		return arr

	@staticmethod
	def dirichlet_energy(g: WeightedGraph, f) -> float:
		"""E(f,f) = 1/2 sum_{x,y} W_xy (f(x)-f(y))^2, i.e. one term per edge."""
		f = GraphService.check_vector(g, f)
		u, v = g.edge_pairs[:, 0], g.edge_pairs[:, 1]
		return float(np.sum(g.edge_weights * (f[u] - f[v]) ** 2))

	@staticmethod
	def generator_apply(g: WeightedGraph, f) -> np.ndarray:
		"""(Lf)(x) = sum_y W_xy (f(y) - f(x))."""
		f = GraphService.check_vector(g, f)
		return g.conductance_matrix @ f - g.degree * f

	@staticmethod
	def cholesky_free(g: WeightedGraph) -> np.ndarray:
		"""Lower Cholesky factor of Lambda_U."""
		if g.n_free == 0:
			return np.zeros((0, 0))
		try:
			return linalg.cholesky(g.laplacian_free, lower=True)
		except linalg.LinAlgError as e:
			raise SingularGreenFunctionError(f"Restricted Laplacian is not positive definite: {e}")

	@staticmethod
	def green_function(g: WeightedGraph) -> np.ndarray:
		"""G_U = Lambda_U^{-1}, rows and columns in free-vertex order."""
		if g.n_free == 0:
			return np.zeros((0, 0))
		try:
			factor = linalg.cho_factor(g.laplacian_free, lower=True)
		except linalg.LinAlgError as e:
			raise SingularGreenFunctionError(f"Restricted Laplacian is not positive definite: {e}")
		G = linalg.cho_solve(factor, np.eye(g.n_free))
		return 0.5 * (G + G.T)

	@staticmethod
	def check_positive(g: WeightedGraph, f, name: str) -> np.ndarray:
		"""Like check_vector, additionally requiring finite positive entries."""
		arr = GraphService.check_vector(g, f)
		if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
			raise InvalidParameterError(f"{name} must be positive and finite at every vertex")
		return arr

	@staticmethod
	def resolve_vertex(g: WeightedGraph, vertex, by_index: bool = False) -> int:
		"""Vertex index from a vertex id, or from an index when by_index is set."""
		if by_index:
			if not 0 <= int(vertex) < g.n:
				raise UnknownVertexError(vertex)
			return int(vertex)
		return g.index_of(vertex)
