from typing import Optional

# Process exit codes
EXIT_OK = 0
EXIT_STATISTICAL_FAILURE = 1
EXIT_USAGE = 2
EXIT_NUMERICAL_FAILURE = 3


class RkLabException(Exception):
	"""
	Base exception class for all rklab custom exceptions.
	All service layer exceptions should inherit from this.
	"""
	def __init__(
		self,
		message: str,
		exit_code: int = EXIT_USAGE,
		detail: Optional[str] = None
	):
		self.message = message
		self.exit_code = exit_code
		self.detail = detail or message
		super().__init__(self.message)


class ValidationError(RkLabException):
	"""
	Exception raised when an input fails validation.
	Maps to exit code 2.
	"""
	def __init__(self, message: str, detail: Optional[str] = None):
		super().__init__(
			message=message,
			exit_code=EXIT_USAGE,
			detail=detail or message
		)


class DisconnectedGraphError(ValidationError):
	"""Graph has more than one connected component."""
	def __init__(self, components: int):
		super().__init__(f"Graph is disconnected ({components} connected components)")


class NonPositiveWeightError(ValidationError):
	"""Edge conductance is zero, negative or not finite."""
	def __init__(self, u, v, w: float):
		super().__init__(f"Edge ({u}, {v}) has non-positive or non-finite weight {w}")


class SelfLoopError(ValidationError):
	"""Edge joins a vertex to itself."""
	def __init__(self, u):
		super().__init__(f"Self-loop at vertex {u}")


class DuplicateEdgeError(ValidationError):
	"""Same unordered vertex pair listed twice."""
	def __init__(self, u, v):
		super().__init__(f"Duplicate edge between {u} and {v}")


class MissingSpecialVertexError(ValidationError):
	"""x0 is not among the declared vertices."""
	def __init__(self, x0):
		super().__init__(f"Special vertex x0={x0} is not a member of vertices")


class UnknownVertexError(ValidationError):
	"""Vertex id not declared in the graph."""
	def __init__(self, vertex):
		super().__init__(f"Unknown vertex {vertex}")


class IndexMismatchError(ValidationError):
	"""Vector is not indexed by the graph's vertex set."""
	def __init__(self, expected: int, actual: int):
		super().__init__(f"Vector length {actual} does not match vertex count {expected}")


class InvalidParameterError(ValidationError):
	"""Numeric parameter out of its admissible range."""


class InvalidTimeError(ValidationError):
	"""Query time outside the path's time range or beyond depletion."""


class TooManySpinsError(ValidationError):
	"""Exhaustive enumeration guard exceeded."""
	def __init__(self, free_spins: int, limit: int):
		super().__init__(f"Ising enumeration over {free_spins} free spins exceeds the limit of {limit}")


class NegativeCouplingError(ValidationError):
	"""Antiferromagnetic coupling requested."""
	def __init__(self, value: float):
		super().__init__(f"Ising couplings must be nonnegative, got {value}")


class DegenerateWeightsError(ValidationError):
	"""Importance weights sum to zero."""


class ConfigError(ValidationError):
	"""Run configuration is missing a parameter or is out of range."""


class NumericalFailureError(RkLabException):
	"""
	Exception raised when a numerical procedure cannot meet its tolerance.
	Maps to exit code 3; experiments drop and count these replicates.
	"""
	def __init__(self, message: str, detail: Optional[str] = None):
		super().__init__(
			message=message,
			exit_code=EXIT_NUMERICAL_FAILURE,
			detail=detail or message
		)


class HazardIntegrationError(NumericalFailureError):
	"""Cumulative hazard integration failed or exhausted its step budget."""


class MagnetizationUnderflowError(NumericalFailureError):
	"""Magnetization at the current site vanished before depletion."""


class SingularGreenFunctionError(NumericalFailureError):
	"""Restricted Laplacian is not positive definite."""
