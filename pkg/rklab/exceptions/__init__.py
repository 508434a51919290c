from rklab.exceptions.base import (
	EXIT_OK,
	EXIT_STATISTICAL_FAILURE,
	EXIT_USAGE,
	EXIT_NUMERICAL_FAILURE,
	RkLabException,
	ValidationError,
	DisconnectedGraphError,
	NonPositiveWeightError,
	SelfLoopError,
	DuplicateEdgeError,
	MissingSpecialVertexError,
	UnknownVertexError,
	IndexMismatchError,
	InvalidParameterError,
	InvalidTimeError,
	TooManySpinsError,
	NegativeCouplingError,
	DegenerateWeightsError,
	ConfigError,
	NumericalFailureError,
	HazardIntegrationError,
	MagnetizationUnderflowError,
	SingularGreenFunctionError,
)
from rklab.exceptions.handler import handle_cli_exceptions

__all__ = [
	"EXIT_OK",
	"EXIT_STATISTICAL_FAILURE",
	"EXIT_USAGE",
	"EXIT_NUMERICAL_FAILURE",
	"RkLabException",
	"ValidationError",
	"DisconnectedGraphError",
	"NonPositiveWeightError",
	"SelfLoopError",
	"DuplicateEdgeError",
	"MissingSpecialVertexError",
	"UnknownVertexError",
	"IndexMismatchError",
	"InvalidParameterError",
	"InvalidTimeError",
	"TooManySpinsError",
	"NegativeCouplingError",
	"DegenerateWeightsError",
	"ConfigError",
	"NumericalFailureError",
	"HazardIntegrationError",
	"MagnetizationUnderflowError",
	"SingularGreenFunctionError",
	"handle_cli_exceptions",
]
