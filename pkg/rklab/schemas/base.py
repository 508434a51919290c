from typing import Any, Dict
import json
import math
from enum import Enum
import numpy as np
from pydantic import BaseModel, ConfigDict


def _sanitize(obj: Any) -> Any:
	"""Turn numpy containers into lists and non-finite floats into None."""
	if isinstance(obj, dict):
		return {str(k): _sanitize(v) for k, v in obj.items()}
	if isinstance(obj, (list, tuple)):
		return [_sanitize(v) for v in obj]
	if isinstance(obj, Enum):
		return obj.value
	if isinstance(obj, np.ndarray):
		return _sanitize(obj.tolist())
	if isinstance(obj, np.generic):
		return _sanitize(obj.item())
	if isinstance(obj, float) and not math.isfinite(obj):
		return None
	return obj


class BaseSchema(BaseModel):
	"""
	Base schema class with robust serialization/deserialization
	that handles the numpy arrays carried by the simulation types.
	"""

	model_config = ConfigDict(arbitrary_types_allowed=True)

	def to_dict(self) -> Dict[str, Any]:
		"""Convert model to a plain JSON-compatible dictionary."""
		return _sanitize(self.model_dump(mode="python"))

	@classmethod
	def from_dict(cls, data: Dict[str, Any]) -> "BaseSchema":
		"""Create model instance from dictionary."""
		return cls.model_validate(data)

	def to_json(self, indent: int = 2) -> str:
		"""
		Serialize to a JSON string.

		Floats are written in their shortest round-trip form, so every value
		parses back to the identical double. NaN and infinities become null.
		"""
		return json.dumps(self.to_dict(), indent=indent, allow_nan=False)
