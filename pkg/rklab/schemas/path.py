from enum import Enum
from typing import Optional
import numpy as np
from pydantic import ConfigDict
from rklab.schemas.base import BaseSchema


class EndReason(str, Enum):
	"""Why a jump path stopped."""
	INVERSE_LOCAL_TIME = "inverse-local-time"
	HIT_X0 = "hit-x0"
	BUDGET_DEPLETED = "budget-depleted"
	HORIZON = "horizon"


class EndKind(str, Enum):
	"""How a reversed run ended."""
	DEPLETED = "depleted"
	HIT_X0 = "hit-x0"
	HORIZON = "horizon"


class StopRule(str, Enum):
	"""Stopping rule for the magnetized reversed process."""
	DEPLETION = "depletion"
	HIT_X0 = "hit-x0"


class JumpPath(BaseSchema):
	"""
	Right-continuous piecewise-constant trajectory.
	
	The path sits at `start` on [0, jump_times[0]), at jump_targets[k] on
	[jump_times[k], jump_times[k+1]) and at the last target up to end_time.
	`end_local_times` is the occupation vector at end_time, stored so that a
	truncated final holding is exact.
	"""
	model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)
	
	start: int
	jump_times: np.ndarray
	jump_targets: np.ndarray
	end_time: float
	end_reason: EndReason
	end_local_times: np.ndarray
	
	@property
	def n_jumps(self) -> int:
		return len(self.jump_times)
	
	@property
	def end_position(self) -> int:
		return int(self.jump_targets[-1]) if len(self.jump_targets) else self.start
	
	@property
	def positions(self) -> np.ndarray:
		"""Vertex occupied on each holding interval."""
		return np.concatenate(([self.start], self.jump_targets)).astype(int)
	
	@property
	def epochs(self) -> np.ndarray:
		"""Holding interval boundaries: 0, jump times, end_time."""
		return np.concatenate(([0.0], self.jump_times, [self.end_time]))


class ReversedRun(BaseSchema):
	"""
	Run of a reversed reinforced process.
	
	`z_path` is in the process's own clock. `L_end` is the amplitude vector
	sqrt(Phi^2 - 2 l) at the end; `y_times` and `jump_amplitudes` give the
	other clock and the amplitude vector at every jump epoch, accumulated
	independently of the local times.
	"""
	model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)
	
	z_path: JumpPath
	L_end: np.ndarray
	end_site: int
	end_kind: EndKind
	y_end_time: float
	y_times: np.ndarray
	jump_amplitudes: np.ndarray  # (n_jumps, n)
	Phi: Optional[np.ndarray] = None
