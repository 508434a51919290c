"""
Structured JSON logging configuration for the rklab command line.
Outputs to stderr so report files and piped stdout stay clean.
"""
import json
import logging
import os
import sys
from datetime import datetime, timezone
from typing import Any, Dict, Optional


class JSONFormatter(logging.Formatter):
	"""
	Custom formatter that outputs logs as JSON, one object per line.

	Experiment context passed as `extra={"extra_fields": {...}}` (experiment,
	pipeline, replicate counts) is merged into the top-level object.
	"""

	def format(self, record: logging.LogRecord) -> str:
		"""Format log record as JSON."""
		log_data: Dict[str, Any] = {
			"timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
			"level": record.levelname,
			"logger": record.name,
			"message": record.getMessage(),
			"module": record.module,
			"function": record.funcName,
			"line": record.lineno,
		}
		if record.exc_info:
			log_data["exception"] = self.formatException(record.exc_info)
		extra_fields = getattr(record, "extra_fields", None)
		if extra_fields:
			log_data.update(extra_fields)
		# numpy scalars in extra fields
		return json.dumps(log_data, default=str)


def setup_logging(level: str = "INFO") -> None:
	"""
	Configure application-wide logging to use structured JSON output to stderr.

	Args:
		level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)

	Note:
		If PYTHONDEBUG is set, this function will skip setup so that a logging
		configuration installed by a debugger or notebook takes precedence.
	"""
	numeric_level = getattr(logging, level.upper(), logging.INFO)
	if os.getenv("PYTHONDEBUG", "").lower() in ("1", "true"):
		logging.getLogger("rklab").setLevel(numeric_level)
		return

	root_logger = logging.getLogger()
	root_logger.setLevel(numeric_level)
	root_logger.handlers.clear()

	stderr_handler = logging.StreamHandler(sys.stderr)
	stderr_handler.setLevel(numeric_level)
	stderr_handler.setFormatter(JSONFormatter())
	root_logger.addHandler(stderr_handler)

	# scipy and numpy stay quiet below WARNING even at DEBUG
	for name in ("scipy", "numpy"):
		logging.getLogger(name).setLevel(max(numeric_level, logging.WARNING))


def run_fields(experiment: str, seed: int, pipeline: Optional[str] = None, **counts: Any) -> Dict[str, Any]:
	"""`extra` payload carrying the experiment context of a log record."""
	fields: Dict[str, Any] = {"experiment": experiment, "seed": seed}
	if pipeline is not None:
		fields["pipeline"] = pipeline
	fields.update(counts)
	return {"extra_fields": fields}


def get_logger(name: str) -> logging.Logger:
	"""
	Get a logger instance with the given name.

	Args:
		name: Logger name (typically __name__)

	Returns:
		Logger instance
	"""
	return logging.getLogger(name)
