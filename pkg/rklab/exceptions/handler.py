import logging
import sys
import traceback
from functools import wraps
from rklab.exceptions.base import RkLabException, EXIT_USAGE

logger = logging.getLogger(__name__)


def handle_cli_exceptions(func):
	"""
	Decorator to handle service layer exceptions uniformly at the CLI boundary.
	Converts RkLabException to its exit code and prints a readable message on stderr.
	
	Usage:
		@handle_cli_exceptions
		def main(argv):
			...
			return exit_code
	"""
	@wraps(func)
	def wrapper(*args, **kwargs):
		try:
			return func(*args, **kwargs)
		except RkLabException as e:
			logger.error(f"{type(e).__name__}: {e.detail}")
			print(f"rklab: error: {e.detail}", file=sys.stderr)
			return e.exit_code
		except SystemExit:
			raise
		except Exception as e:
			logger.error(f"Unexpected error: {str(e)}")
			logger.error(traceback.format_exc())
			print(f"rklab: error: {str(e)}", file=sys.stderr)
			return EXIT_USAGE
	return wrapper
