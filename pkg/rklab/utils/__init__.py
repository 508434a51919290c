"""
Utility functions shared by the services and experiments.
"""
from rklab.utils.rng import replicate_stream
from rklab.utils.report_io import write_report, write_sidecar

__all__ = ['replicate_stream', 'write_report', 'write_sidecar']
