"""
rklab: Monte Carlo laboratory for Ray-Knight identities and their inversions
on finite weighted graphs.
"""

__version__ = "1.0.0"
