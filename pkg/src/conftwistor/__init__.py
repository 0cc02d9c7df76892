"""Conformal Cartan geometry, twistors by dressing, BRST and Yang-Mills checks on a 4D chart."""

__version__ = "0.1.0"
