"""Gravity-model analysis of citation flows between territories.

The package turns a corpus of publications, citations, territory
coordinates and a category->area map into dyadic flow observations,
fits the log-log gravity model per research field and geographic
context, and renders the resulting table suite.  A deterministic
synthetic-corpus generator provides planted ground truth for testing.
"""

__version__ = "0.1.0"
