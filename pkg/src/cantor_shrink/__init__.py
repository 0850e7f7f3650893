"""Exact constructions of Cantor-set dynamical systems as nested intervals.

Subpackages build adding-machine (odometer) systems and two-cycle graph-cover
inverse limits, embed them in the real line with exact rational endpoints, and
certify finite-depth shrinking/minimality/mixing properties with exact margins.
"""

from cantor_shrink.exact import ClosedInterval, canonical_dumps, pow2

__all__ = ["ClosedInterval", "canonical_dumps", "pow2"]
__version__ = "0.1.0"
