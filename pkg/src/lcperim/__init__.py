"""Convex-geometry and log-concave-measure toolkit with a verification suite
for perimeter bounds at desk scale (dimension up to 8)."""

from . import bodies, bounds, estimation, gallery, measures, perimeter

__version__ = "0.1.0"

__all__ = ["bodies", "bounds", "estimation", "gallery", "measures", "perimeter", "__version__"]
