"""Explicit Gromov-Hausdorff correspondences between round spheres.

The package builds the correspondences S^2n <-> S^1, S^(2n+1) <-> S^1 and the
interpolated surjection S^(n+1) -> S^n, estimates their distortion by seeded
sampling, and re-checks the bounding inequalities behind the S^3/S^4 case on
grids carrying explicit uniform-continuity budgets.
"""

__version__ = "0.1.0"

from ghsphere.sphere import SpherePoint, PolarCoords, TriangleSides, geodesic_dist
from ghsphere.simplex import RegularSimplex, build_simplex, zeta, eta, classify, BOUNDARY

__all__ = [
    "__version__",
    "SpherePoint",
    "PolarCoords",
    "TriangleSides",
    "geodesic_dist",
    "RegularSimplex",
    "build_simplex",
    "zeta",
    "eta",
    "classify",
    "BOUNDARY",
]
