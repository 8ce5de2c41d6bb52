"""Regular simplices inscribed in S^n and their Voronoi cells.

Cell indices are 0-based: vertex ``i`` of a simplex owns cell ``i``.
``BOUNDARY`` (-1) marks points whose two nearest vertices are tied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ghsphere.errors import DimensionMismatchError, DomainError
from ghsphere.sphere import SpherePoint, dist_rows

BOUNDARY = -1
TIE_TOL = 1e-9


def zeta(n: int) -> float:
    """Mutual distance arccos(-1/(n+1)) of the vertices of a simplex in S^n."""
    if n < 1:
        raise DomainError("zeta(n) needs n >= 1")
    return math.acos(-1.0 / (n + 1))


def eta(n: int) -> float:
    """Diameter of a Voronoi cell of the inscribed regular simplex in S^n."""
    if n < 1:
        raise DomainError("eta(n) needs n >= 1")
    if n % 2:
        return math.acos(-(n + 1) / (n + 3))
    return math.acos(-math.sqrt(n / (n + 4)))


def gh_target(n: int) -> float:
    """pi*n/(2n+1): the distance from S^1 to S^2n and to S^(2n+1)."""
    return math.pi * n / (2 * n + 1)


def cone_diameter(diam: float) -> float:
    """Diameter of the cone over a set of diameter ``diam`` lying in an equator."""
    return max(math.pi / 2, diam)


def cell_diameter_bound(n: int, coned: int = 0) -> float:
    """Diameter of a Voronoi cell of S^n after ``coned`` coning steps."""
    if coned < 0:
        raise DomainError("coned must be >= 0")
    d = eta(n)
    for _ in range(coned):
        d = cone_diameter(d)
    return d


@lru_cache(maxsize=None)
def _helmert(m: int) -> np.ndarray:
    # Rows are an orthonormal basis of the sum-zero hyperplane of R^m; they
    # are what Gram-Schmidt yields on e_1+..+e_k - k e_(k+1), k = 1..m-1.
    h = np.zeros((m - 1, m))
    for k in range(1, m):
        h[k - 1, :k] = 1.0
        h[k - 1, k] = -float(k)
        h[k - 1] /= math.sqrt(k * (k + 1))
    return h


@dataclass(frozen=True, eq=False)
class RegularSimplex:
    """The n+2 vertices of a regular simplex inscribed in S^n."""

    dim: int
    vertices: np.ndarray  # shape (n+2, n+1)

    @property
    def points(self) -> list[SpherePoint]:
        return [SpherePoint(v) for v in self.vertices]

    def embedded(self, extra: int) -> np.ndarray:
        """Vertices padded with ``extra`` trailing zero coordinates."""
        return np.hstack([self.vertices, np.zeros((self.dim + 2, extra))])


@lru_cache(maxsize=64)
def _simplex_vertices(n: int) -> np.ndarray:
    m = n + 2
    centered = np.eye(m) - 1.0 / m
    centered /= np.linalg.norm(centered, axis=1, keepdims=True)
    v = centered @ _helmert(m).T
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    v.setflags(write=False)
    return v


def build_simplex(n: int) -> RegularSimplex:
    """Canonical regular simplex in S^n (deterministic across runs)."""
    if n < 1:
        raise DomainError("build_simplex needs n >= 1")
    return RegularSimplex(n, _simplex_vertices(n))


def classify_rows(points: np.ndarray, vertices: np.ndarray, tol: float = TIE_TOL) -> np.ndarray:
    """Nearest-vertex index for each row of ``points``, BOUNDARY on ties."""
    pts = np.atleast_2d(points)
    if pts.shape[-1] != vertices.shape[-1]:
        raise DimensionMismatchError(
            f"points have {pts.shape[-1]} coordinates, vertices {vertices.shape[-1]}"
        )
    # rank vertices by inner product, then measure the top two with the stable distance
    order = np.argsort(-(pts @ vertices.T), axis=1, kind="stable")[:, :2]
    d1 = dist_rows(pts, vertices[order[:, 0]])
    d2 = dist_rows(pts, vertices[order[:, 1]])
    nearest = np.where(d1 <= d2, order[:, 0], order[:, 1])
    return np.where(np.abs(d2 - d1) < tol, BOUNDARY, nearest)


def classify(x: SpherePoint, s: RegularSimplex | np.ndarray) -> int:
    """Voronoi cell of ``x`` for the simplex (or an explicit vertex array)."""
    vertices = s.vertices if isinstance(s, RegularSimplex) else np.asarray(s)
    return int(classify_rows(x.coords[None, :], vertices)[0])
