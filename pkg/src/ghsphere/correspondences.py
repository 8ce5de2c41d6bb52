"""The three sphere-to-sphere constructions and their antipodal extension.

* :class:`EvenCorrespondence` -- the relation between the upper half of S^2n
  and S^1 pairing Voronoi cells of an equatorial simplex with roots of unity,
  and each simplex vertex with a whole arc of S^1.
* :class:`OddMap` -- the map from (a dense subset of) the upper half of
  S^(2n+1) to S^1 that rotates the even construction on the southern cells.
* :class:`FnMap` -- the surjection from the upper half of S^(n+1) onto S^n
  that blends nearest-vertex snapping with equatorial projection.

Every map works on single :class:`SpherePoint` values and on stacks of rows;
the row versions return ``(images, ok)`` where ``ok`` flags points inside the
map's domain (off Voronoi boundaries and away from the poles).  Points of S^1
are handled as angles internally and returned as unit vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ghsphere.errors import DimensionMismatchError, DomainError, NotInDomainError
from ghsphere.simplex import BOUNDARY, RegularSimplex, build_simplex, classify_rows, gh_target, zeta
from ghsphere.sphere import POLE_EPS, SpherePoint, dist_rows, slerp_rows

TWO_PI = 2.0 * math.pi
VERTEX_TOL = 1e-12


def angle_to_point(theta: float) -> SpherePoint:
    return SpherePoint.of(math.cos(theta), math.sin(theta))


def angles_to_rows(theta: np.ndarray) -> np.ndarray:
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def point_angle(y: SpherePoint) -> float:
    return math.atan2(y.coords[1], y.coords[0]) % TWO_PI


@dataclass(frozen=True)
class Arc:
    """Closed arc of S^1 from angle ``start`` counterclockwise over ``length``.

    A zero-length arc is a single point.
    """

    start: float
    length: float

    @property
    def center(self) -> float:
        return (self.start + self.length / 2) % TWO_PI

    def contains(self, theta: float, tol: float = 1e-12) -> bool:
        offset = (theta - self.start) % TWO_PI
        return offset <= self.length + tol or offset >= TWO_PI - tol

    def at(self, u: float) -> float:
        """Angle at fraction ``u`` in [0, 1] along the arc."""
        return (self.start + u * self.length) % TWO_PI

    def __neg__(self) -> "Arc":
        return Arc((self.start + math.pi) % TWO_PI, self.length)

    @property
    def is_point(self) -> bool:
        return self.length == 0.0


def _check_rows(x: np.ndarray, width: int) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[-1] != width:
        raise DimensionMismatchError(f"expected {width} coordinates, got {x.shape[-1]}")
    return x


class _Map:
    """Shared helpers; subclasses define ``source_dim`` and ``image_rows``."""

    source_dim: int
    target_dim: int
    name: str

    def bound(self) -> float:
        raise NotImplementedError

    def image_rows(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def helmet_rows(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Images of arbitrary rows of the source sphere.

        Rows with negative last coordinate go through ``x -> -F(-x)``.
        """
        x = _check_rows(x, self.source_dim + 1)
        lower = x[:, -1] < 0.0
        folded = np.where(lower[:, None], -x, x)
        y, ok = self.image_rows(folded)
        return np.where(lower[:, None], -y, y), ok

    def _check_point(self, x: SpherePoint) -> None:
        if x.dim != self.source_dim:
            raise DimensionMismatchError(f"{self.name} acts on S^{self.source_dim}, got S^{x.dim}")
        if x.coords[-1] < 0.0:
            raise DomainError("point lies in the lower hemisphere; use helmet_extend")


@dataclass(frozen=True, eq=False)
class EvenCorrespondence(_Map):
    """Relation between the upper half of S^2n and S^1."""

    n: int
    simplex: RegularSimplex = field(init=False)
    vertices: np.ndarray = field(init=False, repr=False)
    roots: np.ndarray = field(init=False, repr=False)

    name = "R2n"

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("EvenCorrespondence needs n >= 1")
        s = build_simplex(2 * self.n - 1)
        object.__setattr__(self, "simplex", s)
        object.__setattr__(self, "vertices", s.embedded(1))
        m = 2 * self.n + 1
        object.__setattr__(self, "roots", TWO_PI * np.arange(m) / m)

    @property
    def source_dim(self) -> int:
        return 2 * self.n

    target_dim = 1

    @property
    def half_arc(self) -> float:
        return math.pi / (2 * self.n + 1)

    def bound(self) -> float:
        return 2.0 * gh_target(self.n)

    def arc(self, i: int) -> Arc:
        """The open Voronoi arc W_i around root q_i (returned closed)."""
        return Arc((self.roots[i] - self.half_arc) % TWO_PI, 2 * self.half_arc)

    def __call__(self, x: SpherePoint) -> Arc | None:
        """Fiber of the relation over ``x``.

        A one-point arc for cell points, the arc W_i at vertex p_i, and
        ``None`` on cell boundaries (outside the relation's projection).
        """
        self._check_point(x)
        d = dist_rows(x.coords[None, :], self.vertices)
        i = int(np.argmin(d))
        if d[i] < VERTEX_TOL:
            return self.arc(i)
        k = int(classify_rows(x.coords[None, :], self.vertices)[0])
        if k == BOUNDARY:
            return None
        return Arc(float(self.roots[k]), 0.0)

    def image_rows(self, x):
        x = _check_rows(x, self.source_dim + 1)
        k = classify_rows(x, self.vertices)
        ok = k != BOUNDARY
        theta = self.roots[np.where(ok, k, 0)]
        return angles_to_rows(theta), ok

    def fiber_element(self, i: int, u: float, sign: int = 1) -> tuple[np.ndarray, np.ndarray]:
        """The pair (sign*p_i, sign*y) with y at fraction u along W_i."""
        y = angles_to_rows(np.array(self.arc(i).at(u)))
        return sign * self.vertices[i], sign * y


@dataclass(frozen=True, eq=False)
class OddMap(_Map):
    """Map from a dense subset of the upper half of S^(2n+1) to S^1."""

    n: int
    simplex: RegularSimplex = field(init=False)
    vertices: np.ndarray = field(init=False, repr=False)

    name = "Phi"
    target_dim = 1

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("OddMap needs n >= 1")
        s = build_simplex(2 * self.n - 1)
        object.__setattr__(self, "simplex", s)
        # classification happens on the equatorial S^2n, so pad one zero
        object.__setattr__(self, "vertices", s.embedded(1))

    @property
    def source_dim(self) -> int:
        return 2 * self.n + 1

    @property
    def step(self) -> float:
        return math.pi / (2 * self.n + 1)

    def bound(self) -> float:
        return 2.0 * gh_target(self.n)

    def root_angle(self, k: int) -> float:
        return 2 * k * self.step

    def image_interval(self, k: int) -> Arc:
        """I_k, the arc of length pi/(2n+1) ending at q_k."""
        return Arc(((2 * k - 1) * self.step) % TWO_PI, self.step)

    def in_image(self, theta: float, tol: float = 1e-12) -> bool:
        return any(self.image_interval(k).contains(theta, tol) for k in range(2 * self.n + 1))

    def angle_rows(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        x = _check_rows(x, self.source_dim + 1)
        if np.any(x[:, -1] < 0.0):
            raise DomainError("rows must lie in the closed upper hemisphere")
        eq = x[:, :-1]
        nrm = np.linalg.norm(eq, axis=1)
        pole = nrm <= POLE_EPS
        p = eq / np.where(pole, 1.0, nrm)[:, None]
        alpha = np.arctan2(x[:, -1], nrm)
        north = p[:, -1] >= 0.0
        k = classify_rows(np.where(north[:, None], p, -p), self.vertices)
        ok = (~pole) & (k != BOUNDARY)
        k = np.where(ok, k, 0)
        base = 2 * k * self.step
        theta = np.where(north, base, math.pi + base + np.minimum(alpha, self.step))
        return theta % TWO_PI, ok

    def image_rows(self, x):
        theta, ok = self.angle_rows(x)
        return angles_to_rows(theta), ok

    def angle(self, x: SpherePoint) -> float:
        self._check_point(x)
        theta, ok = self.angle_rows(x.coords[None, :])
        if not ok[0]:
            raise NotInDomainError("point is a pole or its base lies on a Voronoi boundary")
        return float(theta[0])

    def __call__(self, x: SpherePoint) -> SpherePoint:
        return angle_to_point(self.angle(x))


def blend_weight(t: np.ndarray | float):
    """Weight toward the equatorial projection at colatitude t: max(0, t + 1 - pi/2)."""
    return np.maximum(0.0, np.asarray(t, dtype=float) + 1.0 - math.pi / 2)


@dataclass(frozen=True, eq=False)
class FnMap(_Map):
    """Surjection from the upper half of S^(n+1) onto S^n."""

    n: int
    simplex: RegularSimplex = field(init=False)

    name = "Fn"

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("FnMap needs n >= 1")
        object.__setattr__(self, "simplex", build_simplex(self.n))

    @property
    def source_dim(self) -> int:
        return self.n + 1

    @property
    def target_dim(self) -> int:
        return self.n

    def bound(self) -> float:
        return zeta(self.n)

    def decompose_rows(self, x: np.ndarray):
        """(sigma, colatitude, cell, ok) for rows of the upper half."""
        x = _check_rows(x, self.source_dim + 1)
        if np.any(x[:, -1] < 0.0):
            raise DomainError("rows must lie in the closed upper hemisphere")
        eq = x[:, :-1]
        nrm = np.linalg.norm(eq, axis=1)
        pole = nrm <= POLE_EPS
        sigma = eq / np.where(pole, 1.0, nrm)[:, None]
        colat = np.arctan2(nrm, x[:, -1])
        k = classify_rows(sigma, self.simplex.vertices)
        ok = (~pole) & (k != BOUNDARY)
        return sigma, colat, np.where(ok, k, 0), ok

    def image_rows(self, x):
        sigma, colat, k, ok = self.decompose_rows(x)
        p = self.simplex.vertices[k]
        f = blend_weight(colat)
        y = slerp_rows(p, sigma, 1.0 - f)
        return np.where((f == 0.0)[:, None], p, y), ok

    def __call__(self, x: SpherePoint) -> SpherePoint:
        self._check_point(x)
        y, ok = self.image_rows(x.coords[None, :])
        if not ok[0]:
            raise NotInDomainError("point is the pole or projects onto a Voronoi boundary")
        return SpherePoint(y[0])


def helmet_extend(rel, x: SpherePoint):
    """Evaluate a construction anywhere on its source sphere.

    Points of the upper half go straight through; a lower point x is sent to
    the negation of the image of -x.  The extended relation has the same
    distortion as the original one.
    """
    if x.coords[-1] >= 0.0:
        return rel(x)
    out = rel(-x)
    if out is None:
        return None
    return -out


def helmet_pair(pair):
    """The mirrored pair (-x, -y)."""
    x, y = pair
    return -x, -y


def pair_distortion(d_src, d_tgt):
    """|d_src - d_tgt|, elementwise for arrays."""
    return np.abs(np.asarray(d_src) - np.asarray(d_tgt)) if isinstance(d_src, np.ndarray) else abs(d_src - d_tgt)
