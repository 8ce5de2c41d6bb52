"""Geodesic primitives on the unit sphere S^n embedded in R^(n+1).

Points are unit vectors.  Distances use the half-angle form
``2 * atan2(|x - y|, |x + y|)``, which equals ``arccos(<x, y>)`` exactly in
real arithmetic but keeps full relative precision for nearly coincident and
nearly antipodal pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ghsphere.errors import (
    DegenerateGeodesicError,
    DimensionMismatchError,
    DomainError,
    PoleProjectionError,
    SingularityError,
)

NORM_REJECT = (0.9, 1.1)
POLE_EPS = 1e-15


@dataclass(frozen=True, eq=False)
class SpherePoint:
    """A point of S^n stored as a unit vector of length n+1.

    Coordinates are renormalized on construction.  Vectors whose norm is
    outside [0.9, 1.1] are rejected since they indicate a bug, not drift.
    """

    coords: np.ndarray

    def __post_init__(self):
        v = np.array(self.coords, dtype=float).reshape(-1)
        if v.size < 2:
            raise DomainError("a point of S^n needs at least 2 coordinates")
        norm = float(np.linalg.norm(v))
        if not NORM_REJECT[0] <= norm <= NORM_REJECT[1]:
            raise DomainError(f"coordinate norm {norm!r} is too far from 1")
        v = v / norm
        v.setflags(write=False)
        object.__setattr__(self, "coords", v)

    @classmethod
    def of(cls, *coords: float) -> "SpherePoint":
        return cls(np.array(coords, dtype=float))

    @property
    def dim(self) -> int:
        return self.coords.size - 1

    def __neg__(self) -> "SpherePoint":
        return SpherePoint(-self.coords)

    def __repr__(self) -> str:
        inner = ", ".join(f"{c:.6g}" for c in self.coords)
        return f"SpherePoint({inner})"

    def isclose(self, other: "SpherePoint", atol: float = 1e-12) -> bool:
        return self.dim == other.dim and bool(np.allclose(self.coords, other.coords, atol=atol, rtol=0))


@dataclass(frozen=True)
class PolarCoords:
    """A point of the closed upper hemisphere written as (base, alpha).

    ``base`` is the nearest point of the equatorial sphere (embedded, last
    coordinate zero) and ``alpha`` the distance from the point to that
    equator.  The distance to the north pole is ``colatitude``.
    """

    base: SpherePoint
    alpha: float

    @property
    def colatitude(self) -> float:
        return math.pi / 2 - self.alpha

    def to_point(self) -> SpherePoint:
        v = math.cos(self.alpha) * self.base.coords.copy()
        v[-1] = math.sin(self.alpha)
        return SpherePoint(v)


@dataclass(frozen=True)
class TriangleSides:
    """Side lengths of a spherical triangle.

    ``a`` is the side whose farthest point from the opposite vertex is of
    interest; ``b`` and ``c`` are the distances from that vertex to the two
    endpoints of ``a``.
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if not 0.0 <= v <= math.pi:
                raise DomainError(f"side {name}={v!r} outside [0, pi]")
        a, b, c = self.a, self.b, self.c
        tol = 1e-12
        if a > b + c + tol or b > a + c + tol or c > a + b + tol:
            raise DomainError(f"sides {a!r}, {b!r}, {c!r} violate the triangle inequality")


def _check_same_dim(x: SpherePoint, y: SpherePoint) -> None:
    if x.dim != y.dim:
        raise DimensionMismatchError(f"points live on S^{x.dim} and S^{y.dim}")


def dist_rows(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row-wise geodesic distance between two stacks of unit vectors."""
    d = np.linalg.norm(x - y, axis=-1)
    s = np.linalg.norm(x + y, axis=-1)
    return 2.0 * np.arctan2(d, s)


def geodesic_dist(x: SpherePoint, y: SpherePoint) -> float:
    _check_same_dim(x, y)
    return float(dist_rows(x.coords, y.coords))


def slerp_rows(x: np.ndarray, y: np.ndarray, lam: np.ndarray | float) -> np.ndarray:
    """Rows z on [x, y] with d(z, y) = lam * d(x, y).  No antipodal checks."""
    theta = dist_rows(x, y)[..., None]
    lam = np.asarray(lam, dtype=float)
    if lam.ndim:
        lam = lam[..., None]
    sin_t = np.sin(theta)
    small = sin_t < 1e-300
    safe = np.where(small, 1.0, sin_t)
    wx = np.where(small, lam, np.sin(lam * theta) / safe)
    wy = np.where(small, 1.0 - lam, np.sin((1.0 - lam) * theta) / safe)
    z = wx * x + wy * y
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def interpolate(x: SpherePoint, y: SpherePoint, lam: float) -> SpherePoint:
    """The point z of the segment [x, y] with d(z, y) = lam * d(x, y).

    ``lam=1`` gives ``x`` and ``lam=0`` gives ``y``.
    """
    _check_same_dim(x, y)
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda={lam!r} outside [0, 1]")
    if np.linalg.norm(x.coords + y.coords) < 1e-12:
        raise DegenerateGeodesicError("antipodal endpoints have no unique geodesic")
    if lam == 1.0:
        return x
    if lam == 0.0:
        return y
    return SpherePoint(slerp_rows(x.coords, y.coords, lam))


def project_equator(x: SpherePoint) -> SpherePoint:
    """Nearest point of the equatorial sphere {x_last = 0}, kept embedded."""
    v = x.coords.copy()
    v[-1] = 0.0
    norm = float(np.linalg.norm(v))
    if norm <= POLE_EPS:
        raise PoleProjectionError("projection to the equator is undefined at a pole")
    return SpherePoint(v / norm)


def polar_decompose(x: SpherePoint) -> PolarCoords:
    if x.coords[-1] < 0.0:
        raise DomainError("point lies in the open lower hemisphere")
    base = project_equator(x)
    # atan2 keeps precision near the pole where arcsin(x_last) would not.
    alpha = math.atan2(float(x.coords[-1]), float(np.linalg.norm(x.coords[:-1])))
    return PolarCoords(base, alpha)


def restrict(x: SpherePoint) -> SpherePoint:
    """Drop the (zero) last coordinate of an equatorial point."""
    if abs(x.coords[-1]) > 1e-12:
        raise DomainError("point is not on the equator")
    return SpherePoint(x.coords[:-1])


def embed(x: SpherePoint, extra: int = 1) -> SpherePoint:
    """Append ``extra`` zero coordinates."""
    return SpherePoint(np.concatenate([x.coords, np.zeros(extra)]))


def triangle_third_side(b: float, c: float, angle_a: float) -> float:
    """Side opposite the angle ``angle_a`` enclosed by sides ``b`` and ``c``."""
    for name, v in (("b", b), ("c", c), ("angle_a", angle_a)):
        if not 0.0 <= v <= math.pi:
            raise DomainError(f"{name}={v!r} outside [0, pi]")
    u = math.cos(b) * math.cos(c) + math.sin(b) * math.sin(c) * math.cos(angle_a)
    return math.acos(min(1.0, max(-1.0, u)))


def right_triangle_hypotenuse(a: float | np.ndarray, b: float | np.ndarray):
    """arccos(cos a * cos b), evaluated through the half-angle form.

    Accurate for legs near zero, which a direct arccos is not.
    """
    one_minus = 2.0 * np.sin(np.asarray(a) / 2) ** 2 + np.cos(a) * 2.0 * np.sin(np.asarray(b) / 2) ** 2
    return 2.0 * np.arcsin(np.sqrt(np.clip(one_minus / 2.0, 0.0, 1.0)))


def _geodesic_cos_max(a: float, b: float, c: float) -> float:
    sin_a = math.sin(a)
    if sin_a <= 1e-12:
        raise SingularityError(f"segment length {a!r} has sin = 0")
    ca, cb, cc = math.cos(a), math.cos(b), math.cos(c)
    rad = max(0.0, cb * cb + cc * cc - 2.0 * ca * cb * cc)
    return -math.sqrt(rad) / sin_a


def max_dist_to_geodesic(sides: TriangleSides) -> float:
    """Largest distance from a vertex u to the full great circle through v, w.

    ``sides.a = d(v, w)``, ``sides.b = d(u, w)``, ``sides.c = d(u, v)``.
    """
    u = _geodesic_cos_max(sides.a, sides.b, sides.c)
    return math.acos(max(-1.0, u))


def max_dist_to_segment(sides: TriangleSides) -> float:
    """Largest distance from u to the closed segment [v, w].

    The interior critical point of t -> d(u, gamma(t)) lies on the segment
    exactly when the triangle's angles at v and w are both at least pi/2;
    otherwise the maximum sits at an endpoint.  If the three sides can close
    up into a great circle the antipode of u may lie on the segment, so pi is
    returned.
    """
    a, b, c = sides.a, sides.b, sides.c
    if a + b + c >= 2.0 * math.pi:
        return math.pi
    if math.sin(a) <= 1e-12:
        raise SingularityError(f"segment length {a!r} has sin = 0")
    ca, cb, cc = math.cos(a), math.cos(b), math.cos(c)
    obtuse_at_v = cb - ca * cc <= 0.0
    obtuse_at_w = cc - ca * cb <= 0.0
    if obtuse_at_v and obtuse_at_w:
        return max(max_dist_to_geodesic(sides), b, c)
    return max(b, c)
