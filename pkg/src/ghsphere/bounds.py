"""Bound functions for the F_3 distortion estimate.

All functions take two arguments ``(x, y)``.  The first is a sum of
co-latitudes ``alpha + alpha'`` (or a single ``alpha`` for the L1, L2 and
I_case2 family, or ``beta'`` for G); the second is always the azimuthal gap
``kappa``.  Functions of kappa alone (C, U3) ignore ``x`` and declare the
degenerate x-interval [0, 0].

Every arccos argument must land in [-1 - 1e-12, 1 + 1e-12]; it is then
clamped.  Anything further out (or NaN) raises :class:`NumericIntegrityError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ghsphere.errors import DomainError, NumericIntegrityError

ZETA3 = math.acos(-0.25)
RHO = math.pi - ZETA3  # = arccos(1/4)
SQRT15 = math.sqrt(15.0)
CLAMP_WINDOW = 1e-12
SEAM_GUARD = 1e-9
DOMAIN_TOL = 1e-12


@dataclass(frozen=True)
class Rect:
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    def __post_init__(self):
        if not (self.x_lo <= self.x_hi and self.y_lo <= self.y_hi):
            raise DomainError(f"empty rectangle {self}")
        if not all(math.isfinite(v) for v in (self.x_lo, self.x_hi, self.y_lo, self.y_hi)):
            raise DomainError("rectangle corners must be finite")

    def contains(self, other: "Rect", tol: float = DOMAIN_TOL) -> bool:
        return (
            other.x_lo >= self.x_lo - tol
            and other.x_hi <= self.x_hi + tol
            and other.y_lo >= self.y_lo - tol
            and other.y_hi <= self.y_hi + tol
        )

    @property
    def degenerate_x(self) -> bool:
        return self.x_lo == self.x_hi

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x_lo, self.x_hi, self.y_lo, self.y_hi)


def safe_acos(u, what: str = "arccos"):
    u = np.asarray(u, dtype=float)
    bad = ~((u >= -1.0 - CLAMP_WINDOW) & (u <= 1.0 + CLAMP_WINDOW))
    if np.any(bad):
        worst = u[bad].flat[0]
        raise NumericIntegrityError(f"{what}: argument {worst!r} outside the clamp window")
    return np.arccos(np.clip(u, -1.0, 1.0))


def safe_sqrt(u, what: str = "sqrt"):
    u = np.asarray(u, dtype=float)
    bad = ~(u >= -CLAMP_WINDOW)
    if np.any(bad):
        raise NumericIntegrityError(f"{what}: negative radicand {u[bad].flat[0]!r}")
    return np.sqrt(np.maximum(u, 0.0))


def L(x, y):
    """Lower bound for d(x, x'): distance between two points at colatitude x/2 with azimuth gap y.

    Equals arccos(cos x (1 - cos y)/2 + (1 + cos y)/2); the chord form
    2 arcsin(sin(x/2) sin(y/2)) used here keeps precision for small values.
    """
    s = np.abs(np.sin(np.asarray(x, dtype=float) / 2) * np.sin(np.asarray(y, dtype=float) / 2))
    return 2.0 * np.arcsin(np.minimum(s, 1.0))


def C(y):
    """Lower bound for cos d(p, F(x')); always negative."""
    c = np.cos(ZETA3 - np.asarray(y, dtype=float))
    return -safe_sqrt(1.0 - 2.0 * c + 16.0 * c * c, "C") / SQRT15


def kappa2(x, y):
    return np.asarray(y, dtype=float) + RHO * (math.pi / 2 - np.asarray(x, dtype=float) / 2)


def gram_radicand(c_val, cos_third):
    """C^2 + cos^2 t - C cos t / 2, the quantity under the square root of U1 and U3."""
    return c_val * c_val + cos_third * cos_third - 0.5 * c_val * cos_third


def _segment_bound(c_val, third):
    q = gram_radicand(c_val, np.cos(third))
    return -4.0 / SQRT15 * safe_sqrt(q, "U radicand")


def u1_on_seam(x, y):
    """True where U1 takes its conservative value pi (including the guard band)."""
    total = RHO + np.arccos(np.clip(C(y), -1.0, 1.0)) + kappa2(x, y)
    return ~(total < 2.0 * math.pi - SEAM_GUARD)


def U1(x, y):
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    seam = u1_on_seam(x, y)
    out = np.full(x.shape, math.pi)
    live = ~seam
    if np.any(live):
        arg = _segment_bound(C(y[live]), kappa2(x[live], y[live]))
        out[live] = safe_acos(arg, "U1")
    return out


def beta_prime(x):
    return np.asarray(x, dtype=float) / 2 - math.pi / 2 + 1.0


def G(beta, y):
    """Third side of the triangle with sides zeta_3, rho*beta and the angle fixed by kappa."""
    rb = RHO * np.asarray(beta, dtype=float)
    cos_theta = (16.0 * np.cos(RHO + np.asarray(y, dtype=float)) + 1.0) / 15.0
    arg = -0.25 * np.cos(rb) + SQRT15 / 4 * np.sin(rb) * cos_theta
    return safe_acos(arg, "G")


def U2(x, y):
    b = beta_prime(x)
    return RHO * b + G(b, y)


def u3_on_seam(y):
    """True where the sides rho, arccos C, rho + kappa can close up; U3 is then pi."""
    y = np.asarray(y, dtype=float)
    total = 2.0 * RHO + np.arccos(np.clip(C(y), -1.0, 1.0)) + y
    return ~(total < 2.0 * math.pi - SEAM_GUARD)


def U3(y):
    y = np.asarray(y, dtype=float)
    seam = u3_on_seam(y)
    out = np.full(y.shape, math.pi)
    live = ~seam
    if np.any(live):
        out[live] = safe_acos(_segment_bound(C(y[live]), RHO + y[live]), "U3")
    return out


def U6(x, y):
    return np.asarray(y, dtype=float) + RHO * (math.pi - np.asarray(x, dtype=float))


def U7(x, y):
    return ZETA3 + RHO * (np.asarray(x, dtype=float) - math.pi + 2.0) + 0.0 * np.asarray(y, dtype=float)


def L1(a, y):
    return L(a, y)


def L2(a, y):
    a, y = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(y, dtype=float))
    inner = np.clip(np.sin(a) * np.sin(y), -1.0, 1.0)
    return np.where(y >= math.pi / 2, a, np.arcsin(inner))


def I_case1(x, y):
    return np.minimum(np.minimum(U1(x, y), U2(x, y)), U6(x, y)) - L(x, y) - ZETA3


def I_k14(x, y):
    return np.minimum(U6(x, y), U7(x, y)) - L(x, y) - ZETA3


def I_case2(a, y):
    upper = G(np.asarray(a, dtype=float) - math.pi / 2 + 1.0, y)
    return upper - np.maximum(L1(a, y), L2(a, y)) - ZETA3


def I_u3(x, y):
    y = np.asarray(y, dtype=float)
    return U3(y) - L(math.pi - 2.0, y) - ZETA3


def pi_minus_L(x, y):
    """pi - L(x, y); never negative, so any grid check of ``< 0`` must refute."""
    return math.pi - L(x, y)


@dataclass(frozen=True)
class BoundFunction:
    name: str
    domain: Rect
    rows: Callable
    summary: str

    def __call__(self, x, y):
        return self.rows(x, y)


def _ignore_x(f):
    def g(x, y):
        y = np.asarray(y, dtype=float)
        return f(np.broadcast_to(y, np.broadcast_shapes(np.shape(x), y.shape)))

    return g


PI = math.pi
_SQUARE = Rect(0.0, PI, 0.0, PI)

FUNCTIONS: dict[str, BoundFunction] = {
    f.name: f
    for f in [
        BoundFunction("L", _SQUARE, L, "lower bound for d(x, x')"),
        BoundFunction("C", Rect(0.0, 0.0, 0.0, PI), _ignore_x(C), "lower bound for cos d(p, F(x'))"),
        BoundFunction("U1", Rect(0.0, 2.0, 0.0, PI), U1, "segment bound through kappa_2"),
        BoundFunction("U2", Rect(PI - 2, PI, 0.0, PI), U2, "rho*beta' + G(kappa, beta')"),
        BoundFunction("U3", Rect(0.0, 0.0, 0.0, PI), _ignore_x(U3), "segment bound with third side rho + kappa"),
        BoundFunction("U6", _SQUARE, U6, "triangle inequality through sigma"),
        BoundFunction("U7", _SQUARE, U7, "triangle inequality through the vertices"),
        BoundFunction("G", Rect(0.0, 1.0, 0.0, PI), G, "third side for beta' and kappa"),
        BoundFunction("L1", _SQUARE, L1, "L with a single colatitude"),
        BoundFunction("L2", Rect(0.0, PI / 2, 0.0, PI), L2, "distance to the meridian"),
        BoundFunction("I_case1", Rect(PI - 2, 2.0, 0.7, 1.4), I_case1, "min(U1, U2, U6) - L - zeta_3"),
        BoundFunction("I_k14", Rect(PI / 2, 2.0, 1.4, PI), I_k14, "min(U6, U7) - L - zeta_3"),
        BoundFunction("I_case2", Rect(PI / 2 - 1, PI / 2, 0.3, PI), I_case2, "G - max(L1, L2) - zeta_3"),
        BoundFunction("I_u3", Rect(PI - 2, PI - 2, 0.3, 0.7), I_u3, "U3 - L(pi - 2, .) - zeta_3"),
        BoundFunction("pi_minus_L", _SQUARE, pi_minus_L, "always >= 0; refutation sanity check"),
    ]
}

ALIASES = {
    "case1": "I_case1",
    "k14": "I_k14",
    "case2": "I_case2",
    "u3-minus-l": "I_u3",
    "u3": "U3",
}


def get_function(name: str) -> BoundFunction:
    key = ALIASES.get(name, name)
    try:
        return FUNCTIONS[key]
    except KeyError:
        raise KeyError(f"unknown bound function {name!r}") from None


def check_domain(fn: BoundFunction, rect: Rect) -> None:
    if not fn.domain.contains(rect):
        raise DomainError(f"{rect.as_tuple()} is outside the domain {fn.domain.as_tuple()} of {fn.name}")


def eval_rows(name: str, x, y) -> np.ndarray:
    fn = get_function(name)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = fn.domain
    inside = (
        (x >= d.x_lo - DOMAIN_TOL) & (x <= d.x_hi + DOMAIN_TOL) & (y >= d.y_lo - DOMAIN_TOL) & (y <= d.y_hi + DOMAIN_TOL)
    )
    if not np.all(inside):
        raise DomainError(f"points outside the domain {d.as_tuple()} of {fn.name}")
    out = np.asarray(fn.rows(x, y), dtype=float)
    if np.any(np.isnan(out)):
        raise NumericIntegrityError(f"{fn.name} produced NaN")
    return out


def eval_bound(name: str, x: float, y: float) -> float:
    return float(eval_rows(name, np.array([x]), np.array([y]))[0])
