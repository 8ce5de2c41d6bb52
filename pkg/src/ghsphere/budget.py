"""Uniform-continuity budgets that turn a finite grid check into a statement
about every point of a rectangle.

A budget bounds ``|f(p) - f(p')|`` for any two points of the rectangle whose
coordinates differ by at most ``delta`` per axis.  Each bound function gets a
:class:`BudgetTerm` built from Lipschitz constants or a modulus of continuity
evaluated over the rectangle.  A composite then combines terms as a sum of
groups, each group contributing the largest modulus among its members
(the oscillation of a min or max never exceeds that of its worst argument).
A rounding slack of 1e-12 per composed arccos/sqrt is added on top.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ghsphere import bounds as B
from ghsphere.errors import BudgetInfeasibleError, ConfigurationError

ROUNDING_SLACK = 1e-12
C_PIECES = 512


def cos_range(lo: float, hi: float) -> tuple[float, float]:
    """Exact (min, max) of cos on [lo, hi]."""
    vals = [math.cos(lo), math.cos(hi)]
    k = math.ceil(lo / math.pi)
    while k * math.pi <= hi:
        vals.append(1.0 if k % 2 == 0 else -1.0)
        k += 1
    return min(vals), max(vals)


def abs_cos_max(lo: float, hi: float) -> float:
    a, b = cos_range(lo, hi)
    return max(abs(a), abs(b))


def sin_abs_max(lo: float, hi: float) -> float:
    """max |sin| on [lo, hi]."""
    return abs_cos_max(lo - math.pi / 2, hi - math.pi / 2)


def _g_range(c_lo: float, c_hi: float) -> tuple[float, float]:
    # g(c) = 16c^2 - 2c + 1, a parabola with vertex at c = 1/16
    g = lambda c: 16 * c * c - 2 * c + 1
    lo = g(min(max(1 / 16, c_lo), c_hi))
    return lo, max(g(c_lo), g(c_hi))


def lipschitz_C(k_lo: float, k_hi: float, pieces: int = C_PIECES) -> float:
    """Upper bound for |C'(kappa)| on [k_lo, k_hi] from interval bounds on subintervals.

    With c = cos(zeta_3 - kappa) and g = 1 - 2c + 16c^2 we have
    C' = -(32c - 2) sin(zeta_3 - kappa) / (2 sqrt(15 g)).
    """
    if k_hi <= k_lo:
        pieces = 1
    edges = [k_lo + (k_hi - k_lo) * i / pieces for i in range(pieces + 1)]
    best = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        c_lo, c_hi = cos_range(B.ZETA3 - b, B.ZETA3 - a)
        num = max(abs(32 * c_lo - 2), abs(32 * c_hi - 2)) * sin_abs_max(B.ZETA3 - b, B.ZETA3 - a)
        g_lo, _ = _g_range(c_lo, c_hi)
        best = max(best, num / (2 * math.sqrt(15 * g_lo)))
    return best


def abs_C_max(k_lo: float, k_hi: float) -> float:
    c_lo, c_hi = cos_range(B.ZETA3 - k_hi, B.ZETA3 - k_lo)
    return math.sqrt(_g_range(c_lo, c_hi)[1] / 15)


@dataclass(frozen=True)
class BudgetTerm:
    """Oscillation bound for one sub-function over the rectangle."""

    name: str
    contribution: float
    rule: str
    constants: tuple[tuple[str, float], ...] = ()
    ops: int = 1  # composed arccos/sqrt evaluations, for the rounding slack


def _lipschitz(name: str, lx: float, ly: float, dx: float, dy: float, rule: str, ops: int) -> BudgetTerm:
    return BudgetTerm(name, lx * dx + ly * dy, rule, (("lip_x", lx), ("lip_y", ly)), ops)


def term_L(name: str, rect: B.Rect, dx: float, dy: float) -> BudgetTerm:
    ly = math.sin(min(rect.x_hi, math.pi) / 2)
    return _lipschitz(name, 1.0, ly, dx, dy, "distance of two points moving at speed 1/2 and sin(x/2)", 1)


def term_L2(rect: B.Rect, dx: float, dy: float) -> BudgetTerm:
    return _lipschitz("L2", 1.0, 1.0, dx, dy, "distance to a meridian, 1-Lipschitz in each argument", 1)


def term_U6(rect: B.Rect, dx: float, dy: float) -> BudgetTerm:
    return _lipschitz("U6", B.RHO, 1.0, dx, dy, "linear form", 0)


def term_U7(rect: B.Rect, dx: float, dy: float) -> BudgetTerm:
    return _lipschitz("U7", B.RHO, 0.0, dx, dy, "linear form", 0)


def g_kappa_lipschitz(beta_lo: float, beta_hi: float, k_lo: float, k_hi: float) -> float:
    """Lipschitz constant of G in kappa.

    dG/dtheta <= min(sin zeta_3, sin(rho*beta)) by the sine rule, and with
    c = cos(rho + kappa) the angle theta satisfies
    (dtheta/dkappa)^2 = 8(1 - c)/(7 - 8c) = 1 + 1/(7 - 8c).
    """
    _, c_max = cos_range(B.RHO + k_lo, B.RHO + k_hi)
    if c_max >= 7 / 8:
        raise ConfigurationError("G has no kappa-Lipschitz bound on this range")
    l_theta = math.sqrt(1 + 1 / (7 - 8 * c_max))
    side = min(math.sin(B.ZETA3), sin_abs_max(B.RHO * beta_lo, B.RHO * beta_hi))
    return side * l_theta


def term_G(name: str, beta_lo: float, beta_hi: float, rect: B.Rect, d_beta: float, dy: float, lx: float) -> BudgetTerm:
    ly = g_kappa_lipschitz(beta_lo, beta_hi, rect.y_lo, rect.y_hi)
    return _lipschitz(name, lx, ly, d_beta, dy, "side rho*beta' moves at rate rho; sine rule for the angle", 1)


def _gram_modulus(b_abs: float, c_abs: float, db: float, dc: float, seam: float) -> tuple[float, float]:
    """Modulus of pi - arcsin(sqrt(T)) with T = (16/15) Gram(1/4, b, c).

    Gram = 1 + bc/2 - 1/16 - b^2 - c^2; the partials are c/2 - 2b and b/2 - 2c.
    arcsin(sqrt(.)) on [0, 1] has modulus arcsin(sqrt(d)).
    """
    d_t = 16 / 15 * ((c_abs / 2 + 2 * b_abs) * db + (b_abs / 2 + 2 * c_abs) * dc) + seam
    return math.asin(math.sqrt(min(1.0, d_t))), d_t


def term_U1(rect: B.Rect, dx: float, dy: float) -> BudgetTerm:
    lc = lipschitz_C(rect.y_lo, rect.y_hi)
    b_abs = abs_C_max(rect.y_lo, rect.y_hi)
    k2_lo = rect.y_lo + B.RHO * (math.pi / 2 - rect.x_hi / 2)
    k2_hi = rect.y_hi + B.RHO * (math.pi / 2 - rect.x_lo / 2)
    c_abs = abs_cos_max(k2_lo, k2_hi)
    dc = sin_abs_max(k2_lo, k2_hi) * (dy + B.RHO / 2 * dx)
    # at sides summing to 2*pi - g, Gram = 4 sin(s) prod sin(s - side) <= 2g
    seam = 16 / 15 * 2 * B.SEAM_GUARD
    omega, d_t = _gram_modulus(b_abs, c_abs, lc * dy, dc, seam)
    consts = (("lip_C", lc), ("abs_C_max", b_abs), ("abs_cos_k2_max", c_abs), ("delta_T", d_t))
    return BudgetTerm("U1", omega, "arcsin(sqrt(dT)) with dT from Gram partials, C slope and seam", consts, 3)


def term_U3(rect: B.Rect, dy: float) -> BudgetTerm:
    lc = lipschitz_C(rect.y_lo, rect.y_hi)
    b_abs = abs_C_max(rect.y_lo, rect.y_hi)
    c_abs = abs_cos_max(B.RHO + rect.y_lo, B.RHO + rect.y_hi)
    dc = sin_abs_max(B.RHO + rect.y_lo, B.RHO + rect.y_hi) * dy
    seam = 16 / 15 * 2 * B.SEAM_GUARD
    omega, d_t = _gram_modulus(b_abs, c_abs, lc * dy, dc, seam)
    consts = (("lip_C", lc), ("abs_C_max", b_abs), ("abs_cos_max", c_abs), ("delta_T", d_t))
    return BudgetTerm("U3", omega, "arcsin(sqrt(dT)) with dT from Gram partials, C slope and seam", consts, 3)


def term_C(rect: B.Rect, dy: float) -> BudgetTerm:
    lc = lipschitz_C(rect.y_lo, rect.y_hi)
    return BudgetTerm("C", lc * dy, "interval bound on C' over subintervals", (("lip_C", lc),), 1)


@dataclass(frozen=True)
class ContinuityBudget:
    fn_name: str
    rect: B.Rect
    spacing: float
    delta: float
    epsilon: float
    terms: tuple[BudgetTerm, ...]
    groups: tuple[tuple[str, ...], ...]
    rounding: float = field(default=0.0)

    def term(self, name: str) -> BudgetTerm:
        for t in self.terms:
            if t.name == name:
                return t
        raise KeyError(name)

    def compose(self) -> float:
        """Recompute epsilon from the ledger."""
        by_name = {t.name: t.contribution for t in self.terms}
        return sum(max(by_name[n] for n in g) for g in self.groups) + self.rounding

    @property
    def formula(self) -> str:
        return " + ".join(f"max({', '.join(g)})" if len(g) > 1 else g[0] for g in self.groups) + " + rounding"


def _terms_for(name: str, rect: B.Rect, dx: float, dy: float):
    """(terms, groups) for one function."""
    if name in ("L", "L1", "pi_minus_L"):
        return [term_L("L", rect, dx, dy)], [("L",)]
    if name == "L2":
        return [term_L2(rect, dx, dy)], [("L2",)]
    if name == "C":
        return [term_C(rect, dy)], [("C",)]
    if name == "U1":
        return [term_U1(rect, dx, dy)], [("U1",)]
    if name == "U2":
        b_lo, b_hi = B.beta_prime(rect.x_lo), B.beta_prime(rect.x_hi)
        return [term_G("U2", float(b_lo), float(b_hi), rect, dx, dy, B.RHO)], [("U2",)]
    if name == "U3":
        return [term_U3(rect, dy)], [("U3",)]
    if name == "U6":
        return [term_U6(rect, dx, dy)], [("U6",)]
    if name == "U7":
        return [term_U7(rect, dx, dy)], [("U7",)]
    if name == "G":
        return [term_G("G", rect.x_lo, rect.x_hi, rect, dx, dy, B.RHO)], [("G",)]
    if name == "I_case1":
        t2, _ = _terms_for("U2", rect, dx, dy)
        terms = [term_U1(rect, dx, dy), *t2, term_U6(rect, dx, dy), term_L("L", rect, dx, dy)]
        return terms, [("U1", "U2", "U6"), ("L",)]
    if name == "I_k14":
        terms = [term_U6(rect, dx, dy), term_U7(rect, dx, dy), term_L("L", rect, dx, dy)]
        return terms, [("U6", "U7"), ("L",)]
    if name == "I_case2":
        b_lo, b_hi = rect.x_lo - math.pi / 2 + 1, rect.x_hi - math.pi / 2 + 1
        terms = [term_G("G", b_lo, b_hi, rect, dx, dy, B.RHO), term_L("L1", rect, dx, dy), term_L2(rect, dx, dy)]
        return terms, [("G",), ("L1", "L2")]
    if name == "I_u3":
        fixed = B.Rect(rect.x_lo, rect.x_lo, rect.y_lo, rect.y_hi)
        return [term_U3(rect, dy), term_L("L", fixed, 0.0, dy)], [("U3",), ("L",)]
    raise ConfigurationError(f"no continuity budget for {name!r}")


def derive_budget(fn_name: str, rect: B.Rect | None = None, spacing: float = 1e-3, margin: float | None = None) -> ContinuityBudget:
    """Budget for a grid of the given spacing over ``rect`` (default: the function's domain).

    If ``margin`` is given and the derived epsilon exceeds it, raise
    :class:`BudgetInfeasibleError` carrying the smallest workable margin.
    """
    fn = B.get_function(fn_name)
    rect = rect or fn.domain
    B.check_domain(fn, rect)
    if not (spacing > 0 and math.isfinite(spacing)):
        raise ConfigurationError(f"spacing must be positive, got {spacing!r}")
    delta = spacing / 2
    dx = 0.0 if rect.degenerate_x else delta
    dy = 0.0 if rect.y_lo == rect.y_hi else delta
    terms, groups = _terms_for(fn.name, rect, dx, dy)
    rounding = ROUNDING_SLACK * sum(t.ops for t in terms)
    budget = ContinuityBudget(fn.name, rect, spacing, delta, 0.0, tuple(terms), tuple(groups), rounding)
    eps = budget.compose()
    budget = ContinuityBudget(fn.name, rect, spacing, delta, eps, tuple(terms), tuple(groups), rounding)
    if margin is not None and eps > margin:
        raise BudgetInfeasibleError(
            f"{fn.name} at spacing {spacing:g} needs margin >= {eps:.6g}, got {margin:g}", eps
        )
    return budget
