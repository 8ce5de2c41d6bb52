import math

import mpmath as mp
import numpy as np
import pytest

from ghsphere import bounds as B
from ghsphere.correspondences import FnMap
from ghsphere.errors import DomainError, NumericIntegrityError
from ghsphere.sphere import TriangleSides, dist_rows, max_dist_to_geodesic, max_dist_to_segment, right_triangle_hypotenuse
from oracles import mp_C, mp_G, mp_L, mp_L2, mp_U1, mp_U2, mp_U3, mp_U6, mp_U7

PI = math.pi
RHO = B.RHO


def test_constants():
    assert B.ZETA3 == pytest.approx(math.acos(-0.25), abs=0)
    assert math.cos(RHO) == pytest.approx(0.25, abs=1e-15)


@pytest.mark.parametrize("x,k", [(PI - 2, 0.7), (1.5, 1.0), (2.0, 1.4), (1.2, 0.9), (PI - 2, 1.4)])
def test_two_argument_functions_match_mpmath(x, k):
    X, K = mp.mpf(x), mp.mpf(k)
    assert B.L(x, k) == pytest.approx(float(mp_L(X, K)), abs=1e-13)
    assert B.U1(x, k) == pytest.approx(float(mp_U1(X, K)), abs=1e-12)
    assert B.U2(x, k) == pytest.approx(float(mp_U2(X, K)), abs=1e-12)
    assert B.U6(x, k) == pytest.approx(float(mp_U6(X, K)), abs=1e-13)
    assert B.U7(x, k) == pytest.approx(float(mp_U7(X, K)), abs=1e-13)


@pytest.mark.parametrize("k", [0.3, 0.5, 0.7, 1.0, 1.4])
def test_kappa_functions_match_mpmath(k):
    K = mp.mpf(k)
    assert B.C(k) == pytest.approx(float(mp_C(K)), abs=1e-14)
    assert B.U3(k) == pytest.approx(float(mp_U3(K)), abs=1e-12)
    for b in (0.0, 0.3, 0.8):
        assert B.G(b, k) == pytest.approx(float(mp_G(K, mp.mpf(b))), abs=1e-12)
    for a in (0.6, 1.2):
        assert B.L2(a, k) == pytest.approx(float(mp_L2(mp.mpf(a), K)), abs=1e-13)


def test_L_examples():
    assert B.L(PI - 2, 0.7) == pytest.approx(float(mp_L(mp.pi - 2, mp.mpf("0.7"))), abs=1e-15)
    assert B.L(PI - 2, 0.7) == pytest.approx(0.3726901221968542, abs=1e-15)
    x = np.linspace(0, PI, 101)
    assert np.max(np.abs(B.L(x, PI) - x)) < 1e-14
    assert B.L(1.0, 0.0) == 0.0


def test_C_is_negative_and_one_lipschitz():
    k = np.arange(0.3, 1.5 + 1e-12, 1e-4)
    c = B.C(k)
    assert np.all(c < 0)
    assert np.max(np.abs(np.diff(c)) / 1e-4) <= 1.0


def test_radicand_floor_on_case1_grid():
    from ghsphere.verifier import grid_axis

    xs = grid_axis(PI - 2, 2.0, 1e-3)
    ks = grid_axis(0.7, 1.4, 1e-3)
    X, K = np.meshgrid(xs, ks, indexing="ij")
    q = B.gram_radicand(B.C(K), np.cos(B.kappa2(X, K)))
    assert q.min() >= 0.15
    # and the stated intermediate step 3 C^2 / 4 >= 0.15
    assert np.all(q >= 0.75 * B.C(K) ** 2 - 1e-15)


def test_u3_is_the_geodesic_bound():
    rho = PI - B.ZETA3
    for k in np.linspace(0.3, 0.7, 401):
        sides = TriangleSides(rho, math.acos(float(B.C(k))), rho + k)
        assert float(B.U3(k)) == pytest.approx(max_dist_to_geodesic(sides), abs=1e-10)


def test_u3_against_segment_maximum():
    # U3 uses the full geodesic formula.  For kappa >= 0.3153 the interior
    # critical point lies on the segment and both agree; below it the
    # segment maximum sits at an endpoint and U3 is a strictly larger bound.
    rho = PI - B.ZETA3
    ks = np.linspace(0.3, 0.7, 4001)
    seg = np.array([max_dist_to_segment(TriangleSides(rho, math.acos(float(B.C(k))), rho + k)) for k in ks])
    u3 = B.U3(ks)
    hi = ks >= 0.3153
    assert np.max(np.abs(u3[hi] - seg[hi])) < 1e-10
    assert np.all(u3 >= seg - 1e-12)
    assert np.any(u3[~hi] > seg[~hi] + 1e-6)


def test_u3_minus_L_negative_on_strip():
    k = np.linspace(0.3, 0.7, 1000)
    assert np.all(B.I_u3(PI - 2, k) < 0)


def test_case1_preview_grid_negative():
    x = np.linspace(PI - 2, 2.0, 200)
    k = np.linspace(0.7, 1.4, 200)
    X, K = np.meshgrid(x, k, indexing="ij")
    assert np.all(B.I_case1(X, K) < 0)


def test_u3_seam_matches_segment_rule():
    rho = PI - B.ZETA3
    for k in np.linspace(0.3, PI, 300):
        sides = TriangleSides(rho, math.acos(float(B.C(k))), min(PI, rho + k))
        if rho + k <= PI:
            assert float(B.U3(k)) >= max_dist_to_segment(sides) - 1e-10
    assert B.U3(1.2) == PI and B.U3(1.1) < PI


def test_u1_seam_takes_pi():
    # a point with kappa_2 large enough that the three sides close up
    x, k = 0.0, 3.0
    assert bool(B.u1_on_seam(x, k))
    assert B.U1(x, k) == PI


def test_integrity_and_domain_errors():
    with pytest.raises(NumericIntegrityError):
        B.safe_acos(1.0 + 1e-9)
    assert B.safe_acos(1.0 + 1e-13) == 0.0
    with pytest.raises(NumericIntegrityError):
        B.safe_sqrt(-1e-9)
    with pytest.raises(DomainError):
        B.eval_bound("U1", 2.5, 1.0)
    with pytest.raises(DomainError):
        B.Rect(1.0, 0.0, 0.0, 1.0)
    with pytest.raises(KeyError):
        B.get_function("nope")
    assert B.get_function("case1").name == "I_case1"
    assert B.get_function("u3-minus-l").name == "I_u3"


def test_pi_minus_L_is_never_negative():
    x = np.linspace(0, PI, 300)
    X, K = np.meshgrid(x, x)
    assert B.pi_minus_L(X, K).min() >= 0


# ---- soundness against sampled F_3 pairs ---------------------------------------


def _cone_pairs(count, seed, box):
    """Pairs of F_3 source points with colatitudes above pi/2 - 1 in distinct cones.

    With ``box`` the pairs are built directly with kappa in [0.7, 1.4] and
    alpha + alpha' <= 2; otherwise both points are uniform.
    """
    rel = FnMap(3)
    rng = np.random.default_rng(seed)
    out = []
    got = 0
    while got < count:
        m = 4 * count
        s = rng.standard_normal((m, 4))
        s /= np.linalg.norm(s, axis=1, keepdims=True)
        if box:
            a = rng.uniform(PI / 2 - 1, 3 - PI / 2, m)
            ap = rng.uniform(PI / 2 - 1, np.minimum(PI / 2, 2.0 - a))
            t = rng.standard_normal((m, 4))
            t -= np.sum(t * s, axis=1, keepdims=True) * s
            t /= np.linalg.norm(t, axis=1, keepdims=True)
            k = rng.uniform(0.7, 1.4, m)
            sp = np.cos(k)[:, None] * s + np.sin(k)[:, None] * t
            x = np.hstack([np.sin(a)[:, None] * s, np.cos(a)[:, None]])
            xp = np.hstack([np.sin(ap)[:, None] * sp, np.cos(ap)[:, None]])
        else:
            v = rng.standard_normal((2 * m, 5))
            v /= np.linalg.norm(v, axis=1, keepdims=True)
            v[:, -1] = np.abs(v[:, -1])
            x, xp = v[:m], v[m:]
        sx, ax, kx, okx = rel.decompose_rows(x)
        sp_, ap_, kp, okp = rel.decompose_rows(xp)
        keep = okx & okp & (kx != kp) & (ax > PI / 2 - 1) & (ap_ > PI / 2 - 1)
        out.append((x[keep], xp[keep], sx[keep], sp_[keep], ax[keep], ap_[keep]))
        got += int(keep.sum())
    cols = [np.concatenate(c)[:count] for c in zip(*out)]
    x, xp, sx, sp, a, ap = cols
    fx, _ = rel.image_rows(x)
    fp, _ = rel.image_rows(xp)
    return {
        "d": dist_rows(x, xp),
        "dF": dist_rows(fx, fp),
        "s": a + ap,
        "k": dist_rows(sx, sp),
        "x": x,
        "fx": fx,
        "a": a,
    }


@pytest.fixture(scope="module")
def uniform_pairs():
    return _cone_pairs(100_000, 1, box=False)


@pytest.fixture(scope="module")
def box_pairs():
    return _cone_pairs(100_000, 2, box=True)


def test_L_is_a_lower_bound(uniform_pairs, box_pairs):
    for p in (uniform_pairs, box_pairs):
        assert np.all(p["d"] >= B.L(p["s"], p["k"]) - 1e-9)


def test_upper_bounds_hold_in_box(box_pairs):
    p = box_pairs
    assert np.all((p["k"] >= 0.7 - 1e-9) & (p["k"] <= 1.4 + 1e-9) & (p["s"] <= 2.0))
    u = np.minimum(np.minimum(B.U1(p["s"], p["k"]), B.U2(p["s"], p["k"])), B.U6(p["s"], p["k"]))
    assert np.all(p["dF"] <= u + 1e-9)


def test_each_upper_bound_holds_in_box(box_pairs):
    p = box_pairs
    for f in (B.U1, B.U2, B.U6, B.U7):
        assert np.all(p["dF"] <= f(p["s"], p["k"]) + 1e-9), f.__name__


def test_large_distortion_pairs_sit_in_box(uniform_pairs):
    p = uniform_pairs
    dis = p["dF"] - p["d"]
    hot = dis > B.ZETA3 - 0.05
    assert np.all((p["k"][hot] >= 0.65) & (p["k"][hot] <= 1.45))
    assert np.all((p["s"][hot] >= PI - 2 - 0.05) & (p["s"][hot] <= 2.05))
    # the proof leaves a margin of about 0.08 here, so random pairs stay well clear
    assert dis.max() < B.ZETA3 - 0.05


def test_distance_to_image_bounded_by_A(uniform_pairs):
    p = uniform_pairs
    e = PI / 2 - p["a"]
    A = right_triangle_hypotenuse(e, RHO * e)
    fx = np.hstack([p["fx"], np.zeros((len(p["fx"]), 1))])
    assert np.all(dist_rows(p["x"], fx) <= A + 1e-12)


def _h(s):
    return np.sin(s / 2) * np.cos(RHO * (PI / 2 - s / 2))


def test_colatitude_sum_bound():
    bound = math.sqrt(3) / (2 * math.sqrt(2))
    assert bound == pytest.approx(math.cos(B.ZETA3 / 2), abs=1e-15)
    s = np.linspace(PI - 2, PI, 100_001)
    h = _h(s)
    assert np.all(np.diff(h) > 0)
    # the feasible set is s <= s* with s* just below 2, so s < 2 follows
    s_star = float(mp.findroot(lambda t: mp.sin(t / 2) * mp.cos(mp.acos(0.25) * (mp.pi / 2 - t / 2)) - mp.sqrt(3) / (2 * mp.sqrt(2)), 1.99))
    assert 1.99 < s_star < 2.0
    assert np.all(h[s <= s_star - 1e-12] <= bound)
    assert np.all(h[s > s_star + 1e-12] > bound)
    assert _h(2.0) > bound
