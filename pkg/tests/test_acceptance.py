"""One test per acceptance criterion; the terminal summary prints a line for each."""

import math
import time

import mpmath as mp
import numpy as np
import pytest

from ghsphere import bounds as B
from ghsphere import cli
from ghsphere.correspondences import FnMap, OddMap
from ghsphere.distortion import adversarial_probe, fig8_points, fig8_source_distance, sample_distortion
from ghsphere.simplex import build_simplex, gh_target, zeta
from ghsphere.sphere import (
    TriangleSides,
    dist_rows,
    max_dist_to_segment,
    right_triangle_hypotenuse,
    slerp_rows,
    triangle_third_side,
)
from ghsphere.verifier import PROVEN, make_job, verify_grid
from oracles import brute_segment_max, mp_two_point_distance

PI = math.pi
SAMPLES = 2000  # 1999000 pairs per run, above the 1e5 floor


def detail(record_property, text):
    record_property("detail", text)


@pytest.mark.acceptance(1)
def test_simplex_constants(record_property):
    t0 = time.perf_counter()
    worst_ip = worst_c = 0.0
    for n in range(1, 9):
        v = build_simplex(n).vertices
        g = v @ v.T
        off = g[~np.eye(n + 2, dtype=bool)]
        worst_ip = max(worst_ip, float(np.max(np.abs(off + 1 / (n + 1)))))
        worst_c = max(worst_c, float(np.max(np.abs(v.mean(axis=0)))))
    elapsed = time.perf_counter() - t0
    detail(record_property, f"max ip err {worst_ip:.1e}, centroid {worst_c:.1e}, {elapsed:.3f}s")
    assert worst_ip < 1e-10 and worst_c < 1e-10 and elapsed < 1.0


@pytest.mark.acceptance(2)
def test_even_correspondence_bound(record_property):
    t0 = time.perf_counter()
    parts = []
    for n in (1, 2, 3):
        bound = 2 * gh_target(n)
        r = sample_distortion("R2n", n, SAMPLES, seed=n)
        p = adversarial_probe("R2n", n, "voronoi-straddle")
        parts.append(f"n={n}: {r.max_distortion:.5f}/{bound:.5f} probe {bound - p.max_distortion:.1e} below")
        assert r.helmet and r.pairs >= 100_000
        assert r.max_distortion <= bound + 1e-9
        assert p.max_distortion >= bound - 1e-4
    elapsed = time.perf_counter() - t0
    detail(record_property, "; ".join(parts) + f"; {elapsed:.1f}s")
    assert elapsed < 120


@pytest.mark.acceptance(3)
def test_odd_correspondence_bound(record_property):
    t0 = time.perf_counter()
    parts = []
    for n in (1, 2):
        bound = 2 * gh_target(n)
        r = sample_distortion("Phi", n, SAMPLES, seed=10 + n)
        assert r.pairs >= 100_000 and r.max_distortion <= bound + 1e-9
        rel = OddMap(n)
        x = np.random.default_rng(n).standard_normal((100_000, 2 * n + 2))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        x[:, -1] = np.abs(x[:, -1])
        theta, ok = rel.angle_rows(x)
        step = PI / (2 * n + 1)
        off = (theta[ok] + step) % (2 * step)
        outside = int(np.sum((off > step + 1e-12) & (off < 2 * step - 1e-12)))
        parts.append(f"n={n}: {r.max_distortion:.5f}/{bound:.5f}, {outside} of {ok.sum()} outside union of I_k")
        assert outside == 0
    elapsed = time.perf_counter() - t0
    detail(record_property, "; ".join(parts) + f"; {elapsed:.1f}s")
    assert elapsed < 120


@pytest.mark.acceptance(4)
def test_f3_bound(record_property):
    t0 = time.perf_counter()
    z = zeta(3)
    r = sample_distortion("Fn", 3, SAMPLES, seed=3)
    p = adversarial_probe("Fn", 3, "voronoi-straddle")
    elapsed = time.perf_counter() - t0
    detail(record_property, f"sampled {r.max_distortion:.5f}, probe {p.max_distortion:.7f}, zeta_3 {z:.7f}; {elapsed:.1f}s")
    assert r.pairs >= 100_000 and r.max_distortion <= z + 1e-9
    assert p.max_distortion >= z - 0.05
    assert elapsed < 120


@pytest.mark.acceptance(5)
def test_fig8_failure_for_n7(record_property):
    r = adversarial_probe("Fn", 7, "fig8-config")
    limit = math.acos(math.cos((PI - 1) / 2) ** 2)
    x = fig8_points(FnMap(2000))
    d_large = float(dist_rows(x[0], x[1]))
    detail(
        record_property,
        f"image {r.image_distance:.8f}, d+zeta_7 = {r.source_distance + zeta(7):.6f}, n=2000 d {d_large:.6f} vs limit {limit:.6f}",
    )
    assert abs(r.image_distance - PI) < 1e-3
    assert r.source_distance + zeta(7) < PI - 1e-3
    assert abs(d_large - limit) < 1e-3
    assert abs(fig8_source_distance(None) - limit) < 1e-15
    assert abs(limit - 1.339) < 1e-3


@pytest.mark.acceptance(6)
@pytest.mark.parametrize("name", ["I_case1", "I_k14", "I_case2"])
def test_certified_desk_scale(name, record_property):
    t0 = time.perf_counter()
    job = make_job(name, 1e-3)  # margin = derived epsilon, so the budget validates it
    cert = verify_grid(job, workers=8)
    elapsed = time.perf_counter() - t0
    detail(record_property, f"{name}: worst {cert.worst_value:.5f}, margin {job.margin:.5f}, {cert.points} points, {elapsed:.1f}s")
    assert cert.verdict == PROVEN
    assert elapsed < 60


@pytest.mark.acceptance(7)
@pytest.mark.paper_scale
def test_certified_paper_scale(record_property, tmp_path):
    job = make_job("I_case1", 1e-5, margin=0.08)
    cert = verify_grid(job, workers=cli.default_workers())
    (tmp_path / "certificate.txt").write_text(cert.to_text(timing=True))
    detail(record_property, f"worst {cert.worst_value:.6f} over {cert.points} points, {cert.wall_time:.0f}s")
    assert cert.verdict == PROVEN
    assert cert.worst_value < -0.08


def _feasible_triangles(rng, count):
    out = []
    while len(out) < count:
        a, b, c = rng.uniform(0.05, PI - 0.05, 3)
        if a < b + c and b < a + c and c < a + b and a + b + c < 2 * PI - 0.05:
            out.append((a, b, c))
    return out


@pytest.mark.acceptance(8)
def test_oracle_equivalence(record_property):
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    seg_err = max(
        abs(max_dist_to_segment(TriangleSides(a, b, c)) - brute_segment_max(a, b, c))
        for a, b, c in _feasible_triangles(rng, 100)
    )
    x = rng.uniform(0, PI, 10_000)
    k = rng.uniform(0, PI, 10_000)
    got = B.eval_rows("L", x, k)
    ref = np.array([float(mp_two_point_distance(xi, ki)) for xi, ki in zip(x, k)])
    l_err = float(np.max(np.abs(got - ref)))
    elapsed = time.perf_counter() - t0
    detail(record_property, f"segment err {seg_err:.1e}, L err {l_err:.1e}; {elapsed:.1f}s")
    assert seg_err < 1e-5 and l_err < 1e-10
    assert elapsed < 60


def _sphere_point(colat, az):
    return np.stack([np.sin(colat) * np.cos(az), np.sin(colat) * np.sin(az), np.cos(colat)], axis=-1)


@pytest.mark.acceptance(9)
def test_triangle_facts_and_concavity(record_property):
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    m = 10_000
    # right angle or less at A with both sides at most pi/2 keeps the third side at most pi/2
    b, c, ang = rng.uniform(0, PI / 2, (3, m))
    v1 = sum(triangle_third_side(bi, ci, ai) > PI / 2 + 1e-12 for bi, ci, ai in zip(b, c, ang))

    # A at the pole, B and C at colatitudes c and b; angle at A is the azimuth gap
    got = 0
    v2 = 0
    while got < m:
        b, c = rng.uniform(0, PI / 2, (2, m))
        ang = rng.uniform(0, PI, m)
        Bp, Cp = _sphere_point(c, 0.0 * c), _sphere_point(b, ang)
        a = dist_rows(Bp, Cp)
        keep = a >= PI / 2
        b, c, ang, a = b[keep], c[keep], ang[keep], a[keep]
        lb, lc = rng.uniform(0, 1, (2, keep.sum()))
        d = dist_rows(_sphere_point(lb * c, 0.0 * c), _sphere_point(lc * b, ang))
        v2 += int(np.sum(d > a + 1e-10)) + int(np.sum(ang < a - 1e-12))
        got += int(keep.sum())

    # segment from p toward x keeps at least lambda a / 2 from the hemisphere H' around p'
    p, pp, x = (rng.standard_normal((m, 4)) for _ in range(3))
    p, pp, x = (u / np.linalg.norm(u, axis=1, keepdims=True) for u in (p, pp, x))
    center = pp - p
    center /= np.linalg.norm(center, axis=1, keepdims=True)
    x = np.where((np.sum(x * center, axis=1) > 0)[:, None], x - 2 * np.sum(x * center, axis=1, keepdims=True) * center, x)
    lam = rng.uniform(0, 1, m)
    z = slerp_rows(p, x, lam)
    to_h = dist_rows(z, center) - PI / 2
    v3 = int(np.sum(to_h < lam * dist_rows(p, pp) / 2 - 1e-10))

    rho = PI - B.ZETA3
    t = np.arange(1, 1000) * 1e-3
    h = 1e-4
    A = lambda s: right_triangle_hypotenuse(s, rho * s)
    second = A(t + h) - 2 * A(t) + A(t - h)
    v4 = int(np.sum(second >= 0))
    elapsed = time.perf_counter() - t0
    detail(record_property, f"violations: right-angle {v1}, shrunk triangle {v2}, hemisphere gap {v3}, A(t) concavity {v4} of {len(t)}; {elapsed:.1f}s")
    assert (v1, v2, v3, v4) == (0, 0, 0, 0)
    assert elapsed < 60


@pytest.mark.acceptance(10)
def test_determinism(record_property, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    commands = [
        ["sample", "--map", "Fn", "--n", "3", "--samples", "1500", "--seed", "7"],
        ["sample", "--map", "R2n", "--n", "2", "--samples", "1500", "--seed", "7"],
        ["sample", "--map", "Phi", "--n", "1", "--samples", "1500", "--seed", "7"],
        ["sample", "--map", "Fn", "--n", "7", "--probe", "fig8"],
        ["verify", "--ineq", "case2", "--spacing", "1e-3"],
        ["surface", "--fn", "I_k14", "--res", "100"],
    ]
    same = 0
    for i, argv in enumerate(commands):
        outs = []
        for rep in range(2):
            path = tmp_path / f"out{i}-{rep}.txt"
            cli.main(argv + ["--out", str(path)])
            outs.append(path.read_bytes())
        same += outs[0] == outs[1]
    detail(record_property, f"{same} of {len(commands)} commands byte-identical")
    assert same == len(commands)
