"""Seeded Monte Carlo distortion estimates, adversarial probes and surface export.

Random points come from normalized standard-Gaussian vectors.  Point ``i``
of a run with seed ``s`` is drawn from its own Philox stream
``Philox(key=s, counter=i << 128)``, so a point never depends on how many
other points were requested.  A draw outside the map's domain is replaced by
the next draw of the same stream.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ghsphere import bounds as B
from ghsphere.correspondences import EvenCorrespondence, FnMap, OddMap, angles_to_rows
from ghsphere.errors import ConfigurationError, DomainError, SamplingStarvationError
from ghsphere.simplex import classify_rows
from ghsphere.sphere import SpherePoint, dist_rows

MAX_REJECTIONS = 100
SAMPLE_CAP = 100_000
FIBER_EVERY = 8  # R2n: points with index % 8 == 7 are vertex-fiber elements
BLOCK_BUDGET = 4_000_000  # matrix entries per pairwise block
STRADDLE_EPS = 1e-6
FIG8_EPS = 1e-6

MAP_NAMES = {"r2n": "R2n", "phi": "Phi", "fn": "Fn"}
PROBES = ("voronoi-straddle", "fig8-config")


def canonical_map_name(name: str) -> str:
    try:
        return MAP_NAMES[name.lower()]
    except KeyError:
        raise ConfigurationError(f"unknown map {name!r}; choose from R2n, Phi, Fn") from None


def make_map(name: str, n: int):
    cls = {"R2n": EvenCorrespondence, "Phi": OddMap, "Fn": FnMap}[canonical_map_name(name)]
    return cls(n)


@dataclass(frozen=True)
class SampleReport:
    map_name: str
    n: int
    samples: int
    seed: int | None
    pairs: int
    max_distortion: float
    argmax_pair: tuple[SpherePoint, SpherePoint]
    argmax_images: tuple[SpherePoint, SpherePoint]
    bound: float
    source_distance: float
    image_distance: float
    helmet: bool = True
    probe: str | None = None

    @property
    def margin(self) -> float:
        return self.bound - self.max_distortion

    def to_text(self) -> str:
        f = lambda v: "%.17g" % v
        vec = lambda p: ",".join(f(c) for c in p.coords)
        rows = [
            ("map", self.map_name),
            ("n", str(self.n)),
            ("probe", self.probe or "none"),
            ("samples", str(self.samples)),
            ("seed", "none" if self.seed is None else str(self.seed)),
            ("helmet", str(self.helmet).lower()),
            ("pairs", str(self.pairs)),
            ("max_distortion", f(self.max_distortion)),
            ("bound", f(self.bound)),
            ("margin", f(self.margin)),
            ("argmax.source_distance", f(self.source_distance)),
            ("argmax.image_distance", f(self.image_distance)),
            ("argmax.x", vec(self.argmax_pair[0])),
            ("argmax.x_prime", vec(self.argmax_pair[1])),
            ("argmax.y", vec(self.argmax_images[0])),
            ("argmax.y_prime", vec(self.argmax_images[1])),
        ]
        return "".join(f"{k}={v}\n" for k, v in rows)


def point_stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=index << 128))


def _gaussian_unit(gen: np.random.Generator, width: int) -> np.ndarray:
    for _ in range(MAX_REJECTIONS):
        v = gen.standard_normal(width)
        nrm = np.linalg.norm(v)
        if nrm > 0:
            return v / nrm
    raise SamplingStarvationError("standard normal vector kept vanishing")


@dataclass
class Sample:
    """Accepted source points and their images."""

    x: np.ndarray
    y: np.ndarray


def draw_sample(rel, samples: int, seed: int, helmet: bool = True) -> Sample:
    """Draw ``samples`` related pairs (x, y) with per-point Philox streams.

    With ``helmet`` the points cover the whole source sphere and lower points
    use the mirrored relation; otherwise each point is folded into the upper
    half first.
    """
    width = rel.source_dim + 1
    xs = np.empty((samples, width))
    ys = np.empty((samples, rel.target_dim + 1))
    fiber = isinstance(rel, EvenCorrespondence)
    gens = {}
    for i in range(samples):
        gen = point_stream(seed, i)
        if fiber and i % FIBER_EVERY == FIBER_EVERY - 1:
            k = int(gen.integers(len(rel.vertices)))
            sign = 1 if gen.random() < 0.5 or not helmet else -1
            xs[i], ys[i] = rel.fiber_element(k, float(gen.random()), sign)
        else:
            gens[i] = gen
    # each pending point takes the next draw of its own stream until accepted
    pending = np.array(sorted(gens), dtype=int)
    for _ in range(MAX_REJECTIONS):
        if pending.size == 0:
            break
        v = np.stack([_gaussian_unit(gens[i], width) for i in pending])
        if not helmet:
            v = np.where(v[:, -1:] < 0, -v, v)
        y, ok = rel.helmet_rows(v)
        xs[pending[ok]], ys[pending[ok]] = v[ok], y[ok]
        pending = pending[~ok]
    if pending.size:
        raise SamplingStarvationError(
            f"point {pending[0]}: {MAX_REJECTIONS} consecutive draws left the domain"
        )
    return Sample(xs, ys)


@dataclass(frozen=True)
class PairMax:
    value: float
    i: int
    j: int
    pairs: int


def _gram_dist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # |a - b|^2 = 2 - 2<a, b> and |a + b|^2 = 2 + 2<a, b>; one matrix product per block
    g = a @ b.T
    return 2.0 * np.arctan2(np.sqrt(np.maximum(0.0, 2.0 - 2.0 * g)), np.sqrt(np.maximum(0.0, 2.0 + 2.0 * g)))


def _block_max(x, y, i0, i1) -> PairMax:
    dis = np.abs(_gram_dist(x[i0:i1], x) - _gram_dist(y[i0:i1], y))
    rows = np.arange(i0, i1)[:, None]
    cols = np.arange(len(x))[None, :]
    dis = np.where(cols > rows, dis, -1.0)
    flat = int(np.argmax(dis))
    bi, j = divmod(flat, len(x))
    n_pairs = int(np.sum(len(x) - 1 - np.arange(i0, i1)))
    return PairMax(float(dis.flat[flat]), i0 + bi, j, n_pairs)


def pairwise_max(x: np.ndarray, y: np.ndarray, workers: int = 1) -> PairMax:
    """Largest |d(x_i, x_j) - d(y_i, y_j)| over i < j, earliest (i, j) on ties.

    Blocks use Gram-matrix distances (absolute error about 1e-8 for nearly
    equal points); the winning pair is re-scored with the stable formula.
    """
    n = len(x)
    if n < 2:
        raise DomainError("need at least two points")
    block = max(1, BLOCK_BUDGET // n)
    spans = [(s, min(n, s + block)) for s in range(0, n - 1, block)]
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda s: _block_max(x, y, *s), spans))
    else:
        parts = [_block_max(x, y, *s) for s in spans]
    best = parts[0]
    for p in parts[1:]:
        if p.value > best.value:
            best = p
    exact = abs(float(dist_rows(x[best.i], x[best.j])) - float(dist_rows(y[best.i], y[best.j])))
    return PairMax(exact, best.i, best.j, sum(p.pairs for p in parts))


def _report(name, n, rel, x, y, pm: PairMax, samples, seed, helmet, probe=None) -> SampleReport:
    a, b = pm.i, pm.j
    return SampleReport(
        map_name=name,
        n=n,
        samples=samples,
        seed=seed,
        pairs=pm.pairs,
        max_distortion=pm.value,
        argmax_pair=(SpherePoint(x[a]), SpherePoint(x[b])),
        argmax_images=(SpherePoint(y[a]), SpherePoint(y[b])),
        bound=rel.bound(),
        source_distance=float(dist_rows(x[a], x[b])),
        image_distance=float(dist_rows(y[a], y[b])),
        helmet=helmet,
        probe=probe,
    )


def sample_distortion(
    map_name: str,
    n: int,
    samples: int,
    seed: int,
    helmet: bool = True,
    workers: int = 1,
    allow_large: bool = False,
) -> SampleReport:
    name = canonical_map_name(map_name)
    if samples < 2:
        raise ConfigurationError("samples must be >= 2")
    if samples > SAMPLE_CAP and not allow_large:
        raise ConfigurationError(f"samples above {SAMPLE_CAP} need allow_large")
    if not 0 <= seed < 2**64:
        raise ConfigurationError("seed must be a 64-bit unsigned integer")
    rel = make_map(name, n)
    s = draw_sample(rel, samples, seed, helmet)
    return _report(name, n, rel, s.x, s.y, pairwise_max(s.x, s.y, workers), samples, seed, helmet)


def _tangent_pair(a: np.ndarray, b: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Two points at distance eps straddling the bisector of a and b, a-side first."""
    m = a + b
    m /= np.linalg.norm(m)
    u = a - b
    u -= (u @ m) * m
    u /= np.linalg.norm(u)
    h = eps / 2
    return math.cos(h) * m + math.sin(h) * u, math.cos(h) * m - math.sin(h) * u


def straddle_points(rel, eps: float = STRADDLE_EPS) -> np.ndarray:
    """Source points for the voronoi-straddle probe (two rows)."""
    if isinstance(rel, FnMap):
        # cells 0 and 1 in the f = 0 cap, colatitude 0.3; the equatorial gap
        # is widened so the lifted points are eps apart
        v = rel.simplex.vertices
        s0, s1 = _tangent_pair(v[0], v[1], 2 * math.asin(math.sin(eps / 2) / math.sin(0.3)))
        lift = lambda s: np.append(math.sin(0.3) * s, math.cos(0.3))
        return np.stack([lift(s0), lift(s1)])
    v = rel.vertices
    # cells 0 and n carry roots 2*pi*n/(2n+1) apart
    x0, x1 = _tangent_pair(v[0], v[rel.n], eps)
    pad = rel.source_dim + 1 - len(x0)
    return np.stack([np.pad(x0, (0, pad)), np.pad(x1, (0, pad))])


def fig8_points(rel: FnMap, eps: float = FIG8_EPS) -> np.ndarray:
    """x and x' with sigma(x) ~ -p', sigma(x') ~ -p and colatitude (pi - 1)/2."""
    p, q = rel.simplex.vertices[0], rel.simplex.vertices[1]
    s = -q + eps * p
    s_prime = -p + eps * q
    a = (math.pi - 1) / 2
    pts = [np.append(math.sin(a) * v / np.linalg.norm(v), math.cos(a)) for v in (s, s_prime)]
    return np.stack(pts)


def fig8_source_distance(n: int | None) -> float:
    """Closed form for d(x, x') in the fig8 configuration; ``None`` gives the n -> infinity limit."""
    a = (math.pi - 1) / 2
    inner = 0.0 if n is None else 1.0 / (n + 1)
    return math.acos(math.cos(a) ** 2 - math.sin(a) ** 2 * inner)


def adversarial_probe(map_name: str, n: int, probe_kind: str) -> SampleReport:
    name = canonical_map_name(map_name)
    if probe_kind not in PROBES:
        raise ConfigurationError(f"unknown probe {probe_kind!r}; choose from {', '.join(PROBES)}")
    rel = make_map(name, n)
    if probe_kind == "fig8-config":
        if name != "Fn":
            raise ConfigurationError("fig8-config requires the Fn map")
        x = fig8_points(rel)
    else:
        x = straddle_points(rel)
    y, ok = rel.helmet_rows(x)
    if not ok.all():
        raise DomainError(f"{probe_kind} produced a point outside the domain")
    pm = pairwise_max(x, y)
    return _report(name, n, rel, x, y, pm, 2, None, True, probe_kind)


# ---- R2n in-case pair generators --------------------------------------------

R2N_CASES = (1, 2, 3, 4, 5, 6)


def _cell_points(rel: EvenCorrespondence, gen, count: int):
    """Upper-half points with their (non-boundary) cells."""
    width = rel.source_dim + 1
    out_x, out_k = [], []
    got = 0
    while got < count:
        v = gen.standard_normal((2 * count, width))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        v[:, -1] = np.abs(v[:, -1])
        k = classify_rows(v, rel.vertices)
        keep = k >= 0
        out_x.append(v[keep])
        out_k.append(k[keep])
        got += int(keep.sum())
    return np.concatenate(out_x)[:count], np.concatenate(out_k)[:count]


def _pick_in_cell(rel, gen, cells: np.ndarray) -> np.ndarray:
    """One random upper-half point in each requested cell."""
    out = np.empty((len(cells), rel.source_dim + 1))
    todo = np.arange(len(cells))
    while todo.size:
        x, k = _cell_points(rel, gen, 4 * todo.size)
        for c in np.unique(cells[todo]):
            want = todo[cells[todo] == c]
            have = x[k == c][: len(want)]
            out[want[: len(have)]] = have
            todo = np.setdiff1d(todo, want[: len(have)])
    return out


def _arc_points(rel, gen, cells: np.ndarray) -> np.ndarray:
    u = gen.random(len(cells))
    start = rel.roots[cells] - rel.half_arc
    return angles_to_rows(start + u * 2 * rel.half_arc)


def r2n_case_pairs(n: int, case: int, count: int, seed: int):
    """Random pairs ((x, y), (x', y')) of R2n that fall under one of the six cases.

    1: x, x' in the same cell.  2: different cells.  3: x in V_i, x' = p_i.
    4: x in V_i, x' = p_j, j != i.  5: x = x' = p_i.  6: x = p_i, x' = p_j.
    Vertex partners carry a uniform point of their arc W.
    """
    if case not in R2N_CASES:
        raise DomainError(f"case must be one of {R2N_CASES}")
    rel = EvenCorrespondence(n)
    gen = np.random.Generator(np.random.Philox(key=seed))
    m = 2 * n + 1
    i = gen.integers(m, size=count)
    j = (i + gen.integers(1, m, size=count)) % m  # j != i
    v = rel.vertices
    if case in (1, 2):
        cj = i if case == 1 else j
        x, xp = _pick_in_cell(rel, gen, i), _pick_in_cell(rel, gen, cj)
        y, yp = angles_to_rows(rel.roots[i]), angles_to_rows(rel.roots[cj])
    elif case in (3, 4):
        cj = i if case == 3 else j
        x, xp = _pick_in_cell(rel, gen, i), v[cj]
        y, yp = angles_to_rows(rel.roots[i]), _arc_points(rel, gen, cj)
    else:
        cj = i if case == 5 else j
        x, xp = v[i], v[cj]
        y, yp = _arc_points(rel, gen, i), _arc_points(rel, gen, cj)
    return x, xp, y, yp


# ---- surfaces -----------------------------------------------------------------


def emit_surface(fn_name: str, rect: B.Rect | None = None, resolution: int = 200) -> np.ndarray:
    """Row-major samples (x, y, value) of a bound function.

    A resolution x resolution grid, or a single column of ``resolution``
    rows when the x-interval is degenerate.
    """
    if resolution < 2:
        raise ConfigurationError("resolution must be >= 2")
    fn = B.get_function(fn_name)
    rect = rect or fn.domain
    B.check_domain(fn, rect)
    xs = np.array([rect.x_lo]) if rect.degenerate_x else np.linspace(rect.x_lo, rect.x_hi, resolution)
    ys = np.linspace(rect.y_lo, rect.y_hi, resolution)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    V = B.eval_rows(fn.name, X, Y)
    return np.column_stack([X.ravel(), Y.ravel(), V.ravel()])


def surface_csv(rows: np.ndarray) -> str:
    lines = ["x,y,value"]
    lines += ["%.17g,%.17g,%.17g" % tuple(r) for r in rows]
    return "\n".join(lines) + "\n"
