"""Grid verification of ``f < 0`` on a rectangle with a continuity budget.

If every grid value is below ``-margin`` and the budget guarantees that f
moves by at most ``epsilon <= margin`` within ``delta`` of a grid point, then
f < 0 holds on the whole rectangle.  Grid rows follow the x axis and columns
the y axis; the rectangle is cut into row bands of a fixed height so results
do not depend on how many workers process them.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ghsphere import __version__
from ghsphere import bounds as B
from ghsphere.budget import ContinuityBudget, derive_budget
from ghsphere.errors import ConfigurationError

BAND_POINTS = 1 << 21  # grid points per band, independent of worker count

PROVEN = "proven"
REFUTED = "refuted"
INSUFFICIENT = "insufficient-margin"


def grid_axis(lo: float, hi: float, spacing: float) -> np.ndarray:
    """lo + k*spacing for k = 0, 1, ... below hi, then hi itself."""
    if lo == hi:
        return np.array([lo])
    k = math.ceil((hi - lo) / spacing)
    pts = lo + spacing * np.arange(k)
    pts = pts[pts < hi]
    return np.append(pts, hi)


@dataclass(frozen=True)
class GridJob:
    fn_name: str
    rect: B.Rect
    spacing: float
    margin: float
    budget: ContinuityBudget

    def validate(self) -> None:
        b = self.budget
        if not (self.spacing > 0 and math.isfinite(self.spacing)):
            raise ConfigurationError(f"spacing must be positive, got {self.spacing!r}")
        if not (self.margin > 0 and math.isfinite(self.margin)):
            raise ConfigurationError(f"margin must be positive, got {self.margin!r}")
        if b.fn_name != B.get_function(self.fn_name).name or b.rect != self.rect:
            raise ConfigurationError("budget was derived for a different function or rectangle")
        if b.delta < self.spacing / 2:
            raise ConfigurationError(f"budget delta {b.delta!r} is below half the spacing")
        if b.compose() > b.epsilon:
            raise ConfigurationError("budget ledger does not compose to its epsilon")
        if b.epsilon > self.margin:
            raise ConfigurationError(f"budget epsilon {b.epsilon!r} exceeds margin {self.margin!r}")


def make_job(fn_name: str, spacing: float, margin: float | None = None, rect: B.Rect | None = None) -> GridJob:
    """A job with a freshly derived budget; the margin defaults to its epsilon."""
    fn = B.get_function(fn_name)
    rect = rect or fn.domain
    budget = derive_budget(fn.name, rect, spacing, margin)
    return GridJob(fn.name, rect, spacing, budget.epsilon if margin is None else margin, budget)


@dataclass(frozen=True)
class BandResult:
    start: int
    worst: float
    worst_index: tuple[int, int]
    witness: tuple[int, int] | None
    count: int


def _eval_band(fn_name: str, start: int, xs: np.ndarray, ys: np.ndarray) -> BandResult:
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    v = B.eval_rows(fn_name, X, Y)
    flat = int(np.argmax(v))
    i, j = divmod(flat, len(ys))
    hits = np.flatnonzero(v.ravel() >= 0.0)
    witness = None
    if hits.size:
        wi, wj = divmod(int(hits[0]), len(ys))
        witness = (start + wi, wj)
    return BandResult(start, float(v.flat[flat]), (start + i, j), witness, v.size)


@dataclass(frozen=True)
class Certificate:
    job: GridJob
    nx: int
    ny: int
    worst_value: float
    worst_index: tuple[int, int]
    worst_point: tuple[float, float]
    verdict: str
    witness_index: tuple[int, int] | None
    witness_point: tuple[float, float] | None
    witness_value: float | None
    workers: int
    wall_time: float = field(default=0.0, compare=False)

    @property
    def points(self) -> int:
        return self.nx * self.ny

    def to_text(self, timing: bool = False) -> str:
        return format_certificate(self, timing)


def verify_grid(job: GridJob, workers: int = 1) -> Certificate:
    job.validate()
    if workers < 1:
        raise ConfigurationError("workers must be >= 1")
    t0 = time.perf_counter()
    xs = grid_axis(job.rect.x_lo, job.rect.x_hi, job.spacing)
    ys = grid_axis(job.rect.y_lo, job.rect.y_hi, job.spacing)
    rows = max(1, BAND_POINTS // len(ys))
    starts = list(range(0, len(xs), rows))
    tasks = [(job.fn_name, s, xs[s : s + rows], ys) for s in starts]
    if workers == 1 or len(tasks) == 1:
        results = [_eval_band(*t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
            results = list(pool.map(_eval_band, *zip(*tasks)))
    # results are in band order; strict comparison keeps the earliest index on ties
    worst = results[0]
    for r in results[1:]:
        if r.worst > worst.worst:
            worst = r
    witness = next((r.witness for r in results if r.witness is not None), None)
    wi, wj = worst.worst_index
    if witness is not None:
        verdict = REFUTED
        wpt = (float(xs[witness[0]]), float(ys[witness[1]]))
        wval = float(B.eval_rows(job.fn_name, np.array([wpt[0]]), np.array([wpt[1]]))[0])
    else:
        verdict = PROVEN if worst.worst < -job.margin else INSUFFICIENT
        wpt = wval = None
    return Certificate(
        job=job,
        nx=len(xs),
        ny=len(ys),
        worst_value=worst.worst,
        worst_index=(wi, wj),
        worst_point=(float(xs[wi]), float(ys[wj])),
        verdict=verdict,
        witness_index=witness,
        witness_point=wpt,
        witness_value=wval,
        workers=workers,
        wall_time=time.perf_counter() - t0,
    )


def fmt(v: float) -> str:
    return "%.17g" % v


def format_certificate(cert: Certificate, timing: bool = False) -> str:
    job, b = cert.job, cert.job.budget
    lines = [
        ("artifact", "ghsphere"),
        ("version", __version__),
        ("function", job.fn_name),
        ("rect.x_lo", fmt(job.rect.x_lo)),
        ("rect.x_hi", fmt(job.rect.x_hi)),
        ("rect.y_lo", fmt(job.rect.y_lo)),
        ("rect.y_hi", fmt(job.rect.y_hi)),
        ("spacing", fmt(job.spacing)),
        ("margin", fmt(job.margin)),
        ("grid.nx", str(cert.nx)),
        ("grid.ny", str(cert.ny)),
        ("grid.points", str(cert.points)),
        ("worst.value", fmt(cert.worst_value)),
        ("worst.x", fmt(cert.worst_point[0])),
        ("worst.y", fmt(cert.worst_point[1])),
        ("worst.i", str(cert.worst_index[0])),
        ("worst.j", str(cert.worst_index[1])),
        ("verdict", cert.verdict),
    ]
    if cert.witness_index is not None:
        lines += [
            ("witness.x", fmt(cert.witness_point[0])),
            ("witness.y", fmt(cert.witness_point[1])),
            ("witness.i", str(cert.witness_index[0])),
            ("witness.j", str(cert.witness_index[1])),
            ("witness.value", fmt(cert.witness_value)),
        ]
    lines += [
        ("budget.delta", fmt(b.delta)),
        ("budget.epsilon", fmt(b.epsilon)),
        ("budget.formula", b.formula),
        ("budget.rounding", fmt(b.rounding)),
    ]
    for t in b.terms:
        pre = f"budget.term.{t.name}"
        lines.append((f"{pre}.contribution", fmt(t.contribution)))
        lines.append((f"{pre}.rule", t.rule))
        lines += [(f"{pre}.{k}", fmt(v)) for k, v in t.constants]
    lines.append(("workers", str(cert.workers)))
    if timing:
        lines.append(("wall_time", "%.3f" % cert.wall_time))
    return "".join(f"{k}={v}\n" for k, v in lines)


def parse_kv(text: str) -> dict[str, str]:
    """Read a key=value document back into a dict."""
    out = {}
    for line in text.splitlines():
        if line.strip():
            k, _, v = line.partition("=")
            out[k] = v
    return out


def default_workers() -> int:
    env = os.environ.get("GHSPHERE_WORKERS")
    if env:
        try:
            w = int(env)
        except ValueError:
            raise ConfigurationError(f"GHSPHERE_WORKERS must be an integer, got {env!r}") from None
        if w < 1:
            raise ConfigurationError("GHSPHERE_WORKERS must be >= 1")
        return w
    return os.cpu_count() or 1
