"""Command-line entry point: ``ghsphere {constants,sample,verify,surface}``.

Exit codes: 0 ok or proven, 2 refuted, 3 insufficient margin, 4 a sampled
distortion exceeded its bound, 64 usage or configuration error, 1 numeric
integrity failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from ghsphere import __version__
from ghsphere import bounds as B
from ghsphere.distortion import (
    adversarial_probe,
    canonical_map_name,
    emit_surface,
    sample_distortion,
    surface_csv,
)
from ghsphere.errors import BudgetInfeasibleError, GHSphereError, NumericIntegrityError
from ghsphere.simplex import eta, gh_target, zeta
from ghsphere.verifier import INSUFFICIENT, PROVEN, REFUTED, default_workers, make_job, verify_grid

EXIT_OK = 0
EXIT_REFUTED = 2
EXIT_INSUFFICIENT = 3
EXIT_BOUND_VIOLATED = 4
EXIT_USAGE = 64
EXIT_NUMERIC = 1

PROBE_ALIASES = {
    "straddle": "voronoi-straddle",
    "voronoi-straddle": "voronoi-straddle",
    "fig8": "fig8-config",
    "fig8-config": "fig8-config",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ghsphere", description="Sphere correspondences, distortion sampling and certified grid checks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("constants", help="print zeta_n, eta_n, pi*n/(2n+1) and pi - zeta_n")
    c.add_argument("--n", type=_positive_int, nargs="+", default=[1, 2, 3, 4, 5, 6, 7])

    s = sub.add_parser("sample", help="Monte Carlo distortion estimate or adversarial probe")
    s.add_argument("--map", required=True, help="R2n, Phi or Fn (case-insensitive)")
    s.add_argument("--n", type=_positive_int, required=True)
    s.add_argument("--samples", type=_positive_int, default=2000)
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--probe", choices=sorted(PROBE_ALIASES), help="run an adversarial probe instead of sampling")
    s.add_argument("--no-helmet", action="store_true", help="fold points into the upper half instead of mirroring")
    s.add_argument("--allow-large", action="store_true", help="allow more than 100000 samples")
    s.add_argument("--workers", type=_positive_int)
    s.add_argument("--out", type=Path)

    v = sub.add_parser("verify", help="certified grid check of f < 0")
    v.add_argument("--ineq", required=True, help="case1, k14, case2, u3-minus-l or a bound function name")
    v.add_argument("--spacing", type=_positive_float, default=1e-3)
    v.add_argument("--margin", type=_positive_float, help="default: the derived continuity epsilon")
    v.add_argument("--rect", type=float, nargs=4, metavar=("X_LO", "X_HI", "Y_LO", "Y_HI"))
    v.add_argument("--workers", type=_positive_int)
    v.add_argument("--timing", action="store_true", help="also write wall time into the certificate")
    v.add_argument("--out", type=Path)

    f = sub.add_parser("surface", help="export a bound function on a grid as CSV")
    f.add_argument("--fn", required=True)
    f.add_argument("--res", type=_positive_int, default=200)
    f.add_argument("--rect", type=float, nargs=4, metavar=("X_LO", "X_HI", "Y_LO", "Y_HI"))
    f.add_argument("--out", type=Path)
    return p


def _workers(flag: int | None) -> int:
    return flag if flag is not None else default_workers()


def cmd_constants(args) -> int:
    print(f"{'n':>3}  {'zeta_n':>20}  {'eta_n':>20}  {'pi*n/(2n+1)':>20}  {'pi-zeta_n':>20}")
    for n in args.n:
        z = zeta(n)
        print(f"{n:>3}  {z:>20.17g}  {eta(n):>20.17g}  {gh_target(n):>20.17g}  {math.pi - z:>20.17g}")
    return EXIT_OK


def cmd_sample(args) -> int:
    name = canonical_map_name(args.map)
    if args.probe:
        kind = PROBE_ALIASES[args.probe]
        report = adversarial_probe(name, args.n, kind)
        default = f"probe-{name}-n{args.n}-{kind}.txt"
    else:
        report = sample_distortion(
            name,
            args.n,
            args.samples,
            args.seed,
            helmet=not args.no_helmet,
            workers=_workers(args.workers),
            allow_large=args.allow_large,
        )
        default = f"sample-{name}-n{args.n}-s{args.samples}-seed{args.seed}.txt"
    out = args.out or Path(default)
    out.write_text(report.to_text())
    status = "ok" if report.margin >= 0 else "BOUND VIOLATED"
    print(
        f"{name} n={args.n} pairs={report.pairs} max_distortion={report.max_distortion:.17g} "
        f"bound={report.bound:.17g} margin={report.margin:.3g} {status} -> {out}"
    )
    return EXIT_OK if report.margin >= 0 else EXIT_BOUND_VIOLATED


def cmd_verify(args) -> int:
    fn = B.get_function(args.ineq)
    rect = B.Rect(*args.rect) if args.rect else None
    job = make_job(fn.name, args.spacing, args.margin, rect)
    cert = verify_grid(job, _workers(args.workers))
    out = args.out or Path(f"certificate-{fn.name}-{args.spacing:g}.txt")
    out.write_text(cert.to_text(timing=args.timing))
    print(
        f"{fn.name} points={cert.points} worst={cert.worst_value:.17g} margin={job.margin:.6g} "
        f"verdict={cert.verdict} wall_time={cert.wall_time:.2f}s -> {out}"
    )
    return {PROVEN: EXIT_OK, REFUTED: EXIT_REFUTED, INSUFFICIENT: EXIT_INSUFFICIENT}[cert.verdict]


def cmd_surface(args) -> int:
    fn = B.get_function(args.fn)
    rect = B.Rect(*args.rect) if args.rect else None
    rows = emit_surface(fn.name, rect, args.res)
    out = args.out or Path(f"surface-{fn.name}.csv")
    out.write_text(surface_csv(rows))
    print(f"{fn.name}: {len(rows)} rows, max value {rows[:, 2].max():.17g} -> {out}")
    return EXIT_OK


COMMANDS = {"constants": cmd_constants, "sample": cmd_sample, "verify": cmd_verify, "surface": cmd_surface}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except BudgetInfeasibleError as e:
        print(f"error: {e} (smallest workable margin {e.min_margin:.6g})", file=sys.stderr)
        return EXIT_USAGE
    except NumericIntegrityError as e:
        print(f"numeric integrity error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GHSphereError, KeyError, OSError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
