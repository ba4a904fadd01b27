"""Command-line front end: point evaluations, sweeps, figure data and validation."""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

from .figures import FigureName, FigureRecipe, figure, write_figure
from .response import DEFAULT_QUAD, QuadratureOptions
from .sweep import (
    ConfigError,
    SweepConfig,
    TrajectorySpec,
    default_workers,
    render,
    run_sweep,
    write_text,
)
from .trajectory import TrajectoryParams, classify
from .validation import run_validation

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
POINT_TARGETS = {
    "response": "response",
    "bloch": "bloch",
    "qfi-a": "qfi_a",
    "qfi-theta": "qfi_theta",
    "qfi-asy": "qfi_asy",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser, point: bool) -> None:
    # point commands get concrete defaults; sweep/figure leave None so file values win
    def dflt(v):
        return v if point else None

    p.add_argument("--a", type=float, default=dflt(1.0), help="acceleration a/Omega")
    p.add_argument("--bbar", type=float, default=dflt(0.0), help="torsion ratio b/a")
    p.add_argument("--theta", type=float, default=dflt(0.0), help="weight angle (rad)")
    p.add_argument("--tau", type=float, default=dflt(1.0), help="rescaled time tau Omega")
    p.add_argument("--omega", type=float, default=dflt(1.0),
                   help="gap, or signed frequency for 'response' (default 1)")
    p.add_argument("--abs-tol", type=float, default=None)
    p.add_argument("--rel-tol", type=float, default=None)
    p.add_argument("--out", default=None, help="output file (directory for 'figure')")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--workers", type=int, default=None,
                   help="worker threads (fallback: QFI_LAB_WORKERS, then 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qfi-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in POINT_TARGETS:
        _common(sub.add_parser(name, help=f"single-point {name}"), point=True)
    p = sub.add_parser("sweep", help="grid sweep from a JSON config")
    p.add_argument("config")
    _common(p, point=False)
    p = sub.add_parser("figure", help="data for one figure family")
    p.add_argument("name", choices=[n.value for n in FigureName])
    _common(p, point=False)
    p.add_argument("--catenary-bbar", type=float, default=0.5)
    p.add_argument("--circular-bbar", type=float, default=2.0)
    p.add_argument("--points", type=int, default=None)
    p = sub.add_parser("validate", help="run the acceptance checks")
    p.add_argument("--full", action="store_true", help="include the long-time sweeps")
    p.add_argument("--out", default=None)
    return parser


def _quad(args) -> QuadratureOptions:
    kw = {k: getattr(args, k) for k in ("abs_tol", "rel_tol") if getattr(args, k) is not None}
    return dataclasses.replace(DEFAULT_QUAD, **kw)


def _workers(args) -> int:
    return args.workers if args.workers is not None else default_workers()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        write_text(out, text)


def _point(args) -> int:
    params = TrajectoryParams.from_bbar(args.a, args.bbar)
    spec = TrajectorySpec.parse((classify(params).value, args.bbar))
    cfg = SweepConfig(
        trajectories=(spec,), a_grid=(args.a,), theta_grid=(args.theta,), tau_grid=(args.tau,),
        targets=(POINT_TARGETS[args.command],), quad=_quad(args), omega=args.omega,
        format=args.format or "csv", workers=_workers(args),
    )
    result = run_sweep(cfg)
    _emit(render(result, cfg.format), args.out)
    return EXIT_NUMERIC if result.n_failed else EXIT_OK


def _sweep(args) -> int:
    try:
        data = json.loads(Path(args.config).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.config}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{args.config}: expected a JSON object")
    overrides = dict(output_path=args.out, format=args.format, omega=args.omega)
    for flag, key in (("a", "a_grid"), ("theta", "theta_grid"), ("tau", "tau_grid")):
        v = getattr(args, flag)
        if v is not None:
            overrides[key] = (v,)
    if args.bbar is not None:
        params = TrajectoryParams.from_bbar(1.0, args.bbar)
        overrides["trajectories"] = ((classify(params).value, args.bbar),)
    quad = dict(data.get("quad") or {})
    for key in ("abs_tol", "rel_tol"):
        if getattr(args, key) is not None:
            quad[key] = getattr(args, key)
    if quad:
        overrides["quad"] = quad
    if args.workers is not None:
        overrides["workers"] = args.workers
    elif "workers" not in data:
        overrides["workers"] = default_workers()
    cfg = SweepConfig.from_mapping(data, **overrides)
    result = run_sweep(cfg)
    _emit(render(result, cfg.format), cfg.output_path)
    failed = result.n_failed
    if failed:
        print(f"{failed} of {len(result.rows)} rows failed", file=sys.stderr)
    return EXIT_NUMERIC if failed else EXIT_OK


def _figure(args) -> int:
    if args.format == "json":
        raise ConfigError("figure data is written as CSV only")
    recipe = FigureRecipe(
        name=args.name,
        a=None if args.a is None else (args.a,),
        theta=None if args.theta is None else (args.theta,),
        tau=None if args.tau is None else (args.tau,),
        catenary_bbar=args.catenary_bbar,
        circular_bbar=args.circular_bbar,
        points=args.points,
        quad=_quad(args),
        workers=_workers(args),
    )
    if args.omega not in (None, 1.0):
        raise ConfigError("figure data is defined in units of the gap; --omega must be 1")
    data = figure(recipe)
    out = Path(args.out or f"figures/{args.name}")
    paths = write_figure(data, out)
    for p in paths:
        print(p)
    return EXIT_NUMERIC if any(c.result.n_failed for c in data.curves) else EXIT_OK


def _validate(args) -> int:
    results = run_validation(full=args.full)
    report = {
        "level": "full" if args.full else "fast",
        "passed": all(r.passed for r in results),
        "criteria": [r.as_dict() for r in results],
    }
    for r in results:
        print(r.line(), file=sys.stderr)
    _emit(json.dumps(report, indent=1, default=_jsonable) + "\n", args.out)
    return EXIT_OK if report["passed"] else EXIT_NUMERIC


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return str(x)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors exit 2 through _Parser; --help exits 0
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        if args.command in POINT_TARGETS:
            return _point(args)
        if args.command == "sweep":
            return _sweep(args)
        if args.command == "figure":
            return _figure(args)
        return _validate(args)
    except (ConfigError, ValueError) as exc:
        print(f"qfi-lab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"qfi-lab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
