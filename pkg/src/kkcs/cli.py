"""Command-line entry point: ``kkcs verify | compute | sweep``.

Exit codes: 0 when every suite passes, 1 when a suite fails, 2 for
configuration or I/O errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .chern_simons import adiabatic_sweep, cs_reduced
from .presets import PRESETS, PresetSpec, build_preset
from .records import RunRecord, export_results, parse_config
from .suites import SUITES, Tolerances, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
BOOL_FLAGS = {"fit"}


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _grid(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"grid must look like N0xN1, got {text!r}")
    return int(parts[0]), int(parts[1])


def _eps_list(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t.strip())


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", default="-", help="output path, '-' for stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--config", help="key = value file; command-line flags win")
    common.add_argument("--geometry", choices=PRESETS, required=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--radius", type=float, default=0.5)
    common.add_argument("--lens-order", type=int, default=1)
    common.add_argument("--grid", type=_grid, help="quadrature points N0xN1")
    common.add_argument("--fiber-volume", type=float)

    p = _Parser(prog="kkcs", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", parents=[common], help="run a comparison suite")
    v.add_argument("--suite", choices=SUITES, required=False)
    v.add_argument("--points", type=int, default=100)
    v.add_argument("--tolerance", type=float, help="replace every tolerance of the suite")
    v.add_argument("--epsilon", type=float, default=1.0)
    v.add_argument("--eps-grid", type=_eps_list, default=())

    c = sub.add_parser("compute", parents=[common], help="evaluate CS at one epsilon")
    c.add_argument("--epsilon", type=float, required=False)
    c.add_argument("--route", choices=("closed", "generic", "trace"), default="closed")

    s = sub.add_parser("sweep", parents=[common], help="evaluate CS on an epsilon grid")
    s.add_argument("--eps-grid", type=_eps_list, required=False)
    s.add_argument("--fit", action="store_true", help="fit a eps + b eps^2")
    return p


REQUIRED = {"verify": ("suite", "geometry"), "compute": ("geometry", "epsilon"), "sweep": ("geometry", "eps_grid")}


def _apply_config(parser: argparse.ArgumentParser, argv) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = parse_config(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        known = set(vars(args))
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        flags = []
        for key, value in cfg.items():
            flag = "--" + key.replace("_", "-")
            if key in BOOL_FLAGS:
                if value.lower() in ("1", "true", "yes", "on"):
                    flags.append(flag)
                elif value.lower() not in ("0", "false", "no", "off"):
                    raise ConfigError(f"config key {key} expects a boolean")
            else:
                flags += [flag, value]
        # config values first, so explicit flags parsed later override them
        args = parser.parse_args([argv[0], *flags, *argv[1:]])
    for key in REQUIRED[args.command]:
        if getattr(args, key, None) in (None, ()):
            raise ConfigError(f"--{key.replace('_', '-')} is required for {args.command}")
    return args


def _preset(args, **extra) -> PresetSpec:
    return PresetSpec(
        name=args.geometry,
        radius=args.radius,
        lens_order=args.lens_order,
        seed=args.seed,
        grid=args.grid,
        fiber_volume=args.fiber_volume,
        **extra,
    )


def _run(args) -> RunRecord:
    if args.command == "verify":
        spec = _preset(args, epsilon=args.epsilon, eps_grid=args.eps_grid)
        tol = Tolerances(override=args.tolerance)
        kk, _, _ = build_preset(spec)
        res = run_suite(args.suite, spec, tol, points=args.points)
        return RunRecord(spec, kk.fiber_volume, list(res.results), res.fit, [res], __version__)
    if args.command == "compute":
        spec = _preset(args, epsilon=args.epsilon)
        kk, domain, quad = build_preset(spec)
        return RunRecord(spec, kk.fiber_volume, [cs_reduced(kk, domain, quad, args.route)], None, [], __version__)
    spec = _preset(args, eps_grid=args.eps_grid)
    kk, domain, quad = build_preset(spec)
    sw = adiabatic_sweep(kk, spec.eps_grid, domain, quad)
    fit = {"a": sw.fit.a, "b": sw.fit.b, "residual": sw.fit.residual} if args.fit else None
    return RunRecord(spec, kk.fiber_volume, sw.results, fit, [], __version__)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        record = _run(args)
        export_results(record, args.format, args.output)
    except ConfigError as exc:
        print(f"kkcs: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"kkcs: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if record.suites:
        for s in record.suites:
            for c in s.checks:
                mark = "PASS" if c.passed else "FAIL"
                print(f"[{mark}] {s.suite}/{c.name}: {c.value:.3e} (tol {c.tolerance:.3e})", file=sys.stderr)
    return EXIT_OK if record.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
