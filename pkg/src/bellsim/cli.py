"""Command-line entry point: ``bellsim {run,verify,noise-table,feasibility,dump}``."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import channels, circuits, connectivity, verify
from .errors import ConfigurationError, NumericalDegeneracyError, ParseError, ValidationError
from .estimator import ExperimentResult, NoiseConfig, run_experiment
from .gates import THETA

SEED_ENV = "BELLSIM_SEED"
VARIANT_CHOICES = ("I", "II", "III-quantum", "III-classical", "IV")


def _variant(text: str) -> str:
    v = text.replace("-", "_")
    if v not in circuits.VARIANTS:
        raise argparse.ArgumentTypeError(f"invalid variant {text!r} (choose from {', '.join(VARIANT_CHOICES)})")
    return v


def _key_value(text: str) -> tuple[str, float]:
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter {key!r} needs a number") from None


def read_config(path: str) -> dict[str, str]:
    """``key=value`` lines; keys are run flag names with or without dashes."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value")
        out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bellsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="sample a Bell experiment variant")
    run.add_argument("--config", help="key=value file mirroring these flags; flags win")
    run.add_argument("--variant", type=_variant, default="I", help=", ".join(VARIANT_CHOICES))
    run.add_argument("--shots", type=int, default=1024,
                     help="per observable for I/II, total for the randomized variants")
    run.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or 0")
    run.add_argument("--depolarizing", type=float, default=0.0, help="per-operation Pauli error rate")
    run.add_argument("--channel", choices=channels.CHANNEL_NAMES, default=None,
                     help="Kraus channel applied after Bell-state preparation")
    run.add_argument("--channel-param", type=_key_value, action="append", default=None,
                     metavar="KEY=VALUE", help="e.g. p=0.9, theta=0.3, p2=0.5, p_d=0.1")
    run.add_argument("--controlled", choices=("abc", "direct"), default="abc",
                     help="build controlled gates from CNOT fragments or as primitives")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--output", help="write the result document here")
    run.add_argument("--format", choices=("json", "csv"), default="json")

    ver = sub.add_parser("verify", help="check the analytic identities")
    ver.add_argument("--perturb-theta", type=float, default=0.0, help=argparse.SUPPRESS)

    nt = sub.add_parser("noise-table", help="noisy CHSH correlations, computed vs closed form, as CSV")
    nt.add_argument("--channel", default="all", choices=channels.CHANNEL_NAMES + ("all",))
    nt.add_argument("--points", type=int, default=11)
    nt.add_argument("--p2", type=float, default=0.3, help="second probability of GA")
    nt.add_argument("--output")

    fe = sub.add_parser("feasibility", help="check a circuit against a coupling map")
    src = fe.add_mutually_exclusive_group(required=True)
    src.add_argument("--circuit", help="circuit dump file")
    src.add_argument("--variant", type=_variant)
    fe.add_argument("--observable", default="QS", choices=circuits.OBSERVABLES)
    fe.add_argument("--map", required=True,
                    help=f"map file or builtin name ({', '.join(connectivity.BUILTIN_MAPS)})")
    fe.add_argument("--strict-direction", action="store_true", help="forbid CNOT direction reversal")

    dp = sub.add_parser("dump", help="print a variant's circuit in text form")
    dp.add_argument("--variant", type=_variant, required=True)
    dp.add_argument("--observable", default="QS", choices=circuits.OBSERVABLES)
    dp.add_argument("--controlled", choices=("abc", "direct"), default="abc")
    parser.set_defaults(run_parser=run)
    return parser


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run" and args.config:
        try:
            cfg = read_config(args.config)
        except (OSError, ConfigurationError) as exc:
            parser.error(str(exc))
        run_parser = args.run_parser
        known = {a.dest for a in run_parser._actions}
        unknown = set(cfg) - known
        if unknown:
            parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "channel_param" in cfg:
            cfg["channel_param"] = [_key_value(s) for s in cfg["channel_param"].split(",")]
        run_parser.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return parser, args


def cmd_run(args, parser) -> int:
    if args.shots < 2:
        parser.error("shots must be >= 2")
    if args.workers < 1:
        parser.error("workers must be >= 1")
    seed = args.seed if args.seed is not None else int(os.environ.get(SEED_ENV, "0"))
    try:
        noise = NoiseConfig(args.depolarizing, args.channel, dict(args.channel_param or []))
    except ConfigurationError as exc:
        parser.error(str(exc))
    try:
        result = run_experiment(args.variant, args.shots, seed, noise, args.workers, args.controlled)
    except (NumericalDegeneracyError, ValidationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    print(result.table())
    if args.output:
        text = result.to_json() if args.format == "json" else result.to_csv()
        Path(args.output).write_text(text)
    return 0


def cmd_verify(args) -> int:
    checks = verify.run_all(THETA + args.perturb_theta)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  residual={c.residual:.3e}")
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} identities hold")
    return 1 if failed else 0


def _param_text(params: dict) -> str:
    return ";".join(f"{k}={v!r}" for k, v in params.items())


def cmd_noise_table(args) -> int:
    names = channels.CHANNEL_NAMES if args.channel == "all" else (args.channel,)
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["channel", "parameter", "observable", "analytic", "computed", "abs_error"])
        for name in names:
            grid = channels.default_grid(name, args.points)
            if name == "GA":
                grid = [dict(g, p2=args.p2) for g in grid]
            for ch, params, pair, analytic, computed, err in channels.noise_table_rows(name, grid):
                w.writerow([ch, _param_text(params), pair, repr(analytic), repr(computed), repr(err)])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_feasibility(args, parser) -> int:
    try:
        if args.circuit:
            spec = circuits.parse(Path(args.circuit).read_text(), Path(args.circuit).stem)
        else:
            spec = circuits.build(args.variant, args.observable)
        cmap = connectivity.load_coupling_map(args.map)
        report = connectivity.check_feasibility(spec, cmap, not args.strict_direction)
    except (OSError, ParseError, ConfigurationError) as exc:
        parser.error(str(exc))
    print(json.dumps({
        "circuit": spec.name,
        "map": cmap.name,
        "strict_direction": args.strict_direction,
        "feasible": report.feasible,
        "violations": [[i, list(pair)] for i, pair in report.violations],
        "assignment": report.assignment,
    }, indent=2))
    return 0


def main(argv=None) -> int:
    parser, args = _parse(argv)
    if args.command == "run":
        return cmd_run(args, parser)
    if args.command == "verify":
        return cmd_verify(args)
    if args.command == "noise-table":
        return cmd_noise_table(args)
    if args.command == "feasibility":
        return cmd_feasibility(args, parser)
    if args.command == "dump":
        print(circuits.dump(circuits.build(args.variant, args.observable, args.controlled)), end="")
        return 0
    return 2


def reprint(path: str) -> str:
    """Table for a saved JSON result document."""
    return ExperimentResult.from_json(Path(path).read_text()).table()


if __name__ == "__main__":
    sys.exit(main())
