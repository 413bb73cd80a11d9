"""Command-line front end.

Exit codes: 0 pass/info, 1 assertion failure, 2 usage error, 3 protocol abort.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .adversary import BasisPolicy, EveModel, Line
from .errors import BadProbe, ParseError, Unsupported
from .protocol import RoundConfig, Transcript
from .states import Family

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_ABORT = 0, 1, 2, 3


def _bits(width: int):
    def parse(text: str) -> str:
        if len(text) != width or set(text) - {"0", "1"}:
            raise argparse.ArgumentTypeError(f"expected {width} bits, got {text!r}")
        return text
    return parse


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", type=Path, help="write the command's artifact here")
    p.add_argument("--json", action="store_true", help="print the full JSON report")


def _eve_flags(p: argparse.ArgumentParser, default: str) -> None:
    p.add_argument("--eve", "--model", dest="eve", choices=["none", "measure-resend", "probe"], default=default)
    p.add_argument("--eve-basis", choices=[b.value for b in BasisPolicy], default="random")
    p.add_argument("--beta2", type=float, default=0.0, help="probe disturbance |beta|^2")
    p.add_argument("--line", choices=[l.value for l in Line], default="D")


def _eve_model(args) -> EveModel:
    if args.eve == "none":
        return EveModel.none()
    if args.eve == "measure-resend":
        return EveModel.measure_resend(args.eve_basis, args.line, return_trip=getattr(args, "eve_return", False))
    return EveModel.probe(args.beta2, args.line, return_trip=getattr(args, "eve_return", False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cavity-stego", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-evolution", help="reproduce the evolved five-atom states")
    p.add_argument("--tol", type=float, default=1e-10)
    _common(p)

    p = sub.add_parser("derive-table", help="derive the swap table and outcome collections")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--compare", action="store_true", help="diff against the printed tables")
    _common(p)

    p = sub.add_parser("run", help="run one protocol round")
    p.add_argument("--secret", type=_bits(5), required=True)
    p.add_argument("--info", default="random", help="4n info bits or 'random'")
    p.add_argument("-n", type=int, default=16)
    p.add_argument("--check-fraction", type=float, default=0.2)
    p.add_argument("--abort-threshold", type=float, default=0.0)
    p.add_argument("--eve-return", action="store_true", help="Eve also attacks the return trip")
    _eve_flags(p, "none")
    _common(p)

    p = sub.add_parser("attack", help="Monte Carlo check-error rate under an attack")
    _eve_flags(p, "measure-resend")
    p.add_argument("--check-basis", choices=[b.value for b in BasisPolicy], default=None,
                   help="default: random for measure-resend, Z for the probe")
    p.add_argument("--family", choices=[f.value for f in Family], default="SP")
    p.add_argument("--trials", type=int, default=100_000)
    _common(p)

    p = sub.add_parser("stats-m", help="hiding-pattern statistics on random info")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("-n", type=int, default=11)
    _common(p)

    p = sub.add_parser("account", help="resource accounting of a transcript")
    p.add_argument("transcript", type=Path)
    _common(p)
    return parser


def _emit(report: harness.Report, args) -> None:
    if args.json:
        sys.stdout.write(report.to_json())
        return
    print(f"{report.command}: {report.status}")
    for key, value in report.results.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(harness._plain(value))
            if len(value) > 160:
                value = value[:157] + "..."
        print(f"  {key}: {value}")
    for d in report.diffs:
        print(f"  diff: {json.dumps(harness._plain(d))}")


def _exit_code(report: harness.Report) -> int:
    return EXIT_FAIL if report.status == harness.FAIL else EXIT_PASS


def _write(path: Path | None, text: str) -> None:
    if path is not None:
        path.write_text(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (Unsupported, BadProbe, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _dispatch(args) -> int:
    if args.command == "verify-evolution":
        report = harness.verify_evolution(args.tol)
        _write(args.out, report.to_json())
    elif args.command == "derive-table":
        report, artifacts = harness.derive_table(args.compare)
        if artifacts and args.out is not None:
            if args.format == "csv":
                _write(args.out, harness.table_csv(artifacts["rows"]))
            else:
                _write(args.out, json.dumps(artifacts, indent=2) + "\n")
    elif args.command == "run":
        info = args.info if args.info == "random" else args.info.strip()
        config = RoundConfig(
            n=args.n,
            secret=args.secret,
            info_bits=info,
            seed=args.seed,
            check_fraction=args.check_fraction,
            abort_threshold=args.abort_threshold,
            eve=_eve_model(args),
        )
        report, transcript = harness.run_report(config)
        _write(args.out, transcript.to_json())
        _emit(report, args)
        return EXIT_ABORT if transcript.aborted else _exit_code(report)
    elif args.command == "attack":
        if args.eve == "none":
            raise Unsupported("an attack study needs an attack model")
        check = args.check_basis or ("Z" if args.eve == "probe" else "random")
        report = harness.attack_study(_eve_model(args), args.line, check, args.trials, args.seed, Family(args.family))
        _write(args.out, report.to_json())
    elif args.command == "stats-m":
        report = harness.stats_m(args.trials, args.n, args.seed)
        _write(args.out, report.to_json())
    else:
        try:
            transcript = Transcript.from_json(args.transcript.read_text())
        except (OSError, ParseError) as exc:
            print(f"cavity-stego: cannot read transcript: {exc}", file=sys.stderr)
            return EXIT_USAGE
        report = harness.account(transcript)
        _write(args.out, report.to_json())
    _emit(report, args)
    return _exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
