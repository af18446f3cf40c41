"""Command-line interface.

Exit codes:

    0  success
    1  oracle-check agreement below 99.9%
    2  malformed input or invalid parameters
    3  not enough observations (n <= p)
    4  singular sample covariance
    5  too many failed Monte Carlo replications
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .covariance import DimensionError, MalformedInputError, SingularCovarianceError, read_csv
from .edgetest import make_config
from .graph import LossSpec
from .oracle import check_agreement
from .selection import OptimalUnbiased, make_procedure
from .simulation import ReplicationFailureError, STRUCTURES, compare_procedures, generate_model, summary_csv

EXIT_OK = 0
EXIT_ORACLE_DISAGREES = 1
EXIT_USAGE = 2
EXIT_TOO_FEW_OBSERVATIONS = 3
EXIT_SINGULAR = 4
EXIT_REPLICATIONS_FAILED = 5


class UsageError(Exception):
    pass


def _add_losses(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, help="significance level of every edge test (losses 1-alpha, alpha)")
    p.add_argument("--loss-a", type=float, help="loss for a false edge inclusion")
    p.add_argument("--loss-b", type=float, help="loss for a false edge exclusion")


def _add_output(p: argparse.ArgumentParser, formats, default) -> None:
    p.add_argument("--output", help="output file (default: stdout)")
    p.add_argument("--format", choices=formats, default=default)


def _add_model(p: argparse.ArgumentParser) -> None:
    p.add_argument("--structure", choices=STRUCTURES, default="chain")
    p.add_argument("--p", type=int, required=True, help="number of variables")
    p.add_argument("--n", type=int, required=True, help="sample size per replication")
    p.add_argument("--strength", type=float, default=0.3, help="edge partial correlation before rescaling")
    p.add_argument("--density", type=float, help="edge probability for --structure random")
    p.add_argument("--reps", type=int, default=1000, help="Monte Carlo replications")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ggms", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ggms {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="select a graph from a CSV sample")
    p.add_argument("--input", required=True, help="CSV file, one observation per row")
    _add_losses(p)
    _add_output(p, ("edgelist", "dot", "json"), "edgelist")
    p.add_argument("--seed", type=int, default=0, help="recorded only; selection is deterministic")
    p.add_argument("--threads", type=int, default=1, help="accepted for uniformity; no effect")

    p = sub.add_parser("simulate", help="Monte Carlo risk of one procedure")
    _add_model(p)
    _add_losses(p)
    p.add_argument("--procedures", default="ou", help="procedure name (default: ou)")
    _add_output(p, ("json", "csv"), "json")

    p = sub.add_parser("compare", help="paired Monte Carlo comparison of procedures")
    _add_model(p)
    _add_losses(p)
    p.add_argument("--procedures", default="ou,fisher-z", help="comma-separated procedure names")
    _add_output(p, ("json", "csv"), "json")

    p = sub.add_parser("threshold", help="print the beta quantile q and threshold t")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--output", help="output file (default: stdout)")

    p = sub.add_parser("oracle-check", help="compare the beta test with the quadrature oracle (p=3)")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1, help="accepted for uniformity; no effect")
    p.add_argument("--output", help="output file (default: stdout)")
    return parser


def _losses(args) -> LossSpec:
    has_alpha = args.alpha is not None
    has_ab = args.loss_a is not None or args.loss_b is not None
    if has_alpha == has_ab:
        raise UsageError("give exactly one of --alpha or --loss-a/--loss-b")
    if has_alpha:
        if not 0.0 < args.alpha < 1.0:
            raise UsageError(f"--alpha must lie in (0, 1), got {args.alpha}")
        return LossSpec.from_alpha(args.alpha)
    if args.loss_a is None or args.loss_b is None:
        raise UsageError("--loss-a and --loss-b must be given together")
    try:
        return LossSpec.scalar(args.loss_a, args.loss_b)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_select(args) -> int:
    losses = _losses(args)
    x = read_csv(args.input)
    result = OptimalUnbiased(losses).fit(x)
    t = float(result.thresholds[0, 1]) if x.p > 1 else float("nan")
    header = [f"ggms {__version__} select", f"seed={args.seed}", f"threshold={t!r}"]
    if args.format == "edgelist":
        text = result.to_edgelist(header)
    elif args.format == "dot":
        text = result.to_dot(header)
    else:
        text = result.to_json({"version": __version__, "command": "select", "seed": args.seed, "threshold": t})
    _emit(text, args.output)
    return EXIT_OK


def _run_simulation(args, names) -> int:
    losses = _losses(args)
    if args.reps < 1:
        raise UsageError("--reps must be positive")
    if args.threads < 1:
        raise UsageError("--threads must be positive")
    if args.seed < 0:
        raise UsageError("--seed must be nonnegative")
    try:
        procs = [make_procedure(name, losses) for name in names]
        model = generate_model(args.p, args.structure, args.strength, seed=args.seed, density=args.density)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"invalid model or procedure: {exc}") from None
    if args.n <= args.p:
        raise DimensionError(f"need n > p, got n={args.n}, p={args.p}")
    reports = compare_procedures(model, procs, args.n, args.reps, losses, args.seed, threads=args.threads)
    if args.format == "csv":
        _emit(summary_csv(reports), args.output)
        return EXIT_OK
    doc = {
        "version": __version__,
        "command": args.command,
        "seed": args.seed,
        "parameters": {
            "structure": args.structure,
            "p": args.p,
            "n": args.n,
            "strength": args.strength,
            "density": args.density,
            "replications": args.reps,
            "procedures": names,
        },
        "reports": [r.to_dict() for r in reports],
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    if args.output:
        Path(args.output).with_suffix(".csv").write_text(summary_csv(reports))
    return EXIT_OK


def cmd_simulate(args) -> int:
    names = [s.strip() for s in args.procedures.split(",") if s.strip()]
    if len(names) != 1:
        raise UsageError("simulate runs exactly one procedure; use compare for several")
    return _run_simulation(args, names)


def cmd_compare(args) -> int:
    names = [s.strip() for s in args.procedures.split(",") if s.strip()]
    return _run_simulation(args, names)


def cmd_threshold(args) -> int:
    try:
        cfg = make_config(args.n, args.p, args.alpha)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    lines = [
        f"n={cfg.n}",
        f"p={cfg.p}",
        f"alpha={cfg.alpha:.15g}",
        f"beta_shape={(cfg.n - cfg.p) / 2:.15g}",
        f"q={cfg.quantile:.15g}",
        f"t={cfg.threshold:.15g}",
    ]
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    if args.samples < 1 or args.n <= 3 or not 0.0 < args.alpha < 1.0 or args.seed < 0:
        raise UsageError("need --samples >= 1, --n > 3, --alpha in (0, 1) and --seed >= 0")
    res = check_agreement(args.samples, args.n, args.alpha, args.seed)
    lines = [
        f"ggms {__version__} oracle-check",
        f"samples={res.samples}",
        f"n={res.n}",
        f"alpha={res.alpha!r}",
        f"seed={res.seed}",
        f"threshold={res.threshold!r}",
        f"agreements={res.agreements}",
        f"agreement_rate={res.agreement_rate!r}",
        f"disagreements={len(res.disagreement_distances)}",
        f"max_boundary_distance={res.max_boundary_distance!r}",
        f"min_boundary_distance={res.min_distance!r}",
    ]
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if res.agreement_rate >= 0.999 else EXIT_ORACLE_DISAGREES


COMMANDS = {
    "select": cmd_select,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "threshold": cmd_threshold,
    "oracle-check": cmd_oracle_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ggms: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DimensionError as exc:
        print(f"ggms: error: {exc}", file=sys.stderr)
        return EXIT_TOO_FEW_OBSERVATIONS
    except SingularCovarianceError as exc:
        print(f"ggms: error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except MalformedInputError as exc:
        print(f"ggms: error: malformed input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ReplicationFailureError as exc:
        print(f"ggms: error: {exc}", file=sys.stderr)
        return EXIT_REPLICATIONS_FAILED
    except OSError as exc:
        print(f"ggms: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
