"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 parse error, 3 oracle
tolerance failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .core import BadSigma, DiagBoundsError, ParseError, StudyConfig
from .datasets import EMBEDDED, dumps_table, load_dataset
from .dilation import WHO_MIN_SENSITIVITY, dilation_threshold, who_screen
from .oracle import DEFAULT_GRID
from .report import _json_safe, emit_case_figure, run_oracle_check, run_report

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PARSE = 2
EXIT_ORACLE = 3


def parse_number(text: str) -> float:
    """A decimal or a fraction such as ``1/20``."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a number: {text!r}") from exc


def parse_list(text: str, flag: str) -> list[float]:
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise ParseError("expected a comma-separated list of numbers", flag)
    try:
        return [parse_number(t) for t in items]
    except ParseError as exc:
        raise ParseError(str(exc), flag) from exc


def _add_data(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="embedded dataset name or path to a dataset JSON file")


def _add_grid(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid-gamma", type=int, default=DEFAULT_GRID[0], help="oracle grid points over P(y=1)")
    p.add_argument("--grid-t", type=int, default=DEFAULT_GRID[1], help="oracle grid points over the missed-infection split")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diagbounds",
        description="Sharp bounds on the accuracy of a diagnostic test evaluated against an imperfect reference test.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    rep = sub.add_parser("report", help="bounds for a grid of sigma and tau")
    _add_data(rep)
    rep.add_argument("--sigma", required=True, help="comma list of reference sensitivities, e.g. 0.6,0.85,0.98")
    rep.add_argument("--tau", default="1", help="comma list of P(t=1), fractions allowed, e.g. 1/20,1/2,1")
    rep.add_argument("--format", choices=("md", "csv", "json"), default="md")
    rep.add_argument("--oracle", action="store_true", help="cross-check every bound against the brute-force oracle")
    rep.add_argument("--sigma-min", type=parse_number, default=WHO_MIN_SENSITIVITY, help="minimum apparent sensitivity for the screen")
    rep.add_argument("--method", choices=("sharp", "frechet"), default="sharp", help="whole-population bound construction")
    rep.add_argument("--no-unconditional", action="store_true", help="omit whole-population new-test measures")
    _add_grid(rep)

    thr = sub.add_parser("dilation-threshold", help="the sensitivity at or below which the new test is a dilation")
    _add_data(thr)
    thr.add_argument("--sigma", help="optional comma list of sensitivities for the screening check")
    thr.add_argument("--sigma-min", type=parse_number, default=WHO_MIN_SENSITIVITY)
    thr.add_argument("--format", choices=("md", "json"), default="md")

    orc = sub.add_parser("oracle-check", help="compare closed forms with the brute-force oracle")
    _add_data(orc)
    orc.add_argument("--sigma", required=True)
    orc.add_argument("--tau", default="1")
    orc.add_argument("--format", choices=("md", "json"), default="md")
    orc.add_argument("--method", choices=("sharp", "frechet"), default="sharp")
    _add_grid(orc)

    fig = sub.add_parser("figure-cases", help="coordinates for the diagram of the four cases")
    fig.add_argument("--sigma", type=parse_number, default=0.75)
    fig.add_argument("--data", help="comma list of dataset names; default is the diagram's set")

    ds = sub.add_parser("datasets", help="embedded datasets")
    ds_sub = ds.add_subparsers(dest="action", required=True)
    ds_sub.add_parser("list", help="list embedded datasets")
    show = ds_sub.add_parser("show", help="print a dataset as JSON")
    show.add_argument("name")
    return parser


def _cmd_report(args, out) -> int:
    table = load_dataset(args.data)
    report = run_report(
        table,
        parse_list(args.sigma, "--sigma"),
        parse_list(args.tau, "--tau"),
        oracle=args.oracle,
        grids=(args.grid_gamma, args.grid_t),
        sigma_min_threshold=args.sigma_min,
        method=args.method,
        include_unconditional=not args.no_unconditional,
    )
    out.write(report.render(args.format))
    if args.oracle and not report.oracle_passed:
        return EXIT_ORACLE
    return EXIT_OK


def _cmd_threshold(args, out) -> int:
    table = load_dataset(args.data)
    result = dilation_threshold(table)
    sigmas = parse_list(args.sigma, "--sigma") if args.sigma else []
    screens = []
    for s in sigmas:
        if not (0.0 < s <= 1.0):
            raise BadSigma(f"sigma must lie in (0, 1], got {s!r}")
        screens.append((s, who_screen(table, s, args.sigma_min)))
    if args.format == "json":
        payload = {
            "dataset": table.name,
            "raw_threshold": result.raw_threshold,
            "status": result.status.value,
            "gamma": result.gamma,
            "screens": [
                {"sigma": s, "passed": r.passed, "zeta": r.zeta, "limit": r.limit, "explanation": r.explanation}
                for s, r in screens
            ],
        }
        out.write(json.dumps(_json_safe(payload), indent=2, sort_keys=True, allow_nan=False) + "\n")
        return EXIT_OK
    out.write(
        f"{table.name}: sigma* = {100.0 * result.raw_threshold:.2f}% ({result.status.value}); "
        f"reference yield gamma = {100.0 * result.gamma:.2f}%\n"
    )
    for s, r in screens:
        out.write(f"sigma={s:g}: {r.explanation}\n")
    return EXIT_OK


def _cmd_oracle(args, out) -> int:
    table = load_dataset(args.data)
    grids = (args.grid_gamma, args.grid_t)
    checks = [
        run_oracle_check(table, StudyConfig(s, t), grids, method=args.method)
        for s in parse_list(args.sigma, "--sigma")
        for t in parse_list(args.tau, "--tau")
    ]
    if args.format == "json":
        payload = [
            {
                "dataset": c.dataset,
                "sigma": c.sigma,
                "tau": c.tau,
                "grid": list(c.grid),
                "passed": c.passed,
                "deltas": {d.measure: {"delta": d.delta, "tolerance": d.tolerance, "passed": d.passed} for d in c.deltas},
            }
            for c in checks
        ]
        out.write(json.dumps(_json_safe(payload), indent=2, sort_keys=True, allow_nan=False) + "\n")
    else:
        out.write("| sigma | tau | measure | max delta | tolerance | result |\n|---|---|---|---|---|---|\n")
        for c in checks:
            for d in c.deltas:
                out.write(
                    f"| {c.sigma:g} | {c.tau:g} | {d.measure} | {d.delta:.3e} | {d.tolerance:.0e} | "
                    f"{'pass' if d.passed else 'FAIL'} |\n"
                )
    return EXIT_OK if all(c.passed for c in checks) else EXIT_ORACLE


def _cmd_figure(args, out) -> int:
    if args.data:
        names = [n.strip() for n in args.data.split(",") if n.strip()]
        try:
            figure = emit_case_figure(names, args.sigma)
        except KeyError as exc:
            raise ParseError(f"unknown dataset {exc.args[0]!r}", "--data") from exc
    else:
        figure = emit_case_figure(sigma=args.sigma)
    out.write(json.dumps(figure, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _cmd_datasets(args, out) -> int:
    if args.action == "list":
        width = max(len(n) for n in EMBEDDED)
        for name, d in EMBEDDED.items():
            out.write(f"{name:<{width}}  {d.source}\n")
        return EXIT_OK
    out.write(dumps_table(load_dataset(args.name)) + "\n")
    return EXIT_OK


COMMANDS = {
    "report": _cmd_report,
    "dilation-threshold": _cmd_threshold,
    "oracle-check": _cmd_oracle,
    "figure-cases": _cmd_figure,
    "datasets": _cmd_datasets,
}


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, which matches the parse-error code
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except DiagBoundsError as exc:
        err.write(f"invalid input: {type(exc).__name__}: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
