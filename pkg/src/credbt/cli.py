"""Command-line front end.

    credbt tables criterion --dist uniform
    credbt weight --method longley-cook --n 45
    credbt backtest --input eur_pvalues.csv --method longley-cook
    credbt synth --seed 7 --paths 999 --horizons 1m,1y --start 2002-01-01 --end 2013-06-01 --freq 30

Exit status: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import sys
from datetime import date

from credbt import __version__
from credbt.backtest import (
    BacktestConfig,
    RowError,
    parse_horizon,
    read_rows,
    run_portfolio,
    write_pit_csv,
    write_verdicts_csv,
)
from credbt.credibility import (
    DEFAULT_GAMMA,
    CredibilityQuery,
    credibility_weight,
    full_credibility_uniform,
    pvalue_interval,
)
from credbt.report import TableRequest, render_table, verdict_matrix
from credbt.synthetic import ScenarioSpec, day_calendar, generate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fraction(text: str) -> float:
    t = text.strip()
    try:
        return float(t[:-1]) / 100.0 if t.endswith("%") else float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _fraction_list(text: str) -> list[float]:
    return [_fraction(t) for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list[int]:
    out = []
    for t in text.split(","):
        if not t.strip():
            continue
        try:
            out.append(int(t))
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {t!r}") from None
    return out


def _iso_date(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an ISO date (YYYY-MM-DD): {text!r}") from None


def _u64(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer: {text!r}")
    return v


def _horizon_list(text: str) -> list[int]:
    try:
        return [parse_horizon(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_credibility_args(p, *, method_required=True):
    p.add_argument("--p", type=_fraction, default=0.90, help="coverage probability P (default 0.90)")
    p.add_argument("--k", type=_fraction, default=0.10, help="relative half-width k (default 0.10)")
    p.add_argument("--method", choices=["linear", "longley-cook"], required=method_required,
                   default=None if method_required else "linear")
    p.add_argument("--gamma", type=float, default=DEFAULT_GAMMA, help="Longley-Cook gamma (default 0.30)")


def _add_output_args(p, formats=("text", "csv"), default="text"):
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--output", help="write to this path instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="credbt", description="Credibility-weighted uniformity backtesting.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    t = sub.add_parser("tables", help="coverage, criterion and weight tables")
    t.add_argument("kind", choices=["coverage", "criterion", "weights"])
    t.add_argument("--dist", choices=["normal", "uniform"], default="uniform")
    t.add_argument("--n", type=_int_list, help="sample sizes (coverage) or the single sample size (weights)")
    t.add_argument("--p", type=_fraction_list, help="comma-separated coverage probabilities")
    t.add_argument("--k", type=_fraction_list, help="comma-separated half-widths")
    t.add_argument("--method", choices=["linear", "longley-cook"], default="linear")
    t.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    t.add_argument("--paper-headers", action="store_true",
                   help="print the k labels exactly as in the published n=6/n=5 weight blocks")
    _add_output_args(t)

    w = sub.add_parser("weight", help="credibility weight for one sample size")
    _add_credibility_args(w)
    w.add_argument("--n", type=int, required=True)

    for name, helptext in (("adjust", "credibility-adjust pre-computed p-values"),
                           ("backtest", "test PIT series or pre-computed p-values")):
        b = sub.add_parser(name, help=helptext)
        b.add_argument("--input", required=True)
        if name == "backtest":
            b.add_argument("--test", choices=["ad", "ks", "cvm"], default="ad")
            b.add_argument("--end", type=_iso_date,
                           help="data cut-off: drop intervals realised after this date")
        _add_credibility_args(b)
        b.add_argument("--threshold", type=_fraction, default=0.01)
        _add_output_args(b, formats=("csv", "text"), default="csv")

    s = sub.add_parser("synth", help="synthetic PIT observations from a Gaussian random walk")
    s.add_argument("--model", choices=["gauss-rw"], default="gauss-rw")
    s.add_argument("--seed", type=_u64, required=True)
    s.add_argument("--paths", type=int, required=True)
    s.add_argument("--horizons", type=_horizon_list, required=True)
    s.add_argument("--start", type=_iso_date, required=True)
    s.add_argument("--end", type=_iso_date, required=True)
    s.add_argument("--freq", type=int, required=True, help="days between initialisation dates")
    s.add_argument("--misspec", type=float, default=1.0)
    s.add_argument("--vol", type=float, default=0.01, help="volatility per sqrt(day)")
    s.add_argument("--drift", type=float, default=0.0, help="drift per day")
    s.add_argument("--risk-factor", default="SYNTH")
    s.add_argument("--output")
    return parser


def _cmd_tables(args, out):
    kind = args.kind
    n_grid = None
    n = None
    if args.n:
        if kind == "weights":
            if len(args.n) != 1:
                raise UsageError("weights tables take exactly one --n")
            n = args.n[0]
        else:
            n_grid = args.n
    if kind == "weights" and n is None:
        raise UsageError("weights tables need --n")
    if kind == "weights" and args.dist != "uniform":
        raise UsageError("weights tables are defined for the uniform criterion only")
    try:
        req = TableRequest(
            kind=kind, distribution=args.dist, p_grid=args.p, k_grid=args.k, n_grid=n_grid,
            n=n, method=args.method, gamma=args.gamma, printed_headers=args.paper_headers,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    table = render_table(req)
    out.write(table.to_csv() if args.format == "csv" else table.to_text())


def _cmd_weight(args, out):
    try:
        q = CredibilityQuery(args.p, args.k)
        crit = full_credibility_uniform(q)
        z = credibility_weight(args.n, crit.rounded, args.method, args.gamma)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    lo, hi = pvalue_interval(1.0, z)
    out.write(f"method        {z.method.value}\n")
    if z.method.value == "longley_cook":
        out.write(f"gamma         {z.gamma:g}\n")
    out.write(f"P             {args.p:g}\n")
    out.write(f"k             {args.k:g}\n")
    out.write(f"n             {args.n}\n")
    out.write(f"N             {crit.rounded} (raw {crit.raw:.4f})\n")
    out.write(f"Z             {z.value:.6f} ({100 * z.value:.2f}%)\n")
    out.write(f"Z unclamped   {z.unclamped:.6f}\n")
    out.write(f"p-value band  [p*{lo:.6f}, p*{hi:.6f}]\n")


def _run_verdicts(args, out, err, *, fixture_only):
    try:
        cfg = BacktestConfig(
            coverage=args.p, half_width=args.k, method=args.method, gamma=args.gamma,
            test=getattr(args, "test", "ad"), threshold=args.threshold,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    errors: list[RowError] = []
    try:
        rows = read_rows(args.input, errors)
    except OSError as exc:
        raise DataError(f"cannot read {args.input}: {exc.strerror or exc}") from None
    except ValueError as exc:
        raise DataError(str(exc)) from None
    if fixture_only and any(not hasattr(r, "pvalue") for r in rows):
        raise DataError("adjust expects the risk_factor,horizon,pvalue,n format; use backtest for PIT data")
    verdicts = run_portfolio(rows, cfg, errors=errors, end=getattr(args, "end", None))
    for e in errors:
        err.write(f"{args.input}:{e.line}: {e.message}\n")
    if errors and not verdicts:
        raise DataError("no valid rows")
    if args.format == "csv":
        write_verdicts_csv(verdicts, out)
    else:
        order = list(dict.fromkeys(r.risk_factor for r in rows))
        out.write(verdict_matrix(verdicts, factor_order=order).to_text())


def _cmd_synth(args, out):
    try:
        spec = ScenarioSpec(
            calendar=day_calendar(args.start, args.end, args.freq),
            horizons=args.horizons, seed=args.seed, forecast_paths=args.paths,
            drift=args.drift, volatility=args.vol, misspecification=args.misspec,
            risk_factor=args.risk_factor,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    write_pit_csv(generate(spec), out)


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    buf = io.StringIO()
    try:
        if args.command == "tables":
            _cmd_tables(args, buf)
        elif args.command == "weight":
            _cmd_weight(args, buf)
        elif args.command == "adjust":
            _run_verdicts(args, buf, sys.stderr, fixture_only=True)
        elif args.command == "backtest":
            _run_verdicts(args, buf, sys.stderr, fixture_only=False)
        elif args.command == "synth":
            _cmd_synth(args, buf)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"credbt: error: {exc}\n")
        return EXIT_USAGE
    except DataError as exc:
        sys.stderr.write(f"credbt: data error: {exc}\n")
        return EXIT_DATA

    output = getattr(args, "output", None)
    if output:
        try:
            with open(output, "w", newline="") as fh:
                fh.write(buf.getvalue())
        except OSError as exc:
            sys.stderr.write(f"credbt: data error: cannot write {output}: {exc.strerror or exc}\n")
            return EXIT_DATA
    else:
        with contextlib.suppress(BrokenPipeError):
            sys.stdout.write(buf.getvalue())
    return EXIT_OK


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
