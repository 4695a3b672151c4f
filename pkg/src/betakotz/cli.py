"""Command-line surface: measures, fit, portfolio, tables.

Exit codes: 0 success, 2 input error, 3 internal inconsistency,
4 numerical failure.  The default confidence level is 0.99 (the
setting of the reference tables); it can also be set through the
BETAKOTZ_ALPHA environment variable, with the --alpha flag winning.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import credit, estimation, risk
from .distribution import BetaKotzParams, ConfidenceLevel, mean
from .specfun import ConvergenceError, EvalTolerances

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INCONSISTENT = 3
EXIT_NUMERIC = 4

ALPHA_ENV_VAR = "BETAKOTZ_ALPHA"

# Reference (a, b) grids: the closed-form table rows and the numeric
# grid (integer rows plus the non-integer extension rows).
ANALYTIC_ROWS = [(1.0, 1.0), (2.0, 1.0), (3.0, 1.0), (1.0, 2.0), (1.0, 3.0), (1.0, 4.0)]
NUMERIC_ROWS = [
    (1.0, 1.0), (2.0, 1.0), (3.0, 1.0),
    (1.0, 2.0), (2.0, 2.0), (3.0, 2.0),
    (1.0, 3.0), (2.0, 3.0), (1.0, 4.0),
    (4.1, 1.0), (5.1, 1.5), (4.1, 4.1), (5.1, 5.1), (6.0, 6.0),
    (0.6, 0.6), (0.8, 0.8),
    (1.2, 11.4), (1.3, 13.0), (1.5, 14.1), (2.0, 19.0), (0.5, 30.0),
]


@dataclass(frozen=True)
class CliConfig:
    """Resolved run configuration."""

    alpha: ConfidenceLevel
    method: str = "both"
    output_format: str = "table"
    root_config: risk.RootSolveConfig = risk.DEFAULT_ROOT_CONFIG
    eval_tol: EvalTolerances = EvalTolerances()

    @classmethod
    def from_args(cls, args) -> "CliConfig":
        alpha = args.alpha
        if alpha is None:
            env = os.environ.get(ALPHA_ENV_VAR)
            alpha = float(env) if env else 0.99
        return cls(
            alpha=ConfidenceLevel(alpha),
            method=getattr(args, "method", "both"),
            output_format=getattr(args, "output_format", "table"),
            root_config=risk.RootSolveConfig(
                abs_tol=args.abs_tol,
                max_iters=args.max_iters,
                bracket_lo=args.bracket_lo,
                bracket_hi=args.bracket_hi,
            ),
            eval_tol=EvalTolerances(
                series_rel_tol=args.series_rel_tol,
                max_series_terms=args.max_series_terms,
                cf_max_iters=args.cf_max_iters,
            ),
        )


def _add_common_options(parser):
    parser.add_argument(
        "--alpha", type=float, default=None,
        help=f"confidence level in (0,1); default 0.99 or ${ALPHA_ENV_VAR}",
    )
    parser.add_argument(
        "--output-format", choices=("table", "csv", "json"), default="table",
        help="rendering of the result (default: table)",
    )
    solver = parser.add_argument_group("solver overrides")
    solver.add_argument("--abs-tol", type=float, default=1e-13,
                        help="root-solve residual tolerance")
    solver.add_argument("--max-iters", type=int, default=200,
                        help="root-solve iteration cap")
    solver.add_argument("--bracket-lo", type=float, default=0.0)
    solver.add_argument("--bracket-hi", type=float, default=1.0)
    solver.add_argument("--series-rel-tol", type=float, default=1e-15,
                        help="series truncation tolerance")
    solver.add_argument("--max-series-terms", type=int, default=10_000)
    solver.add_argument("--cf-max-iters", type=int, default=500,
                        help="continued-fraction iteration cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="betakotz",
        description="Beta-Kotz tail-risk measures, fitting, and credit reports",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    measures = sub.add_parser("measures", help="VaR/CVaR/EC for a shape pair")
    measures.add_argument("--a", type=float, required=True, dest="shape_a")
    measures.add_argument("--b", type=float, required=True, dest="shape_b")
    measures.add_argument(
        "--method", choices=("closed", "numeric", "both"), default="both",
        help="closed form only, numeric only, or both with cross-check",
    )
    _add_common_options(measures)

    fit = sub.add_parser("fit", help="fit shapes from a sample file")
    fit.add_argument("input", help="newline-separated or single-column CSV of "
                                   "values strictly inside (0,1)")
    fit.add_argument("--method", choices=("mom", "mle"), default="mle")
    _add_common_options(fit)

    portfolio = sub.add_parser("portfolio", help="credit-portfolio risk report")
    portfolio.add_argument("input", help="portfolio CSV (see docs for columns)")
    portfolio.add_argument("--label", default="portfolio",
                           help="period label for the report")
    _add_common_options(portfolio)

    tables = sub.add_parser("tables", help="reproduce the reference tables")
    tables.add_argument("which", choices=("analytic", "numeric"))
    _add_common_options(tables)

    return parser


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _render_rows(header, rows, fmt, out):
    """Deterministic table/CSV rendering of uniform rows."""
    if fmt == "csv":
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(row) + "\n")
    else:
        widths = [
            max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
            for i, h in enumerate(header)
        ]
        out.write("  ".join(h.rjust(w) for h, w in zip(header, widths)) + "\n")
        for row in rows:
            out.write("  ".join(v.rjust(w) for v, w in zip(row, widths)) + "\n")


def cmd_measures(cfg: CliConfig, shape_a: float, shape_b: float, out) -> int:
    p = BetaKotzParams(shape_a, shape_b)
    if cfg.method == "both":
        result = risk.report(p, cfg.alpha, cfg.root_config, cfg.eval_tol)
    elif cfg.method == "numeric":
        v = risk.var_numeric(p, cfg.alpha, cfg.root_config, cfg.eval_tol)
        m = mean(p)
        result = risk.RiskReport(
            alpha=cfg.alpha, var=v,
            cvar=risk.cvar(p, cfg.alpha, cfg.root_config, cfg.eval_tol),
            ec=v - m, mean=m, method=risk.SolveMethod.NUMERIC,
        )
    else:  # closed
        v = risk.var_closed(p, cfg.alpha)
        c = risk.cvar_closed(p, cfg.alpha)
        if v is None or c is None:
            raise ValueError(
                f"no closed form for (a={shape_a}, b={shape_b}); "
                "use --method numeric"
            )
        m = mean(p)
        result = risk.RiskReport(
            alpha=cfg.alpha, var=v, cvar=c, ec=v - m, mean=m,
            method=risk.SolveMethod.CLOSED_FORM,
        )
    if cfg.output_format == "json":
        out.write(json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n")
    else:
        header = ["alpha", "var", "cvar", "ec", "mean", "method"]
        row = [
            f"{result.alpha.alpha:.9g}",
            f"{result.var:.9f}",
            f"{result.cvar:.9f}",
            f"{result.ec:.9f}",
            f"{result.mean:.9f}",
            result.method.value,
        ]
        _render_rows(header, [row], cfg.output_format, out)
    return EXIT_OK


def _read_sample_file(path):
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as err:
        raise ValueError(f"cannot read sample file: {err}") from None
    values = []
    for line_num, line in enumerate(lines, start=1):
        text = line.strip().rstrip(",")
        if not text:
            continue
        try:
            x = float(text)
        except ValueError:
            if line_num == 1:  # tolerate a single-column CSV header
                continue
            raise ValueError(f"line {line_num}: not a number: {text!r}") from None
        if not 0.0 < x < 1.0:
            raise ValueError(
                f"line {line_num}: value {x} outside the open interval (0, 1)"
            )
        values.append(x)
    if len(values) < 2:
        raise ValueError("sample file must hold at least 2 usable values")
    return values


def cmd_fit(cfg: CliConfig, path: str, method: str, out) -> int:
    values = _read_sample_file(path)
    stats = estimation.stats_from_samples(values)
    try:
        if method == "mom":
            params = estimation.fit_moments(stats)
            result = estimation.FitResult(
                params=params, iterations=0, converged=True,
                log_likelihood=estimation.log_likelihood(params, stats),
                gradient_norm=float("nan"),
            )
        else:
            result = estimation.fit_mle(stats)
    except (estimation.InfeasibleMomentsError, estimation.StepFailureError) as err:
        sys.stderr.write(f"fit failed: {err}\n")
        return EXIT_NUMERIC
    if not result.converged:
        sys.stderr.write(
            f"fit did not converge in {result.iterations} iterations "
            f"(scaled score {result.gradient_norm:.3e})\n"
        )
        return EXIT_NUMERIC
    payload = {
        "a": result.params.a,
        "b": result.params.b,
        "n": stats.n,
        "method": method,
        "iterations": result.iterations,
        "converged": result.converged,
        "log_likelihood": result.log_likelihood,
    }
    if cfg.output_format == "json":
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        header = list(payload.keys())
        row = [
            f"{payload['a']:.9g}", f"{payload['b']:.9g}", str(stats.n), method,
            str(result.iterations), str(result.converged),
            f"{result.log_likelihood:.6f}",
        ]
        _render_rows(header, [row], cfg.output_format, out)
    return EXIT_OK


def cmd_portfolio(cfg: CliConfig, path: str, label: str, out) -> int:
    obligors = credit.read_portfolio_csv(path)
    try:
        result = credit.period_report(
            label, obligors, alpha=cfg.alpha, cfg=cfg.root_config
        )
    except ValueError as err:
        sys.stderr.write(f"portfolio pipeline failed: {err}\n")
        return EXIT_NUMERIC
    if cfg.output_format == "json":
        out.write(credit.report_to_json(result) + "\n")
    elif cfg.output_format == "csv":
        out.write(credit.report_to_csv(result))
    else:
        d = result.to_rendered_dict()
        header = ["field", "value"]
        rows = [[k, f"{v:,.2f}" if k in (
            "total_exposure", "expected_loss", "var", "ec", "cvar"
        ) else str(v)] for k, v in d.items()]
        _render_rows(header, rows, "table", out)
    return EXIT_OK


def cmd_tables(cfg: CliConfig, which: str, out) -> int:
    header = ["a", "b", "var", "cvar", "ec"]
    values = []
    if which == "analytic":
        for a, b in ANALYTIC_ROWS:
            p = BetaKotzParams(a, b)
            v = risk.var_closed(p, cfg.alpha)
            c = risk.cvar_closed(p, cfg.alpha)
            values.append((a, b, v, c, v - mean(p)))
    else:
        for a, b in NUMERIC_ROWS:
            p = BetaKotzParams(a, b)
            v = risk.var_numeric(p, cfg.alpha, cfg.root_config, cfg.eval_tol)
            c = risk.cvar(p, cfg.alpha, cfg.root_config, cfg.eval_tol)
            values.append((a, b, v, c, v - mean(p)))
    if cfg.output_format == "json":
        # Machine form carries full precision; text forms round for eyes.
        out.write(json.dumps([dict(zip(header, row)) for row in values],
                             indent=2) + "\n")
    else:
        rows = [
            [f"{a:g}", f"{b:g}", f"{v:.6f}", f"{c:.6f}", f"{e:.6f}"]
            for a, b, v, c, e in values
        ]
        _render_rows(header, rows, cfg.output_format, out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = sys.stdout
    try:
        cfg = CliConfig.from_args(args)
        if args.command == "measures":
            return cmd_measures(cfg, args.shape_a, args.shape_b, out)
        if args.command == "fit":
            return cmd_fit(cfg, args.input, args.method, out)
        if args.command == "portfolio":
            return cmd_portfolio(cfg, args.input, args.label, out)
        if args.command == "tables":
            return cmd_tables(cfg, args.which, out)
        raise AssertionError(f"unhandled command {args.command}")
    except risk.InternalConsistencyError as err:
        sys.stderr.write(f"internal consistency failure: {err}\n")
        return EXIT_INCONSISTENT
    except ConvergenceError as err:
        sys.stderr.write(f"numerical failure: {err}\n")
        return EXIT_NUMERIC
    except (ValueError, OSError) as err:
        sys.stderr.write(f"error: {err}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
