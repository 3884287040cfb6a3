"""Command-line front end.

fracfem run    --config study.cfg [flag overrides]   run a configured study
fracfem tables --paper N [--out DIR]                 rerun a benchmark preset

Exit codes: 0 full success, 1 configuration error, 2 partial report (some
(alpha, k) cells failed; completed rows are still written).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigError, FracFEMError
from .harness import (
    build_config,
    compute_study,
    emit_coefficient_table,
    emit_tables,
    parse_config_text,
    preset_configs,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracfem",
        description="Finite element convergence studies for two-point boundary "
        "value problems of fractional order alpha in (1, 2).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a study from a config file and/or flags")
    run.add_argument("--config", type=Path, help="flat key=value configuration file")
    run.add_argument("--alpha", help="comma list of orders in (1,2); fractions allowed (e.g. 7/4)")
    run.add_argument("--derivative", choices=["riemann", "caputo"], help="derivative kind")
    run.add_argument("--example", choices=["a", "b", "c", "custom"], help="bundled source or custom")
    run.add_argument("--source", help="custom source expression, e.g. 'x - x^2' or 'x^-0.25'")
    run.add_argument("--levels", help="mesh ladder k values, e.g. 1..7 or 1,3,5 (m = 10*2^k)")
    run.add_argument("--q", help="potential: 'zero', a constant, or a power expression")
    run.add_argument("--out", type=Path, help="output directory")
    run.add_argument("--tol", help="quadrature tolerance override")

    tables = sub.add_parser("tables", help="reproduce one of the benchmark tables")
    tables.add_argument("--paper", type=int, required=True, choices=range(1, 7),
                        metavar="{1..6}", help="benchmark table number")
    tables.add_argument("--out", type=Path, help="output directory (default table<N>/)")
    return parser


def _merged_values(args: argparse.Namespace) -> dict[str, str]:
    values: dict[str, str] = {}
    if args.config is not None:
        try:
            values.update(parse_config_text(args.config.read_text(encoding="utf-8")))
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    overrides = {
        "alpha": args.alpha,
        "derivative": args.derivative,
        "example": args.example,
        "source": args.source,
        "levels": args.levels,
        "q": args.q,
        "out": str(args.out) if args.out is not None else None,
        "tol": args.tol,
    }
    for key, val in overrides.items():
        if val is not None:
            values.pop("alphas" if key == "alpha" else key, None)
            values[key] = val
    return values


def _finish(reports) -> int:
    return 2 if any(r.partial for r in reports) else 0


def _cmd_run(args: argparse.Namespace) -> int:
    config = build_config(_merged_values(args))
    report = compute_study(config)
    emit_tables(report, "both")
    for row in report.rows:
        if row.error:
            print(f"fracfem: alpha={row.alpha:g} k={row.k}: {row.error}", file=sys.stderr)
    print(f"fracfem: wrote {config.output_dir}/report.csv ({report.wall_time:.2f}s)")
    return _finish([report])


def _cmd_tables(args: argparse.Namespace) -> int:
    out = args.out if args.out is not None else Path(f"table{args.paper}")
    configs = preset_configs(args.paper, out)
    reports = []
    for config in configs:
        report = compute_study(config)
        emit_tables(report, "both")
        reports.append(report)
        print(f"fracfem: wrote {config.output_dir}/report.csv ({report.wall_time:.2f}s)")
    if args.paper == 3:
        out.mkdir(parents=True, exist_ok=True)
        emit_coefficient_table(reports, out / "coefficient.txt")
        print(f"fracfem: wrote {out}/coefficient.txt")
    return _finish(reports)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_tables(args)
    except ConfigError as exc:
        print(f"fracfem: config error: {exc}", file=sys.stderr)
        return 1
    except FracFEMError as exc:
        print(f"fracfem: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
