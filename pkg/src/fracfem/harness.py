"""Study configuration, execution, and report emission.

A study fixes the derivative kind, a list of orders alpha, a source term, a
mesh ladder m = 10 * 2^k, and an optional potential.  Each (alpha, k) cell
assembles, solves, and measures errors against the closed-form solution
(available whenever q = 0); the collected records become report.csv,
report.txt, and a log-log convergence figure in the output directory.

With q != 0 no closed-form truth exists, so cells report residual-based
diagnostics instead: the algebraic residual of the solved system and the
L2 difference between consecutive mesh levels.
"""

from __future__ import annotations

import math
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from ._version import __version__
from .analytic import EXAMPLES, primal_solution
from .assembly import (
    DerivativeKind,
    Formulation,
    LinearSystem,
    assemble_load,
    assemble_potential,
    half_hat_row,
    hat_stiffness,
    solve,
)
from .errors import ConfigError, FracFEMError
from .femspace import Mesh, caputo_test_basis
from .fracpoly import PiecewiseLinear, PowerSum, Side
from .metrics import ErrorRecord, convergence_rates, energy_error, l2_error, singular_coefficient

__all__ = [
    "StudyConfig",
    "CellRow",
    "ConvergenceReport",
    "parse_power_expr",
    "parse_config_text",
    "build_config",
    "compute_study",
    "emit_tables",
    "run_study",
    "TABLE_PRESETS",
    "preset_configs",
]

_CSV_COLUMNS = (
    "derivative,alpha,example,k,m,h,l2_error,halpha_error,coefficient,"
    "l2_rate_step,halpha_rate_step"
)

#: number of finest levels entering the reported least-squares rate
_FIT_LEVELS = 4


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

_TERM_RE = re.compile(
    r"^\s*(?P<coef>[+-]?\d*\.?\d+(?:[eE][+-]?\d+)?)?\s*\*?\s*"
    r"(?:(?P<base>x|\(1-x\))(?:\^(?P<exp>[+-]?\d*\.?\d+(?:/\d+)?))?)?\s*$"
)


def _parse_number(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse number {text!r}") from exc


def parse_power_expr(text: str) -> PowerSum:
    """Parse a small power/polynomial grammar into a PowerSum.

    Terms are separated by + or -; each term is a number, c*x^p, x^p,
    c*(1-x)^p, or the bare bases x and (1-x).  Exponents may be decimals or
    simple fractions and must exceed -1.
    """
    cleaned = text.strip()
    if not cleaned:
        raise ConfigError("empty source expression")
    pieces = re.split(r"(?<![eE*^/+-])([+-])", "+" + cleaned if cleaned[0] not in "+-" else cleaned)
    # re.split keeps separators; stitch (sign, term) pairs
    body = [p for p in pieces if p.strip()]
    if len(body) % 2 != 0:
        raise ConfigError(f"cannot parse expression {text!r}")
    result = PowerSum.zero()
    for sign, term in zip(body[0::2], body[1::2]):
        match = _TERM_RE.match(term)
        if not match or (match.group("coef") is None and match.group("base") is None):
            raise ConfigError(f"cannot parse term {term!r} in {text!r}")
        coef = _parse_number(match.group("coef")) if match.group("coef") else 1.0
        if sign == "-":
            coef = -coef
        base = match.group("base")
        if base is None:
            result = result + PowerSum.constant(coef)
            continue
        exponent = _parse_number(match.group("exp")) if match.group("exp") else 1.0
        if not exponent > -1.0:
            raise ConfigError(f"exponent {exponent!r} must exceed -1 in {text!r}")
        if base == "x":
            result = result + PowerSum.x_power(coef, exponent)
        else:
            result = result + PowerSum.one_minus_x_power(coef, exponent)
    return result


@dataclass(frozen=True)
class StudyConfig:
    """Everything needed to run one convergence study."""

    derivative: DerivativeKind
    alphas: tuple[float, ...]
    example: str = "b"
    source: Optional[PowerSum] = None
    levels: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7)
    q: Optional[PowerSum] = None
    output_dir: Path = Path("fracfem-out")
    tol: float = 1e-12

    def __post_init__(self):
        if not self.alphas:
            raise ConfigError("need at least one alpha")
        for a in self.alphas:
            if not 1.0 < a < 2.0:
                raise ConfigError(f"alpha {a!r} outside (1, 2)")
        if not self.levels or list(self.levels) != sorted(set(self.levels)):
            raise ConfigError("levels must be nonempty, ascending, and distinct")
        if any(k < 0 for k in self.levels):
            raise ConfigError("levels must be nonnegative")
        if self.example not in ("a", "b", "c", "custom"):
            raise ConfigError(f"unknown example {self.example!r}")
        if self.example == "custom" and self.source is None:
            raise ConfigError("custom studies need a source expression")
        if (
            self.example == "custom"
            and (self.q is None or not self.q.terms)
            and any(t.side is Side.RIGHT for t in self.source.terms)
        ):
            raise ConfigError(
                "exact-solution studies need a left-sided custom source; "
                "set a potential to run in diagnostics mode instead"
            )
        if not self.tol > 0.0:
            raise ConfigError("tol must be positive")

    @property
    def has_potential(self) -> bool:
        return self.q is not None and bool(self.q.terms)

    def source_term(self) -> PowerSum:
        if self.example == "custom":
            return self.source
        return EXAMPLES[self.example].f


def parse_config_text(text: str) -> dict[str, str]:
    """Flat key=value lines; '#' starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    return values


def _parse_levels(text: str) -> tuple[int, ...]:
    text = text.strip()
    span = re.fullmatch(r"(\d+)\.\.(\d+)", text)
    if span:
        lo, hi = int(span.group(1)), int(span.group(2))
        return tuple(range(lo, hi + 1))
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"cannot parse levels {text!r}") from exc


def build_config(values: dict[str, str]) -> StudyConfig:
    """Validate merged key=value settings into a StudyConfig."""
    known = {"derivative", "alphas", "alpha", "example", "source", "levels", "q", "out", "tol"}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        kind = DerivativeKind(values.get("derivative", "riemann"))
    except ValueError as exc:
        raise ConfigError(f"derivative must be riemann or caputo, got {values.get('derivative')!r}") from exc
    alpha_text = values.get("alphas", values.get("alpha", "3/2"))
    alphas = tuple(_parse_number(p) for p in alpha_text.split(","))
    example = values.get("example", "b")
    source = parse_power_expr(values["source"]) if "source" in values else None
    levels = _parse_levels(values.get("levels", "1..7"))
    q_text = values.get("q", "zero").strip()
    q = None if q_text in ("zero", "0", "") else parse_power_expr(q_text)
    out = Path(values.get("out", "fracfem-out"))
    tol = _parse_number(values.get("tol", "1e-12"))
    return StudyConfig(
        derivative=kind, alphas=alphas, example=example, source=source,
        levels=levels, q=q, output_dir=out, tol=tol,
    )


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

@dataclass
class CellRow:
    alpha: float
    k: int
    m: int
    h: float
    record: Optional[ErrorRecord] = None
    residual: Optional[float] = None
    level_diff: Optional[float] = None
    coefficients: Optional[np.ndarray] = field(default=None, repr=False)
    error: Optional[str] = None


@dataclass
class ConvergenceReport:
    config: StudyConfig
    rows: list[CellRow]
    fitted: dict[tuple[float, str], float]
    per_step: dict[tuple[float, str], list[float]]
    wall_time: float
    version: str = __version__

    @property
    def partial(self) -> bool:
        return any(r.error is not None for r in self.rows)


def _thread_count(threads: Optional[int]) -> int:
    if threads is None:
        env = os.environ.get("FRACFEM_THREADS", "").strip()
        if not env:
            return 1
        threads = int(env)
    if threads == 0:
        return os.cpu_count() or 1
    if threads < 0:
        raise ConfigError("thread count must be nonnegative")
    return threads


def _exact_solution(config: StudyConfig, alpha: float) -> PowerSum:
    return primal_solution(config.source_term(), alpha, config.derivative)


def _run_cell(config: StudyConfig, alpha: float, k: int) -> CellRow:
    m = 10 * 2 ** k
    mesh = Mesh(m)
    row = CellRow(alpha=alpha, k=k, m=m, h=mesh.h)
    form = Formulation(config.derivative, alpha, config.q)
    extended = hat_stiffness(mesh, alpha, extended=True)
    matrix = extended.astype(float)
    if config.derivative is DerivativeKind.CAPUTO:
        basis = caputo_test_basis(mesh, alpha)
        matrix = matrix - np.outer(basis.ratios, half_hat_row(mesh, alpha))
    if form.has_potential:
        matrix = matrix + assemble_potential(mesh, form, config.tol)
    rhs = assemble_load(mesh, form, config.source_term())
    system = LinearSystem(matrix, rhs)
    coeffs = solve(system)
    values = np.zeros(m + 1)
    values[1:-1] = coeffs
    u_h = PiecewiseLinear(values)
    row.coefficients = values
    row.residual = float(np.max(np.abs(matrix @ coeffs - rhs)))
    if not config.has_potential:
        u = _exact_solution(config, alpha)
        row.record = ErrorRecord(
            m=m,
            h=mesh.h,
            l2_error=l2_error(u, u_h, config.tol),
            energy_error=energy_error(u, u_h, alpha, hat_matrix=extended, tol=config.tol),
            coefficient=singular_coefficient(u, u_h, alpha, config.derivative, config.tol),
        )
    return row


def compute_study(config: StudyConfig, threads: Optional[int] = None) -> ConvergenceReport:
    """Run every (alpha, k) cell and attach rate summaries.

    Cells are independent and may execute on a thread pool; results are
    assembled in configuration order, so the report does not depend on the
    execution schedule.
    """
    start = time.perf_counter()
    cells = [(alpha, k) for alpha in config.alphas for k in config.levels]

    def safe_cell(args):
        alpha, k = args
        try:
            return _run_cell(config, alpha, k)
        except FracFEMError as exc:
            m = 10 * 2 ** k
            return CellRow(alpha=alpha, k=k, m=m, h=1.0 / m,
                           error=f"{type(exc).__name__}: {exc}")

    workers = _thread_count(threads)
    if workers > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(safe_cell, cells))
    else:
        rows = [safe_cell(c) for c in cells]

    by_alpha: dict[float, list[CellRow]] = {}
    for row in rows:
        by_alpha.setdefault(row.alpha, []).append(row)

    # consecutive-level differences as the q != 0 convergence diagnostic
    if config.has_potential:
        for group in by_alpha.values():
            for prev, cur in zip(group, group[1:]):
                if prev.coefficients is None or cur.coefficients is None:
                    continue
                if cur.k == prev.k + 1:
                    cur.level_diff = _nested_difference(prev.coefficients, cur.coefficients)

    fitted: dict[tuple[float, str], float] = {}
    per_step: dict[tuple[float, str], list[float]] = {}
    for alpha, group in by_alpha.items():
        recs = [r.record for r in group if r.record is not None]
        if len(recs) < 2 or len(recs) != len(group):
            continue
        for label, getter in (("l2", lambda r: r.l2_error), ("halpha", lambda r: r.halpha_norm)):
            pairs = [(1.0 / r.m, getter(r)) for r in recs]
            try:
                steps, _ = convergence_rates(pairs)
                _, fit = convergence_rates(pairs[-_FIT_LEVELS:])
            except FracFEMError:
                continue
            per_step[(alpha, label)] = steps
            fitted[(alpha, label)] = fit
    return ConvergenceReport(
        config=config, rows=rows, fitted=fitted, per_step=per_step,
        wall_time=time.perf_counter() - start,
    )


def _nested_difference(coarse: np.ndarray, fine: np.ndarray) -> float:
    """L2 norm of the difference of nodal interpolants on nested meshes."""
    u = PiecewiseLinear(coarse)
    v = PiecewiseLinear(fine)
    return l2_error(u, v)


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.5e}"


def _csv_lines(report: ConvergenceReport) -> list[str]:
    lines = [_CSV_COLUMNS]
    cfg = report.config
    for alpha in cfg.alphas:
        group = [r for r in report.rows if r.alpha == alpha]
        prev_rec = None
        prev_k = None
        for row in group:
            rec = row.record
            l2_step = halpha_step = ""
            consecutive = prev_k is not None and row.k == prev_k + 1
            if consecutive and rec is not None and prev_rec is not None \
                    and rec.l2_error > 0 and prev_rec.l2_error > 0:
                l2_step = _fmt(math.log2(prev_rec.l2_error / rec.l2_error))
                halpha_step = _fmt(math.log2(prev_rec.halpha_norm / rec.halpha_norm))
            lines.append(
                f"{cfg.derivative.value},{alpha:.12g},{cfg.example},{row.k},{row.m},"
                f"{row.h:.5e},"
                f"{_fmt(rec.l2_error if rec else None)},"
                f"{_fmt(rec.halpha_norm if rec else None)},"
                f"{_fmt(rec.coefficient if rec else None)},"
                f"{l2_step},{halpha_step}"
            )
            prev_rec = rec
            prev_k = row.k
        if (alpha, "l2") in report.fitted:
            lines.append(
                f"{cfg.derivative.value},{alpha:.12g},{cfg.example},fit,,,,,,"
                f"{_fmt(report.fitted[(alpha, 'l2')])},{_fmt(report.fitted[(alpha, 'halpha')])}"
            )
    return lines


def _text_lines(report: ConvergenceReport) -> list[str]:
    cfg = report.config
    lines = [
        "fracfem convergence report",
        f"derivative={cfg.derivative.value} example={cfg.example} "
        f"levels={','.join(str(k) for k in cfg.levels)} (m = 10*2^k) tol={cfg.tol:g}",
        f"q={'0' if not cfg.has_potential else 'nonzero'} version={report.version}",
        "",
    ]
    header = "  {:<10}".format("k") + "".join(f"{k:>11}" for k in cfg.levels) + f"{'rate':>9}"
    for alpha in cfg.alphas:
        group = [r for r in report.rows if r.alpha == alpha]
        lines.append(f"alpha = {alpha:.12g}")
        lines.append(header)
        if cfg.has_potential:
            res = "".join(f"{(r.residual if r.residual is not None else float('nan')):>11.2e}" for r in group)
            dif = "".join("{:>11}".format(f"{r.level_diff:.2e}" if r.level_diff is not None else "-") for r in group)
            lines.append("  {:<10}".format("residual") + res)
            lines.append("  {:<10}".format("diff-L2") + dif)
        else:
            for label, getter, key in (
                ("L2-norm", lambda r: r.record.l2_error if r.record else None, "l2"),
                ("H(a/2)", lambda r: r.record.halpha_norm if r.record else None, "halpha"),
            ):
                vals = "".join(
                    "{:>11}".format(f"{getter(r):.2e}" if getter(r) is not None else "failed")
                    for r in group
                )
                fit = report.fitted.get((alpha, key))
                lines.append("  {:<10}".format(label) + vals + ("{:>9.2f}".format(fit) if fit is not None else ""))
        for row in group:
            if row.error:
                lines.append(f"  ! k={row.k}: {row.error}")
        lines.append("")
    if report.partial:
        lines.append("PARTIAL REPORT: one or more cells failed")
    return lines


def _emit_figure(report: ConvergenceReport, path: Path) -> None:
    groups = {}
    for row in report.rows:
        if row.record is not None:
            groups.setdefault(row.alpha, []).append(row.record)
    if not groups:
        return
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for alpha, recs in sorted(groups.items()):
        hs = [r.h for r in recs]
        ax.loglog(hs, [r.l2_error for r in recs], "o-", label=f"L2, alpha={alpha:.4g}")
        ax.loglog(hs, [r.halpha_norm for r in recs], "s--", label=f"H(a/2), alpha={alpha:.4g}")
    ax.set_xlabel("h")
    ax.set_ylabel("error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def emit_tables(report: ConvergenceReport, fmt: str = "both") -> list[Path]:
    """Write report.csv / report.txt (and the convergence figure) to the
    configured output directory; returns the written paths."""
    outdir = report.config.output_dir
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    try:
        if fmt in ("csv", "both"):
            path = outdir / "report.csv"
            path.write_text("\n".join(_csv_lines(report)) + "\n", encoding="utf-8", newline="\n")
            written.append(path)
        if fmt in ("text", "both"):
            path = outdir / "report.txt"
            path.write_text("\n".join(_text_lines(report)) + "\n", encoding="utf-8", newline="\n")
            written.append(path)
        if fmt == "both":
            fig_path = outdir / "convergence.png"
            _emit_figure(report, fig_path)
            if fig_path.exists():
                written.append(fig_path)
    except OSError as exc:
        raise ConfigError(f"cannot write report under {outdir}: {exc}") from exc
    return written


def run_study(config: StudyConfig, threads: Optional[int] = None) -> ConvergenceReport:
    """compute_study followed by emission of all outputs."""
    report = compute_study(config, threads=threads)
    emit_tables(report, "both")
    return report


# ---------------------------------------------------------------------------
# presets reproducing the published tables
# ---------------------------------------------------------------------------

_PRESET_ALPHAS = (1.75, 1.5, 4.0 / 3.0)

TABLE_PRESETS = {
    1: ("a", DerivativeKind.RIEMANN_LIOUVILLE),
    2: ("a", DerivativeKind.CAPUTO),
    3: None,  # coefficient study: example (a), alpha = 3/2, both kinds
    4: ("b", DerivativeKind.CAPUTO),
    5: ("b", DerivativeKind.RIEMANN_LIOUVILLE),
    6: ("c", DerivativeKind.CAPUTO),
}


def preset_configs(number: int, out: Path) -> list[StudyConfig]:
    """Study configurations reproducing the numbered benchmark table."""
    if number not in TABLE_PRESETS:
        raise ConfigError(f"no preset for table {number}; choose 1-6")
    if number == 3:
        return [
            StudyConfig(derivative=kind, alphas=(1.5,), example="a",
                        output_dir=out / kind.value)
            for kind in (DerivativeKind.RIEMANN_LIOUVILLE, DerivativeKind.CAPUTO)
        ]
    example, kind = TABLE_PRESETS[number]
    return [StudyConfig(derivative=kind, alphas=_PRESET_ALPHAS, example=example, output_dir=out)]


def emit_coefficient_table(reports: list[ConvergenceReport], path: Path) -> None:
    """Side-by-side coefficient decay of the two derivative kinds."""
    lines = ["coefficient of the right-endpoint singular factor, example (a), alpha=3/2", ""]
    ks = reports[0].config.levels
    lines.append("  {:<10}".format("k") + "".join(f"{k:>11}" for k in ks))
    for report in reports:
        vals = "".join(
            "{:>11}".format(f"{r.record.coefficient:.2e}" if r.record else "failed")
            for r in report.rows
        )
        lines.append("  {:<10}".format(report.config.derivative.value[:9]) + vals)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
