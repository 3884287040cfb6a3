"""Shared test utilities: solving single cells and caching study columns."""

from __future__ import annotations

import numpy as np

from fracfem import (
    ErrorRecord,
    Formulation,
    LinearSystem,
    Mesh,
    PiecewiseLinear,
    assemble_load,
    energy_error,
    example_suite,
    hat_stiffness,
    l2_error,
    singular_coefficient,
    solve,
)
from fracfem.assembly import DerivativeKind, half_hat_row
from fracfem.femspace import caputo_test_basis

KINDS = {
    "riemann": DerivativeKind.RIEMANN_LIOUVILLE,
    "caputo": DerivativeKind.CAPUTO,
}

ALPHAS = {"7/4": 1.75, "3/2": 1.5, "4/3": 4.0 / 3.0}


def solve_cell(example: str, kind: DerivativeKind, alpha: float, m: int):
    """Assemble and solve one mesh; returns (f, u_exact, u_h, extended_hat)."""
    mesh = Mesh(m)
    f, u = example_suite(example, alpha, kind)
    extended = hat_stiffness(mesh, alpha, extended=True)
    matrix = extended.astype(float)
    if kind is DerivativeKind.CAPUTO:
        basis = caputo_test_basis(mesh, alpha)
        matrix = matrix - np.outer(basis.ratios, half_hat_row(mesh, alpha))
    rhs = assemble_load(mesh, Formulation(kind, alpha), f)
    coeffs = solve(LinearSystem(matrix, rhs))
    values = np.zeros(m + 1)
    values[1:-1] = coeffs
    return f, u, PiecewiseLinear(values), extended


def measure_cell(example: str, kind: DerivativeKind, alpha: float, m: int) -> ErrorRecord:
    _, u, u_h, extended = solve_cell(example, kind, alpha, m)
    return ErrorRecord(
        m=m,
        h=1.0 / m,
        l2_error=l2_error(u, u_h),
        energy_error=energy_error(u, u_h, alpha, hat_matrix=extended),
        coefficient=singular_coefficient(u, u_h, alpha, kind),
    )


class GridCache:
    """Lazily computed full study columns, shared across acceptance checks."""

    def __init__(self):
        self._columns: dict[tuple[str, str, str], list[ErrorRecord]] = {}

    def column(self, example: str, kind_name: str, alpha_name: str) -> list[ErrorRecord]:
        key = (example, kind_name, alpha_name)
        if key not in self._columns:
            kind = KINDS[kind_name]
            alpha = ALPHAS[alpha_name]
            self._columns[key] = [
                measure_cell(example, kind, alpha, 10 * 2 ** k) for k in range(1, 8)
            ]
        return self._columns[key]
