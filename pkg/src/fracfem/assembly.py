"""Assembly and solution of the discrete Petrov-Galerkin systems.

The bilinear form acts on piecewise linears through the identity
A(u, v) = (I^{2-alpha} u', v'): the order-(2-alpha) integral maps each unit
step of u' to a truncated power (x - x_k)^{2-alpha} / Gamma(3-alpha), and
pairing against the piecewise-constant v' integrates those powers between
nodes.  Every stiffness entry is therefore a finite combination of values
(x_l - x_k)^{3-alpha}, with no quadrature.

The Galerkin system tests against the interior hats; the Caputo system tests
against the constrained basis, which differs from the hat-hat matrix by a
rank-one correction built from the left half-hat row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Union

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import NearSingularMatrixError, ParameterError
from .femspace import Mesh, caputo_test_basis
from .fracpoly import PiecewiseLinear, PowerSum, Side, as_order, evaluate
from .quadrature import gauss_jacobi_rule

__all__ = [
    "DerivativeKind",
    "Formulation",
    "LinearSystem",
    "hat_stiffness",
    "half_hat_row",
    "assemble_stiffness",
    "assemble_load",
    "assemble_potential",
    "solve",
    "test_hat_loads",
]

#: pivots below this multiple of the matrix scale flag near-singularity
_PIVOT_FLOOR = 1e-14

#: solved systems must satisfy ||Ax-b||_inf <= this * (||A|| ||x|| + ||b||)
_RESIDUAL_FLOOR = 1e-10


class DerivativeKind(Enum):
    RIEMANN_LIOUVILLE = "riemann"
    CAPUTO = "caputo"


PotentialLike = Union[None, PowerSum, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class Formulation:
    """Derivative kind, order alpha in (1, 2), and bounded potential q.

    q = None is the distinguished zero potential; a PowerSum or an
    ndarray-aware callable gives a general bounded coefficient.
    """

    kind: DerivativeKind
    alpha: float
    q: PotentialLike = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_order(self.alpha, 1.0, 2.0))

    @property
    def has_potential(self) -> bool:
        if self.q is None:
            return False
        if isinstance(self.q, PowerSum):
            return bool(self.q.terms)
        return True


@dataclass
class LinearSystem:
    """Dense square system with the trial coefficients filled in by solve()."""

    matrix: np.ndarray
    rhs: np.ndarray
    solution: Optional[np.ndarray] = None


def _step_pair_matrix(mesh: Mesh, alpha: float) -> np.ndarray:
    """P[k, l] = integral of I^{2-alpha}(step at x_k) over (x_l, 1).

    Closed form [(1-x_k)^{3-alpha} - ((x_l-x_k)_+)^{3-alpha}] / Gamma(4-alpha)
    for anchors x_0..x_{m-1}; the row/column for an anchor at 1 would multiply
    a step supported nowhere, so the returned array is padded with zeros at
    index m to let stencils run off the end.

    Built in extended precision: stiffness entries are second differences of
    these O(1) values divided by h^2, which in double precision would leave
    entry noise of order eps/h^2 -- enough to swamp the energy form of the
    finest-mesh errors.
    """
    nodes = np.arange(mesh.m, dtype=np.longdouble) / np.longdouble(mesh.m)
    g = np.longdouble(3.0 - alpha)
    rising = (np.longdouble(1.0) - nodes) ** g
    gaps = np.clip(nodes[None, :] - nodes[:, None], 0.0, None) ** g
    P = np.zeros((mesh.m + 1, mesh.m + 1), dtype=np.longdouble)
    P[: mesh.m, : mesh.m] = (rising[:, None] - gaps) / np.longdouble(math.gamma(4.0 - alpha))
    return P


def hat_stiffness(mesh: Mesh, alpha: float, extended: bool = False) -> np.ndarray:
    """Matrix of A(phi_j, phi_i) over the interior hats, entry (i, j).

    Convolution structure on the uniform mesh makes this Toeplitz.  With
    extended=True the long-double intermediate is returned uncast, for
    quadratic forms that cancel far below double-precision entry noise.
    """
    a = as_order(alpha, 1.0, 2.0)
    P = _step_pair_matrix(mesh, a)
    m = mesh.m
    stencil = (1.0, -2.0, 1.0)
    A = np.zeros((m - 1, m - 1), dtype=np.longdouble)
    for dk, wk in zip((-1, 0, 1), stencil):      # trial anchor offset
        for dl, wl in zip((-1, 0, 1), stencil):  # test anchor offset
            A += wk * wl * P[1 + dk : m + dk, 1 + dl : m + dl].T
    A *= np.longdouble(mesh.m) ** 2
    return A if extended else A.astype(float)


def half_hat_row(mesh: Mesh, alpha: float) -> np.ndarray:
    """Row of A(phi_j, psi_0) for j = 1..m-1 against the left half-hat."""
    a = as_order(alpha, 1.0, 2.0)
    P = _step_pair_matrix(mesh, a)
    m = mesh.m
    row = np.zeros(m - 1, dtype=np.longdouble)
    for dk, wk in zip((-1, 0, 1), (1.0, -2.0, 1.0)):
        row += wk * (-P[1 + dk : m + dk, 0] + P[1 + dk : m + dk, 1])
    return (row * np.longdouble(mesh.m) ** 2).astype(float)


def assemble_stiffness(mesh: Mesh, formulation: Formulation) -> np.ndarray:
    """Stiffness matrix of the chosen formulation, entry (i, j) = A(phi_j, t_i)."""
    A = hat_stiffness(mesh, formulation.alpha)
    if formulation.kind is DerivativeKind.RIEMANN_LIOUVILLE:
        return A
    basis = caputo_test_basis(mesh, formulation.alpha)
    return A - np.outer(basis.ratios, half_hat_row(mesh, formulation.alpha))


def test_hat_loads(f: PowerSum, mesh: Mesh) -> np.ndarray:
    """(f, psi_i) for i = 0..m-1: the half-hat then the hats vanishing at 1.

    Per truncated-power term the element integrals of (x-a)^p and x (x-a)^p
    are elementary; support clipping handles anchors inside the mesh.
    """
    nodes = mesh.nodes
    m = mesh.m
    loads = np.zeros(m + 1)  # index i: full nodal hat at node i (half-hats at ends)
    for t in f.terms:
        if t.side is Side.LEFT:
            d = np.clip(nodes - t.anchor, 0.0, None)
            p1 = d ** (t.exponent + 1.0) / (t.exponent + 1.0)
            p2 = d ** (t.exponent + 2.0) / (t.exponent + 2.0) + t.anchor * p1
        else:
            d = np.clip(t.anchor - nodes, 0.0, None)
            p1 = -(d ** (t.exponent + 1.0)) / (t.exponent + 1.0)
            p2 = d ** (t.exponent + 2.0) / (t.exponent + 2.0) + t.anchor * p1
        i1 = np.diff(p1)  # integral of the power over each element
        i2 = np.diff(p2)  # integral of x * power over each element
        rising = i2 - nodes[:-1] * i1
        falling = nodes[1:] * i1 - i2
        loads[:-1] += t.coef * falling
        loads[1:] += t.coef * rising
    return loads[:-1] / mesh.h


def assemble_load(mesh: Mesh, formulation: Formulation, f: PowerSum) -> np.ndarray:
    """Load vector (f, t_i), i = 1..m-1, for the chosen test functions."""
    loads = test_hat_loads(f, mesh)
    if formulation.kind is DerivativeKind.RIEMANN_LIOUVILLE:
        return loads[1:]
    basis = caputo_test_basis(mesh, formulation.alpha)
    return loads[1:] - basis.ratios * loads[0]


def _evaluate_potential(q: PotentialLike, x: np.ndarray) -> np.ndarray:
    if isinstance(q, PowerSum):
        return evaluate(q, x)
    return np.asarray(q(x), dtype=float)


def _nodal_mass_with_potential(mesh: Mesh, q: PotentialLike, n: int) -> np.ndarray:
    """(q hat_j, hat_i) over all nodal hats (half-hats included), n-point rule."""
    rule = gauss_jacobi_rule(n)
    m = mesh.m
    h = mesh.h
    t = 0.5 * (rule.nodes + 1.0)              # reference coordinate on each element
    pts = mesh.nodes[:-1, None] + h * t[None, :]
    qv = _evaluate_potential(q, pts.ravel()).reshape(pts.shape)
    w = 0.5 * h * rule.weights
    lo = 1.0 - t                               # hat at the element's left node
    hi = t                                     # hat at the element's right node
    M = np.zeros((m + 1, m + 1))
    ll = (qv * (lo * lo)[None, :]) @ w
    lh = (qv * (lo * hi)[None, :]) @ w
    hh = (qv * (hi * hi)[None, :]) @ w
    idx = np.arange(m)
    np.add.at(M, (idx, idx), ll)
    np.add.at(M, (idx, idx + 1), lh)
    np.add.at(M, (idx + 1, idx), lh)
    np.add.at(M, (idx + 1, idx + 1), hh)
    return M


def assemble_potential(mesh: Mesh, formulation: Formulation, tol: float = 1e-12) -> np.ndarray:
    """Matrix of (q phi_j, t_i); per-element Gauss-Legendre with node doubling.

    The zero potential short-circuits to an exact zero matrix.
    """
    m = mesh.m
    if not formulation.has_potential:
        return np.zeros((m - 1, m - 1))
    n = 8
    M = _nodal_mass_with_potential(mesh, formulation.q, n)
    for _ in range(12):
        n *= 2
        M2 = _nodal_mass_with_potential(mesh, formulation.q, n)
        if np.max(np.abs(M2 - M)) <= tol * max(1.0, float(np.max(np.abs(M2)))):
            M = M2
            break
        M = M2
    else:
        raise ParameterError("potential quadrature did not converge; is q bounded?")
    if formulation.kind is DerivativeKind.RIEMANN_LIOUVILLE:
        return M[1:m, 1:m]
    basis = caputo_test_basis(mesh, formulation.alpha)
    return M[1:m, 1:m] - np.outer(basis.ratios, M[0, 1:m])


def solve(system: LinearSystem) -> np.ndarray:
    """Dense LU with partial pivoting; fills in and returns the coefficients.

    Raises NearSingularMatrixError when a pivot falls below the scaled floor,
    which is how the mesh-threshold caveat of the discrete theory surfaces at
    runtime.  The solved system satisfies the residual contract
    ||Ax - b||_inf <= 1e-10 (||A||_inf ||x||_inf + ||b||_inf).
    """
    A = np.asarray(system.matrix, dtype=float)
    b = np.asarray(system.rhs, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] != b.shape[0]:
        raise ParameterError(f"system must be square, got matrix {A.shape} and rhs {b.shape}")
    if not np.all(np.isfinite(A)) or not np.all(np.isfinite(b)):
        raise ParameterError("system entries must be finite")
    lu, piv = lu_factor(A)
    row_scale = float(np.max(np.abs(A)))
    pivots = np.abs(np.diag(lu))
    if row_scale == 0.0 or np.min(pivots) <= _PIVOT_FLOOR * row_scale:
        raise NearSingularMatrixError(
            f"pivot {float(np.min(pivots)):.3e} below {_PIVOT_FLOOR:g} * scale {row_scale:.3e}"
        )
    x = lu_solve((lu, piv), b)
    residual = float(np.max(np.abs(A @ x - b)))
    bound = _RESIDUAL_FLOOR * (
        float(np.linalg.norm(A, np.inf)) * float(np.max(np.abs(x), initial=0.0))
        + float(np.max(np.abs(b), initial=0.0))
    )
    if residual > bound:
        raise NearSingularMatrixError(
            f"residual {residual:.3e} exceeds contract bound {bound:.3e}"
        )
    system.solution = x
    return x
