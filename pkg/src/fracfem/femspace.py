"""Uniform mesh, hat bases, and the integrally-constrained test basis.

The trial space consists of interior hats vanishing at both endpoints.  For
the Caputo formulation the test functions additionally satisfy the moment
constraint (x^{1-alpha}, v) = 0; a basis is obtained by correcting each hat
that vanishes at 1 with a multiple of the left half-hat.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .fracpoly import PiecewiseLinear, PowerSum, Side, Term, as_order

__all__ = [
    "Mesh",
    "TrialBasis",
    "CaputoTestBasis",
    "weight_moment",
    "weight_moments",
    "caputo_test_basis",
    "interpolate",
]


@dataclass(frozen=True)
class Mesh:
    """Uniform partition of (0, 1) into m >= 2 elements."""

    m: int

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 2:
            raise ParameterError(f"mesh needs m >= 2 elements, got {self.m!r}")

    @property
    def h(self) -> float:
        return 1.0 / self.m

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.m + 1) / self.m


def _nodal_hat(mesh: Mesh, i: int) -> PiecewiseLinear:
    values = np.zeros(mesh.m + 1)
    values[i] = 1.0
    return PiecewiseLinear(values)


@dataclass(frozen=True)
class TrialBasis:
    """Interior hats phi_1 .. phi_{m-1}; each vanishes at both endpoints."""

    mesh: Mesh

    @property
    def size(self) -> int:
        return self.mesh.m - 1

    def function(self, i: int) -> PiecewiseLinear:
        if not 1 <= i <= self.mesh.m - 1:
            raise ParameterError(f"interior hat index must lie in 1..{self.mesh.m - 1}, got {i}")
        return _nodal_hat(self.mesh, i)

    def derivative(self, i: int) -> PowerSum:
        """The piecewise-constant derivative as a sum of unit steps."""
        return self.function(i).derivative_power_sum()


def weight_moments(mesh: Mesh, alpha: float) -> np.ndarray:
    """All moments mu_i = (x^{1-alpha}, psi_i), i = 0..m-1, in closed form.

    psi_0 is the left half-hat, psi_i (i >= 1) the full hat at node i.  The
    antiderivatives x^{2-alpha}/(2-alpha) and x^{3-alpha}/(3-alpha) make every
    moment elementary; all are positive.
    """
    a = as_order(alpha, 1.0, 2.0)
    nodes = mesh.nodes
    p1 = nodes ** (2.0 - a) / (2.0 - a)
    p2 = nodes ** (3.0 - a) / (3.0 - a)
    up = np.diff(p2) - nodes[:-1] * np.diff(p1)      # (x^{1-a}, rising flank on element k) * h
    down = nodes[1:] * np.diff(p1) - np.diff(p2)     # (x^{1-a}, falling flank on element k) * h
    mu = np.empty(mesh.m)
    mu[0] = down[0]
    mu[1:] = up[:-1] + down[1:]
    return mu / mesh.h


def weight_moment(mesh: Mesh, alpha: float, i: int) -> float:
    """Single moment mu_i = (x^{1-alpha}, psi_i) for i in 0..m-1."""
    if not 0 <= i <= mesh.m - 1:
        raise ParameterError(f"moment index must lie in 0..{mesh.m - 1}, got {i}")
    return float(weight_moments(mesh, alpha)[i])


@dataclass(frozen=True)
class CaputoTestBasis:
    """Constrained test functions eta_i = psi_i - (mu_i/mu_0) psi_0, i = 1..m-1.

    Every member vanishes at 1 and is orthogonal to the weight x^{1-alpha};
    the count matches the trial space, so the discrete system stays square.
    """

    mesh: Mesh
    alpha: float
    moments: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.mesh.m - 1

    @property
    def ratios(self) -> np.ndarray:
        """mu_i / mu_0 for i = 1..m-1."""
        return self.moments[1:] / self.moments[0]

    def function(self, i: int) -> PiecewiseLinear:
        if not 1 <= i <= self.mesh.m - 1:
            raise ParameterError(f"test index must lie in 1..{self.mesh.m - 1}, got {i}")
        values = np.zeros(self.mesh.m + 1)
        values[i] = 1.0
        values[0] = -self.moments[i] / self.moments[0]
        return PiecewiseLinear(values)


def caputo_test_basis(mesh: Mesh, alpha: float) -> CaputoTestBasis:
    """Build the constrained basis; mu_0 > 0 guarantees it is well defined."""
    a = as_order(alpha, 1.0, 2.0)
    mu = weight_moments(mesh, a)
    mu.setflags(write=False)
    return CaputoTestBasis(mesh=mesh, alpha=a, moments=mu)


def interpolate(f, mesh: Mesh, boundary: str = "free") -> PiecewiseLinear:
    """Nodal interpolant of f on the mesh.

    f may be a PowerSum, PiecewiseLinear, or any callable accepting an
    ndarray of nodes.  boundary forces nodal values to zero:
    "both-ends-zero" for the trial space, "right-end-zero" for test-space
    interpolants, "free" for none.  Evaluation at a node where f is singular
    propagates the evaluability error rather than regularizing.
    """
    if boundary not in ("free", "both-ends-zero", "right-end-zero"):
        raise ParameterError(f"unknown boundary option {boundary!r}")
    values = np.asarray(f(mesh.nodes), dtype=float)
    if values.shape != mesh.nodes.shape or not np.all(np.isfinite(values)):
        raise ParameterError("interpolated values must be finite at every node")
    values = values.copy()
    if boundary == "both-ends-zero":
        values[0] = 0.0
        values[-1] = 0.0
    elif boundary == "right-end-zero":
        values[-1] = 0.0
    return PiecewiseLinear(values)
