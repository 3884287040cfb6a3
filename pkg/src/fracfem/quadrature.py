"""Gauss-Jacobi rules and a singularity-aware composite integrator.

Every inner product in this package that has no closed form is reduced to
integrals with algebraic endpoint behaviour ``(x-a)^p (b-x)^q``, ``p, q > -1``.
The integrator here factors those endpoint weights into a mapped Gauss-Jacobi
rule and doubles the node count until two successive estimates agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ParameterError, QuadratureConvergenceError

__all__ = ["QuadRule", "gauss_jacobi_rule", "integrate_singular"]

#: dyadic grading levels toward each endpoint of a composite integral
_GRADE_LEVELS = 12

#: first node count tried by the doubling loop
_BASE_NODES = 8


@dataclass(frozen=True)
class QuadRule:
    """Quadrature rule on (-1, 1) for the weight (1-t)^a (1+t)^b.

    Attributes
    ----------
    nodes : ndarray
        Strictly increasing points in (-1, 1).
    weights : ndarray
        Positive weights summing to the weight-function mass.
    jacobi_exponents : tuple
        The pair (a, b) of the generating weight.
    """

    nodes: np.ndarray
    weights: np.ndarray
    jacobi_exponents: tuple[float, float]

    @property
    def mass(self) -> float:
        """Total mass of the weight, 2^(a+b+1) B(a+1, b+1)."""
        a, b = self.jacobi_exponents
        return 2.0 ** (a + b + 1) * math.gamma(a + 1) * math.gamma(b + 1) / math.gamma(a + b + 2)


def _jacobi_recurrence(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and squared off-diagonal of the monic Jacobi recurrence."""
    k = np.arange(n, dtype=float)
    ab = a + b
    diag = np.empty(n)
    diag[0] = (b - a) / (ab + 2.0)
    if n > 1:
        s = 2.0 * k[1:] + ab
        diag[1:] = (b * b - a * a) / (s * (s + 2.0))
        beta = 4.0 * k[1:] * (k[1:] + a) * (k[1:] + b) * (k[1:] + ab) / (s * s * (s + 1.0) * (s - 1.0))
    else:
        beta = np.empty(0)
    return diag, beta


@lru_cache(maxsize=1024)
def gauss_jacobi_rule(n: int, a: float = 0.0, b: float = 0.0) -> QuadRule:
    """Build the n-point Gauss rule for the weight (1-t)^a (1+t)^b on (-1, 1).

    Uses Golub-Welsch: eigenvalues of the symmetric tridiagonal matrix built
    from the three-term recurrence give the nodes, the squared first
    eigenvector components scaled by the weight mass give the weights.
    (a, b) = (0, 0) is plain Gauss-Legendre.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"node count must be a positive integer, got {n!r}")
    if not (a > -1.0 and b > -1.0):
        raise ParameterError(f"Jacobi exponents must exceed -1, got ({a!r}, {b!r})")
    diag, beta = _jacobi_recurrence(int(n), float(a), float(b))
    nodes, vecs = eigh_tridiagonal(diag, np.sqrt(beta))
    mass = 2.0 ** (a + b + 1) * math.gamma(a + 1) * math.gamma(b + 1) / math.gamma(a + b + 2)
    weights = mass * vecs[0, :] ** 2
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadRule(nodes=nodes, weights=weights, jacobi_exponents=(float(a), float(b)))


def _graded_breakpoints(a: float, b: float) -> np.ndarray:
    """Dyadic breakpoints of [a, b], refined toward both endpoints.

    Endpoint steepness in this package comes from power factors anchored at
    or just outside an endpoint; geometric pieces make every piece uniformly
    smooth after an affine map.
    """
    length = b - a
    left = a + length * 2.0 ** np.arange(-_GRADE_LEVELS, 0)
    right = b - length * 2.0 ** np.arange(-1, -_GRADE_LEVELS - 1, -1)
    return np.concatenate(([a], left, right[1:], [b]))


def _composite(
    f: Callable[[np.ndarray], np.ndarray],
    breaks: np.ndarray,
    left_exp: float,
    right_exp: float,
    n: int,
) -> tuple[float, float]:
    """Signed integral and absolute mass over the graded pieces with n nodes each.

    The first and last pieces carry the endpoint weights; the integrand there
    is evaluated with those factors divided out and they are absorbed into a
    mapped Gauss-Jacobi rule.
    """
    total = 0.0
    total_abs = 0.0
    a, b = breaks[0], breaks[-1]

    # interior pieces: plain Gauss-Legendre on f itself
    gl = gauss_jacobi_rule(n)
    mids_lo = breaks[1:-2]
    mids_hi = breaks[2:-1]
    if mids_lo.size:
        width = mids_hi - mids_lo
        pts = mids_lo[:, None] + 0.5 * width[:, None] * (gl.nodes[None, :] + 1.0)
        vals = f(pts.ravel()).reshape(pts.shape)
        piece = 0.5 * width * (vals @ gl.weights)
        piece_abs = 0.5 * width * (np.abs(vals) @ gl.weights)
        total += float(piece.sum())
        total_abs += float(piece_abs.sum())

    # first piece: weight (x-a)^left_exp, Jacobi b-parameter carries it
    w0 = breaks[1] - a
    rule_l = gauss_jacobi_rule(n, 0.0, left_exp)
    offs = 0.5 * w0 * (rule_l.nodes + 1.0)
    g = f(a + offs) * offs ** (-left_exp)
    scale = (0.5 * w0) ** (left_exp + 1.0)
    total += float(scale * (rule_l.weights @ g))
    total_abs += float(scale * (rule_l.weights @ np.abs(g)))

    # last piece: weight (b-x)^right_exp, Jacobi a-parameter carries it
    w1 = b - breaks[-2]
    rule_r = gauss_jacobi_rule(n, right_exp, 0.0)
    offs = 0.5 * w1 * (1.0 - rule_r.nodes)
    g = f(b - offs) * offs ** (-right_exp)
    scale = (0.5 * w1) ** (right_exp + 1.0)
    total += float(scale * (rule_r.weights @ g))
    total_abs += float(scale * (rule_r.weights @ np.abs(g)))

    return total, total_abs


def integrate_singular(
    f: Callable[[np.ndarray], np.ndarray],
    interval: Sequence[float],
    left_exp: float = 0.0,
    right_exp: float = 0.0,
    tol: float = 1e-12,
    max_doublings: int = 20,
) -> float:
    """Integrate f over [a, b] where f ~ (x-a)^left_exp near a, (b-x)^right_exp near b.

    Parameters
    ----------
    f : callable
        The full integrand, including the singular factors; must accept an
        ndarray of points strictly inside (a, b).
    interval : (a, b)
        Integration interval; returns 0.0 when b <= a.
    left_exp, right_exp : float
        Algebraic endpoint exponents, each > -1.
    tol : float
        Relative agreement required between successive node-doubled estimates
        (measured against the absolute mass when the integral nearly cancels).
    max_doublings : int
        Doubling steps before giving up.

    Raises
    ------
    QuadratureConvergenceError
        When doubling stalls; carries the last two estimates.
    """
    a, b = float(interval[0]), float(interval[1])
    if not (left_exp > -1.0 and right_exp > -1.0):
        raise ParameterError(f"endpoint exponents must exceed -1, got ({left_exp!r}, {right_exp!r})")
    if not tol > 0.0:
        raise ParameterError(f"tolerance must be positive, got {tol!r}")
    if b <= a:
        return 0.0

    breaks = _graded_breakpoints(a, b)
    n = _BASE_NODES
    prev, _ = _composite(f, breaks, left_exp, right_exp, n)
    for _ in range(max_doublings):
        n *= 2
        cur, cur_abs = _composite(f, breaks, left_exp, right_exp, n)
        scale = max(abs(cur), abs(prev), 1e-3 * cur_abs)
        if abs(cur - prev) <= tol * scale or (cur == 0.0 and prev == 0.0):
            return cur
        prev = cur
    raise QuadratureConvergenceError(
        f"no convergence to tol={tol} after {max_doublings} doublings on [{a}, {b}]",
        (prev, cur),
    )
