"""Quadrature-only oracles, independent of the closed-form code paths.

Nothing here uses the Gamma-ratio term algebra of the package: fractional
images of step functions are evaluated through mapped Gauss-Jacobi masses,
pairings through the adaptive integrator, and the fractional Sobolev
seminorm through the Gagliardo double integral reduced to an autocorrelation.
"""

from __future__ import annotations

import math

import numpy as np

from fracfem import Mesh, PiecewiseLinear, evaluate, gauss_jacobi_rule, integrate_singular
from fracfem.fracpoly import PowerSum


def step_frac_integral(anchors, jumps, order: float, x):
    """(I^order s)(x) for the step function s = sum of jumps * H(. - anchor).

    Each anchored piece contributes the integral of (x - t)^{order-1} over
    (anchor, x), evaluated as a mapped Gauss-Jacobi mass rather than through
    an antiderivative formula.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    rule = gauss_jacobi_rule(2, order - 1.0, 0.0)
    total = np.zeros_like(xs)
    for a, j in zip(anchors, jumps):
        d = np.clip(xs - a, 0.0, None)
        total += j * rule.mass * (0.5 * d) ** order
    return total / math.gamma(order)


def _derivative_steps(v: PiecewiseLinear):
    return v.derivative_steps()


def energy_entry_oracle(trial: PiecewiseLinear, test: PiecewiseLinear, alpha: float,
                        tol: float = 1e-11) -> float:
    """A(trial, test) = (I^{2-alpha} trial', test') by nested quadrature.

    The inner fractional image is evaluated numerically at the outer nodes;
    the outer integral runs element by element over the support of test',
    where the image is continuous with algebraic kinks only at the element
    ends.
    """
    t_anchors, t_jumps = _derivative_steps(trial)
    s_anchors, s_jumps = _derivative_steps(test)
    live = t_jumps != 0.0
    t_anchors, t_jumps = t_anchors[live], t_jumps[live]
    nodes = test.nodes
    slopes = test.slopes()
    total = 0.0
    for el, slope in enumerate(slopes):
        if slope == 0.0:
            continue
        lo, hi = nodes[el], nodes[el + 1]
        piece = integrate_singular(
            lambda x: step_frac_integral(t_anchors, t_jumps, 2.0 - alpha, x),
            (lo, hi), tol=tol,
        )
        total += slope * piece
    return total


def load_entry_oracle(f: PowerSum, test: PiecewiseLinear, tol: float = 1e-11) -> float:
    """(f, test) by per-element adaptive quadrature with endpoint exponents."""
    nodes = test.nodes
    vals = test.values
    left_exp = min(
        (t.exponent for t in f.terms if t.anchor == 0.0 and t.exponent < 0.0), default=0.0
    )
    total = 0.0
    for el in range(test.m):
        lo, hi = nodes[el], nodes[el + 1]
        a, b = vals[el], vals[el + 1]
        if a == 0.0 and b == 0.0:
            continue

        def integrand(x, a=a, b=b, lo=lo, hi=hi):
            t = (x - lo) / (hi - lo)
            return evaluate(f, x) * (a * (1.0 - t) + b * t)

        total += integrate_singular(
            integrand, (lo, hi), left_exp=left_exp if el == 0 else 0.0, tol=tol
        )
    return total


def potential_entry_oracle(q, trial: PiecewiseLinear, test: PiecewiseLinear, n: int = 64) -> float:
    """(q trial, test) by composite n-point Gauss-Legendre per element."""
    rule = gauss_jacobi_rule(n)
    nodes = test.nodes
    total = 0.0
    for el in range(test.m):
        lo, hi = nodes[el], nodes[el + 1]
        x = lo + 0.5 * (hi - lo) * (rule.nodes + 1.0)
        qv = evaluate(q, x) if isinstance(q, PowerSum) else q(x)
        total += 0.5 * (hi - lo) * float(np.dot(rule.weights, qv * trial(x) * test(x)))
    return total


def _zero_extended(v: PiecewiseLinear, x: np.ndarray) -> np.ndarray:
    return np.interp(x, v.nodes, v.values, left=0.0, right=0.0)


def _shift_autocorrelation_gap(v: PiecewiseLinear, z: float) -> float:
    """Exact integral over the real line of (v~(x) - v~(x - z))^2.

    The integrand is piecewise quadratic with breakpoints at the mesh nodes
    and their shifts, so the three-point exact rule per piece suffices.
    """
    grid = np.unique(np.concatenate((v.nodes, v.nodes + z)))
    d_lo = _zero_extended(v, grid[:-1]) - _zero_extended(v, grid[:-1] - z)
    d_hi = _zero_extended(v, grid[1:]) - _zero_extended(v, grid[1:] - z)
    seg = np.diff(grid)
    return float(np.sum(seg / 3.0 * (d_lo * d_lo + d_lo * d_hi + d_hi * d_hi)))


def gagliardo_seminorm_sq(v: PiecewiseLinear, s: float, tol: float = 1e-11) -> float:
    """Double-integral (Gagliardo) seminorm of the zero extension of v.

    Integral over R^2 of (v~(x) - v~(y))^2 / |x - y|^{1+2s}, reduced by the
    substitution y = x - z to a single singular integral of the shift gap;
    the tail z > 1 is explicit because the supports separate.
    """
    vals = v.values
    a, b = vals[:-1], vals[1:]
    mass = float(v.h / 3.0 * np.sum(a * a + a * b + b * b))

    total = 0.0
    for el in range(v.m):
        lo, hi = el * v.h, (el + 1) * v.h

        def integrand(z):
            zs = np.atleast_1d(z)
            return np.array([zz ** (-1.0 - 2.0 * s) * _shift_autocorrelation_gap(v, zz) for zz in zs])

        total += integrate_singular(
            integrand, (lo, hi), left_exp=1.0 - 2.0 * s if el == 0 else 0.0, tol=tol
        )
    return 2.0 * total + 2.0 * mass / s
