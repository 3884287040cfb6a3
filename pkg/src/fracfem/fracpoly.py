"""Closed-form fractional calculus on sums of truncated power functions.

The working function class is finite sums of terms ``c * (x - a)_+^p`` (left
sided) and ``c * (a - x)_+^p`` (right sided) with exponents p > -1 and anchors
in [0, 1].  Fractional integrals and derivatives act diagonally on this class,
which covers every source term, exact solution, and nodal-basis derivative the
solver manipulates.  Products with no closed form fall back to the
singularity-aware quadrature of :mod:`fracfem.quadrature`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Union

import numpy as np

from .errors import (
    EvaluabilityError,
    IntegrabilityError,
    ParameterError,
    RepresentabilityError,
    SidednessError,
    SingularEvaluationError,
)
from .quadrature import integrate_singular

__all__ = [
    "Side",
    "Term",
    "PowerSum",
    "PiecewiseLinear",
    "FracOrder",
    "left_frac_integral",
    "right_frac_integral",
    "riemann_derivative",
    "caputo_derivative",
    "derivative",
    "evaluate",
    "inner_product",
]

#: coefficients with magnitude below this are dropped during canonicalization
_COEF_FLOOR = 1e-300

#: tolerance for detecting nonpositive-integer Gamma arguments (annihilation)
_POLE_TOL = 1e-12


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class FracOrder:
    """A fractional order together with the open interval it must live in."""

    value: float
    lo: float = 0.0
    hi: float = math.inf
    closed_lo: bool = False

    def __post_init__(self):
        ok = (self.value >= self.lo) if self.closed_lo else (self.value > self.lo)
        if not (ok and self.value < self.hi):
            bracket = "[" if self.closed_lo else "("
            raise ParameterError(
                f"order {self.value!r} outside admissible range {bracket}{self.lo}, {self.hi})"
            )

    def __float__(self) -> float:
        return self.value


OrderLike = Union[float, FracOrder]


def as_order(value: OrderLike, lo: float, hi: float, closed_lo: bool = False) -> float:
    """Coerce a float or FracOrder to a float, validating the use-site range."""
    v = float(value)
    ok = (v >= lo) if closed_lo else (v > lo)
    if not (ok and v < hi):
        bracket = "[" if closed_lo else "("
        raise ParameterError(f"order {v!r} outside admissible range {bracket}{lo}, {hi})")
    return v


@dataclass(frozen=True)
class Term:
    """One truncated power: coef * (x-anchor)_+^exponent or coef * (anchor-x)_+^exponent."""

    coef: float
    anchor: float
    exponent: float
    side: Side = Side.LEFT


def _validate_term(t: Term) -> None:
    if not t.exponent > -1.0:
        raise ParameterError(f"exponent must exceed -1 for local integrability, got {t.exponent!r}")
    if not 0.0 <= t.anchor <= 1.0:
        raise ParameterError(f"anchor must lie in [0, 1], got {t.anchor!r}")


class PowerSum:
    """Canonical finite sum of truncated powers on (0, 1).

    Immutable; construction merges terms sharing (anchor, exponent, side) and
    drops vanishing coefficients, so structurally equal functions compare
    equal term by term.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Term] = ()):
        merged: dict[tuple[float, float, str], float] = {}
        for t in terms:
            _validate_term(t)
            key = (t.anchor, t.exponent, t.side.value)
            merged[key] = merged.get(key, 0.0) + t.coef
        canon = tuple(
            Term(c, a, p, Side(s))
            for (a, p, s), c in sorted(merged.items())
            if abs(c) >= _COEF_FLOOR
        )
        object.__setattr__(self, "terms", canon)

    def __setattr__(self, *_):
        raise AttributeError("PowerSum is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "PowerSum":
        return PowerSum()

    @staticmethod
    def constant(c: float) -> "PowerSum":
        return PowerSum([Term(c, 0.0, 0.0, Side.LEFT)])

    @staticmethod
    def x_power(coef: float, exponent: float, anchor: float = 0.0) -> "PowerSum":
        """coef * (x - anchor)_+^exponent."""
        return PowerSum([Term(coef, anchor, exponent, Side.LEFT)])

    @staticmethod
    def one_minus_x_power(coef: float, exponent: float, anchor: float = 1.0) -> "PowerSum":
        """coef * (anchor - x)_+^exponent."""
        return PowerSum([Term(coef, anchor, exponent, Side.RIGHT)])

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "PowerSum") -> "PowerSum":
        if not isinstance(other, PowerSum):
            return NotImplemented
        return PowerSum(self.terms + other.terms)

    def __sub__(self, other: "PowerSum") -> "PowerSum":
        if not isinstance(other, PowerSum):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> "PowerSum":
        return PowerSum(Term(-t.coef, t.anchor, t.exponent, t.side) for t in self.terms)

    def __mul__(self, scalar: float) -> "PowerSum":
        if not isinstance(scalar, (int, float)):
            return NotImplemented
        return PowerSum(Term(t.coef * scalar, t.anchor, t.exponent, t.side) for t in self.terms)

    __rmul__ = __mul__

    def __call__(self, x):
        return evaluate(self, x)

    def __repr__(self):
        if not self.terms:
            return "PowerSum(0)"
        bits = []
        for t in self.terms:
            base = f"(x-{t.anchor:g})" if t.side is Side.LEFT else f"({t.anchor:g}-x)"
            bits.append(f"{t.coef:+g}*{base}^{t.exponent:g}")
        return "PowerSum(" + " ".join(bits) + ")"

    def coefficient(self, anchor: float, exponent: float, side: Side = Side.LEFT) -> float:
        for t in self.terms:
            if t.anchor == anchor and t.exponent == exponent and t.side is side:
                return t.coef
        return 0.0


class PiecewiseLinear:
    """Continuous piecewise linear function on the uniform mesh of size 1/m."""

    __slots__ = ("values",)

    def __init__(self, values):
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise ParameterError("need at least two nodal values")
        if not np.all(np.isfinite(vals)):
            raise ParameterError("nodal values must be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __setattr__(self, *_):
        raise AttributeError("PiecewiseLinear is immutable")

    @property
    def m(self) -> int:
        return self.values.size - 1

    @property
    def h(self) -> float:
        return 1.0 / self.m

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.m + 1) / self.m

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        out = np.interp(xs, self.nodes, self.values)
        return float(out) if np.isscalar(x) or xs.ndim == 0 else out

    def __add__(self, other):
        if not isinstance(other, PiecewiseLinear) or other.m != self.m:
            return NotImplemented
        return PiecewiseLinear(self.values + other.values)

    def __sub__(self, other):
        if not isinstance(other, PiecewiseLinear) or other.m != self.m:
            return NotImplemented
        return PiecewiseLinear(self.values - other.values)

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, float)):
            return NotImplemented
        return PiecewiseLinear(self.values * scalar)

    __rmul__ = __mul__

    def slopes(self) -> np.ndarray:
        return np.diff(self.values) * self.m

    def derivative_steps(self) -> tuple[np.ndarray, np.ndarray]:
        """Anchors and jump sizes of the a.e. derivative (a step function).

        The jump at the right endpoint is dropped: the corresponding Heaviside
        vanishes almost everywhere on (0, 1).
        """
        s = self.slopes()
        jumps = np.diff(np.concatenate(([0.0], s)))
        return self.nodes[:-1], jumps

    def derivative_power_sum(self) -> PowerSum:
        anchors, jumps = self.derivative_steps()
        return PowerSum(
            Term(j, a, 0.0, Side.LEFT) for a, j in zip(anchors, jumps) if j != 0.0
        )

    def to_power_sum(self) -> PowerSum:
        """Exact representation as a constant plus exponent-1 truncated powers."""
        anchors, jumps = self.derivative_steps()
        terms = [Term(float(self.values[0]), 0.0, 0.0, Side.LEFT)]
        terms += [Term(j, a, 1.0, Side.LEFT) for a, j in zip(anchors, jumps) if j != 0.0]
        return PowerSum(terms)


Pairable = Union[PowerSum, PiecewiseLinear]


# ---------------------------------------------------------------------------
# pointwise evaluation
# ---------------------------------------------------------------------------

def evaluate(f: Pairable, x):
    """Pointwise value of f at x (scalar or ndarray), truncation respected."""
    if isinstance(f, PiecewiseLinear):
        return f(x)
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    out = np.zeros_like(xs)
    for t in f.terms:
        d = xs - t.anchor if t.side is Side.LEFT else t.anchor - xs
        if t.exponent < 0.0:
            if np.any(d == 0.0):
                raise SingularEvaluationError(
                    f"evaluation at the anchor {t.anchor!r} of a negative-exponent term"
                )
            active = d > 0.0
        elif t.exponent == 0.0:
            active = d >= 0.0
            out[active] += t.coef
            continue
        else:
            active = d > 0.0
        out[active] += t.coef * d[active] ** t.exponent
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# fractional integrals and derivatives
# ---------------------------------------------------------------------------

def _reciprocal_gamma(z: float) -> float:
    """1/Gamma(z), with the convention 0 at the poles z = 0, -1, -2, ..."""
    if z < 0.5 and abs(z - round(z)) <= _POLE_TOL:
        return 0.0
    return 1.0 / math.gamma(z)


def _require_side(f: PowerSum, side: Side, op: str) -> None:
    for t in f.terms:
        if t.side is not side:
            raise SidednessError(f"{op} needs all terms {side.value}-sided; found {t!r}")


def left_frac_integral(f: PowerSum, gamma: OrderLike) -> PowerSum:
    """Fractional integral from the left endpoint, term-wise.

    c (x-a)_+^p  ->  c Gamma(p+1)/Gamma(p+gamma+1) (x-a)_+^{p+gamma};
    order 0 is the identity.
    """
    g = as_order(gamma, 0.0, math.inf, closed_lo=True)
    if g == 0.0:
        return f
    _require_side(f, Side.LEFT, "left_frac_integral")
    return PowerSum(
        Term(t.coef * math.gamma(t.exponent + 1.0) * _reciprocal_gamma((t.exponent + 1.0) + g),
             t.anchor, t.exponent + g, Side.LEFT)
        for t in f.terms
    )


def right_frac_integral(f: PowerSum, gamma: OrderLike) -> PowerSum:
    """Mirror image of :func:`left_frac_integral` for (a-x)_+ terms."""
    g = as_order(gamma, 0.0, math.inf, closed_lo=True)
    if g == 0.0:
        return f
    _require_side(f, Side.RIGHT, "right_frac_integral")
    return PowerSum(
        Term(t.coef * math.gamma(t.exponent + 1.0) * _reciprocal_gamma((t.exponent + 1.0) + g),
             t.anchor, t.exponent + g, Side.RIGHT)
        for t in f.terms
    )


def _riemann_terms(f: PowerSum, beta: float, side: Side, strict: bool) -> list[Term]:
    """Term-wise image under the order-beta derivative of Riemann-Liouville type.

    Annihilation comes first: a Gamma pole in the denominator kills the term
    regardless of the would-be exponent (e.g. the order-alpha derivative of
    (x)^{alpha-1}).  With strict=True, surviving terms must stay in the
    representable class (exponent > -1).
    """
    out = []
    for t in f.terms:
        if t.side is not side:
            raise SidednessError(f"derivative side {side.value} does not match term {t!r}")
        rg = _reciprocal_gamma((t.exponent + 1.0) - beta)
        if rg == 0.0:
            continue
        new_exp = t.exponent - beta
        if strict and not new_exp > -1.0:
            raise RepresentabilityError(
                f"derivative of exponent {t.exponent!r} by order {beta!r} leaves the class"
            )
        out.append(Term(t.coef * math.gamma(t.exponent + 1.0) * rg, t.anchor, new_exp, side))
    return out


def riemann_derivative(f: PowerSum, beta: OrderLike, side: Side = Side.LEFT) -> PowerSum:
    """Riemann-Liouville derivative of order beta in (0, 2), term-wise."""
    b = as_order(beta, 0.0, 2.0)
    return PowerSum(_riemann_terms(f, b, side, strict=True))


def caputo_derivative(f: PowerSum, beta: OrderLike, side: Side = Side.LEFT) -> PowerSum:
    """Caputo derivative of order beta in (1, 2).

    Computed as the Riemann-Liouville image minus the two endpoint correction
    terms built from f and f' at the starting endpoint; integer powers below
    the order cancel exactly.
    """
    b = as_order(beta, 1.0, 2.0)
    endpoint = 0.0 if side is Side.LEFT else 1.0
    for t in f.terms:
        if t.anchor == endpoint and -1.0 < t.exponent < 1.0 and t.exponent not in (0.0, 1.0):
            raise EvaluabilityError(
                f"f or f' undefined at x={endpoint:g}: term exponent {t.exponent!r} anchored there"
            )
    val = sum(t.coef for t in f.terms if t.side is side and t.anchor == endpoint and t.exponent == 0.0)
    slope = sum(t.coef for t in f.terms if t.side is side and t.anchor == endpoint and t.exponent == 1.0)

    terms = _riemann_terms(f, b, side, strict=False)
    if side is Side.LEFT:
        # u(0) x^{-beta}/Gamma(1-beta) + u'(0) x^{1-beta}/Gamma(2-beta)
        terms.append(Term(-val * _reciprocal_gamma(1.0 - b), 0.0, -b, side))
        terms.append(Term(-slope * _reciprocal_gamma(2.0 - b), 0.0, 1.0 - b, side))
    else:
        # alternating-sign analogue at x = 1; slope is the coefficient of
        # (1-x)^1, so u'(1) = -slope
        terms.append(Term(-val * _reciprocal_gamma(1.0 - b), 1.0, -b, side))
        terms.append(Term(-slope * _reciprocal_gamma(2.0 - b), 1.0, 1.0 - b, side))

    # exact cancellations must remove every non-integrable exponent
    leftovers = {}
    for t in terms:
        key = (t.anchor, t.exponent, t.side.value)
        leftovers[key] = leftovers.get(key, 0.0) + t.coef
    bad = [k for k, c in leftovers.items() if k[1] <= -1.0 and abs(c) >= _COEF_FLOOR]
    if bad:
        raise RepresentabilityError(f"Caputo image leaves the representable class at {bad!r}")
    return PowerSum(t for t in terms if t.exponent > -1.0)


def derivative(f: PowerSum) -> PowerSum:
    """Classical a.e. derivative, term-wise; rejects interior jumps.

    Exponent-0 terms anchored strictly inside (0, 1) would differentiate to a
    point mass, which the class cannot hold; use the dedicated
    PiecewiseLinear machinery for step derivatives instead.
    """
    out = []
    for t in f.terms:
        if t.exponent == 0.0:
            boundary = 0.0 if t.side is Side.LEFT else 1.0
            if t.anchor != boundary:
                raise RepresentabilityError(
                    f"derivative of an interior jump at {t.anchor!r} is not representable"
                )
            continue
        sign = 1.0 if t.side is Side.LEFT else -1.0
        out.append(Term(sign * t.coef * t.exponent, t.anchor, t.exponent - 1.0, t.side))
    return PowerSum(out)


# ---------------------------------------------------------------------------
# inner products
# ---------------------------------------------------------------------------

def _support(t: Term) -> tuple[float, float]:
    return (t.anchor, 1.0) if t.side is Side.LEFT else (0.0, t.anchor)


def _is_poly_exponent(p: float) -> bool:
    return p >= 0.0 and p == round(p) and p <= 60


def _power_primitive(lo: float, hi: float, a: float, p: float) -> float:
    """Integral of (x-a)^p over [lo, hi] with lo >= a, p > -1."""
    q = p + 1.0
    return ((hi - a) ** q - (lo - a) ** q) / q


def _pair_closed_same_anchor(t1: Term, t2: Term, lo: float, hi: float) -> float:
    p = t1.exponent + t2.exponent
    if t1.side is Side.LEFT:
        return t1.coef * t2.coef * _power_primitive(lo, hi, t1.anchor, p)
    return t1.coef * t2.coef * _power_primitive(1.0 - hi, 1.0 - lo, 1.0 - t1.anchor, p)


def _pair_closed_poly(frac: Term, poly: Term, lo: float, hi: float) -> float:
    """Binomially expand the integer-exponent factor about the other's anchor."""
    k = int(round(poly.exponent))
    a = frac.anchor
    # shift so the fractional factor reads s^p with s the distance from its anchor
    # left frac: s = x - a on [lo, hi]; right frac: s = a - x, mirrored interval
    if frac.side is Side.LEFT:
        s_lo, s_hi = lo - a, hi - a
        # poly factor as a function of s: left poly (x-c)^k = (s + (a-c))^k,
        # right poly (c-x)^k = ((c-a) - s)^k
        if poly.side is Side.LEFT:
            base, sign = a - poly.anchor, 1.0
        else:
            base, sign = poly.anchor - a, -1.0
    else:
        s_lo, s_hi = a - hi, a - lo
        # x = a - s: left poly (x-c)^k = ((a-c) - s)^k, right poly (c-x)^k = (s - (a-c))^k
        if poly.side is Side.LEFT:
            base, sign = a - poly.anchor, -1.0
        else:
            base, sign = poly.anchor - a, 1.0

    total = 0.0
    for j in range(k + 1):
        coef = math.comb(k, j) * (sign ** j) * base ** (k - j)
        q = frac.exponent + j + 1.0
        total += coef * ((s_hi ** q) - (s_lo ** q)) / q
    return frac.coef * poly.coef * total


def _pair_quadrature(t1: Term, t2: Term, lo: float, hi: float, tol: float) -> float:
    le = sum(t.exponent for t in (t1, t2) if t.side is Side.LEFT and t.anchor == lo)
    re = sum(t.exponent for t in (t1, t2) if t.side is Side.RIGHT and t.anchor == hi)
    one = PowerSum([t1])
    other = PowerSum([t2])

    def integrand(x):
        return evaluate(one, x) * evaluate(other, x)

    return integrate_singular(integrand, (lo, hi), left_exp=le, right_exp=re, tol=tol)


def _check_collisions(f: PowerSum, g: PowerSum) -> None:
    for t1 in f.terms:
        if t1.exponent >= 0.0:
            continue
        for t2 in g.terms:
            if (
                t2.exponent < 0.0
                and t1.side is t2.side
                and t1.anchor == t2.anchor
                and t1.exponent + t2.exponent <= -1.0
            ):
                raise IntegrabilityError(
                    f"non-integrable collision at anchor {t1.anchor!r}: "
                    f"exponents {t1.exponent!r} + {t2.exponent!r} <= -1"
                )


def _pair_term_term(t1: Term, t2: Term, tol: float) -> float:
    lo = max(_support(t1)[0], _support(t2)[0])
    hi = min(_support(t1)[1], _support(t2)[1])
    if hi <= lo:
        return 0.0
    if t1.side is t2.side and t1.anchor == t2.anchor:
        return _pair_closed_same_anchor(t1, t2, lo, hi)
    if _is_poly_exponent(t2.exponent):
        return _pair_closed_poly(t1, t2, lo, hi)
    if _is_poly_exponent(t1.exponent):
        return _pair_closed_poly(t2, t1, lo, hi)
    return _pair_quadrature(t1, t2, lo, hi, tol)


def _pl_pl_inner(u: PiecewiseLinear, v: PiecewiseLinear) -> float:
    if u.m != v.m:
        # exact on the merged grid; fall back through power sums
        return _ps_pl_inner(u.to_power_sum(), v)
    a, b = u.values[:-1], u.values[1:]
    c, d = v.values[:-1], v.values[1:]
    return float(u.h / 6.0 * np.sum(2.0 * a * c + a * d + b * c + 2.0 * b * d))


def _ps_pl_inner(f: PowerSum, v: PiecewiseLinear) -> float:
    """Exact integral of f * v using per-element primitives of (x-a)^p and x (x-a)^p."""
    nodes = v.nodes
    vals = v.values
    c1 = np.diff(vals) / v.h               # slope on each element
    c0 = vals[:-1] - c1 * nodes[:-1]       # intercept: v(x) = c0 + c1 x on the element
    total = 0.0
    for t in f.terms:
        if t.side is Side.LEFT:
            d = np.clip(nodes - t.anchor, 0.0, None)
            p1 = d ** (t.exponent + 1.0) / (t.exponent + 1.0)
            # primitive of x (x-a)^p = (x-a)^{p+2}/(p+2) + a (x-a)^{p+1}/(p+1)
            p2 = d ** (t.exponent + 2.0) / (t.exponent + 2.0) + t.anchor * p1
        else:
            d = np.clip(t.anchor - nodes, 0.0, None)
            p1 = -(d ** (t.exponent + 1.0)) / (t.exponent + 1.0)
            # primitive of x (a-x)^p = a*p1-like minus the next power
            p2 = d ** (t.exponent + 2.0) / (t.exponent + 2.0) + t.anchor * p1
        total += t.coef * float(np.sum(c0 * np.diff(p1) + c1 * np.diff(p2)))
    return total


def inner_product(f: Pairable, g: Pairable, tol: float = 1e-12) -> float:
    """The L2(0,1) pairing of f and g.

    Uses closed forms whenever a term pair shares an anchor or one factor has
    a nonnegative integer exponent (binomial reduction); all remaining pairs
    go through :func:`fracfem.quadrature.integrate_singular` with the
    endpoint exponents read off the anchors.
    """
    if isinstance(f, PiecewiseLinear) and isinstance(g, PiecewiseLinear):
        return _pl_pl_inner(f, g)
    if isinstance(f, PiecewiseLinear):
        return _ps_pl_inner(g, f)
    if isinstance(g, PiecewiseLinear):
        return _ps_pl_inner(f, g)
    _check_collisions(f, g)
    return sum(_pair_term_term(t1, t2, tol) for t1 in f.terms for t2 in g.terms)
