"""Closed-form exact solutions for the zero-potential problem.

With q = 0 the two-point problem -D^alpha u = f, u(0) = u(1) = 0 inverts
explicitly through the order-alpha integral g = I^alpha f:

* Riemann-Liouville:  u = -g + g(1) x^{alpha-1}
* Caputo:             u = -g + g(1) x

and the adjoint problem (right-sided derivative, w(1) = 0) mirrors these with
the singular factor (1-x)^{alpha-1}.  The three bundled source terms exercise
smooth, non-vanishing, and endpoint-singular data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .assembly import DerivativeKind
from .errors import ParameterError, RepresentabilityError
from .fracpoly import (
    PowerSum,
    Side,
    Term,
    as_order,
    evaluate,
    inner_product,
    left_frac_integral,
    right_frac_integral,
)

__all__ = ["ExampleCase", "EXAMPLES", "primal_solution", "adjoint_solution", "example_suite"]


@dataclass(frozen=True)
class ExampleCase:
    """A bundled source term and a note on its boundary/endpoint regularity."""

    id: str
    f: PowerSum
    regularity_note: str


EXAMPLES = {
    "a": ExampleCase(
        "a",
        PowerSum.x_power(1.0, 1.0) + PowerSum.x_power(-1.0, 2.0),
        "smooth source x(1-x), vanishing at both endpoints",
    ),
    "b": ExampleCase(
        "b",
        PowerSum.constant(1.0),
        "smooth source 1, nonzero at the endpoints",
    ),
    "c": ExampleCase(
        "c",
        PowerSum.x_power(1.0, -0.25),
        "source x^{-1/4}, singular at the left endpoint",
    ),
}


def primal_solution(f: PowerSum, alpha: float, kind: DerivativeKind) -> PowerSum:
    """Exact solution of -D^alpha u = f with u(0) = u(1) = 0 (q = 0 only)."""
    a = as_order(alpha, 1.0, 2.0)
    g = left_frac_integral(f, a)
    boundary = evaluate(g, 1.0)
    if kind is DerivativeKind.RIEMANN_LIOUVILLE:
        lift = PowerSum.x_power(boundary, a - 1.0)
    else:
        lift = PowerSum.x_power(boundary, 1.0)
    return -g + lift


def _as_right_sided(f: PowerSum) -> PowerSum:
    """Rewrite about the right endpoint when exact conversion exists.

    Left terms anchored at 0 with integer exponents expand binomially into
    (1-x) powers; genuinely fractional left-sided terms have no finite
    right-sided representation.
    """
    terms = []
    for t in f.terms:
        if t.side is Side.RIGHT:
            terms.append(t)
            continue
        k = t.exponent
        if t.anchor == 0.0 and k >= 0.0 and k == round(k) and k <= 60:
            k = int(round(k))
            # x^k = (1 - (1-x))^k
            for j in range(k + 1):
                terms.append(Term(t.coef * math.comb(k, j) * (-1.0) ** j, 1.0, float(j), Side.RIGHT))
        else:
            raise RepresentabilityError(
                f"no exact right-sided form for term {t!r}; "
                "use quadrature for the scalar prefactors instead"
            )
    return PowerSum(terms)


def adjoint_prefactor(f: PowerSum, alpha: float, kind: DerivativeKind, tol: float = 1e-12) -> float:
    """Coefficient of (1-x)^{alpha-1} in the adjoint solution, for any source.

    Riemann-Liouville: (I_1^alpha f)(0) = (x^{alpha-1}, f)/Gamma(alpha);
    Caputo: (x, f)/Gamma(alpha).  Both reduce to a single weighted pairing,
    so sources without a right-sided closed form are still covered.
    """
    a = as_order(alpha, 1.0, 2.0)
    if kind is DerivativeKind.RIEMANN_LIOUVILLE:
        weight = PowerSum.x_power(1.0, a - 1.0)
    else:
        weight = PowerSum.x_power(1.0, 1.0)
    return inner_product(weight, f, tol) / math.gamma(a)


def adjoint_solution(f: PowerSum, alpha: float, kind: DerivativeKind) -> PowerSum:
    """Exact adjoint solution w with w(1) = 0 (q = 0 only).

    Needs an exact right-sided form of f; the Caputo variant additionally
    satisfies the test-space constraint (x^{1-alpha}, w) = 0.
    """
    a = as_order(alpha, 1.0, 2.0)
    fr = _as_right_sided(f)
    g = right_frac_integral(fr, a)
    lift = PowerSum.one_minus_x_power(adjoint_prefactor(f, a, kind), a - 1.0)
    return lift - g


def _printed_solution(example_id: str, alpha: float, kind: DerivativeKind) -> PowerSum:
    """The published closed forms, written out independently of primal_solution."""
    a = alpha
    rl = kind is DerivativeKind.RIEMANN_LIOUVILLE
    lead = a - 1.0 if rl else 1.0
    if example_id == "a":
        c1 = 1.0 / math.gamma(a + 2.0)
        c2 = 2.0 / math.gamma(a + 3.0)
        return (
            PowerSum.x_power(c1, lead)
            + PowerSum.x_power(-c1, a + 1.0)
            + PowerSum.x_power(-c2, lead)
            + PowerSum.x_power(c2, a + 2.0)
        )
    if example_id == "b":
        c = 1.0 / math.gamma(a + 1.0)
        return PowerSum.x_power(c, lead) + PowerSum.x_power(-c, a)
    if example_id == "c":
        c = math.gamma(0.75) / math.gamma(a + 0.75)
        return PowerSum.x_power(c, lead) + PowerSum.x_power(-c, a - 0.25)
    raise ParameterError(f"unknown example {example_id!r}")


def example_suite(example_id: str, alpha: float, kind: DerivativeKind) -> tuple[PowerSum, PowerSum]:
    """Source and exact solution for one of the bundled cases.

    Cross-checks the constructed representation against the independently
    written closed form, coefficient by coefficient, before returning it.
    """
    if example_id not in EXAMPLES:
        raise ParameterError(f"unknown example {example_id!r}; expected one of a, b, c")
    a = as_order(alpha, 1.0, 2.0)
    f = EXAMPLES[example_id].f
    u = primal_solution(f, a, kind)
    printed = _printed_solution(example_id, a, kind)
    if len(u.terms) != len(printed.terms):
        raise AssertionError(f"representation mismatch for example {example_id!r}")
    for tu, tp in zip(u.terms, printed.terms):
        if (tu.anchor, tu.exponent, tu.side) != (tp.anchor, tp.exponent, tp.side):
            raise AssertionError(f"term mismatch: {tu!r} vs {tp!r}")
        if abs(tu.coef - tp.coef) > 1e-12 * max(abs(tu.coef), abs(tp.coef), 1.0):
            raise AssertionError(f"coefficient mismatch: {tu!r} vs {tp!r}")
    return f, u
