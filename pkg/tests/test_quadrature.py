import math

import numpy as np
import pytest

from fracfem import ParameterError, QuadratureConvergenceError, gauss_jacobi_rule, integrate_singular


def jacobi_moment(a, b, k, tol=1e-13):
    """Moment of t^k against (1-t)^a (1+t)^b on (-1,1) by adaptive bisection."""

    def recurse(lo, hi, coarse):
        mid = 0.5 * (lo + hi)
        fine = simpson(lo, mid) + simpson(mid, hi)
        if abs(fine - coarse) <= tol * max(abs(fine), 1e-3):
            return fine
        return recurse(lo, mid, simpson(lo, mid)) + recurse(mid, hi, simpson(mid, hi))

    def simpson(lo, hi):
        # endpoint-open 6-point rule; integrand singular only at t = +-1
        ts = lo + (hi - lo) * (np.arange(1, 7) - 0.5) / 6.0
        vals = (1.0 - ts) ** a * (1.0 + ts) ** b * ts ** k if k else (1.0 - ts) ** a * (1.0 + ts) ** b
        return (hi - lo) * float(np.mean(vals))

    return recurse(-1.0, 1.0, simpson(-1.0, 1.0))


def test_one_point_legendre_is_midpoint():
    rule = gauss_jacobi_rule(1, 0.0, 0.0)
    assert rule.nodes == pytest.approx([0.0], abs=1e-15)
    assert rule.weights == pytest.approx([2.0], rel=1e-14)


def test_two_point_legendre_classical():
    rule = gauss_jacobi_rule(2, 0.0, 0.0)
    assert rule.nodes == pytest.approx([-1.0 / math.sqrt(3.0), 1.0 / math.sqrt(3.0)], rel=1e-14)
    assert rule.weights == pytest.approx([1.0, 1.0], rel=1e-14)


@pytest.mark.parametrize("n,a,b", [(1, 0.0, 0.0), (4, -0.5, 0.0), (6, 0.75, -0.25), (9, 0.0, -0.9)])
def test_rule_invariants(n, a, b):
    rule = gauss_jacobi_rule(n, a, b)
    assert np.all(np.diff(rule.nodes) > 0)
    assert np.all(rule.nodes > -1.0) and np.all(rule.nodes < 1.0)
    assert np.all(rule.weights > 0)
    mass = 2.0 ** (a + b + 1) * math.gamma(a + 1) * math.gamma(b + 1) / math.gamma(a + b + 2)
    assert float(np.sum(rule.weights)) == pytest.approx(mass, rel=1e-13)


@pytest.mark.parametrize("n,a,b", [(3, 0.0, 0.0), (4, -0.5, 0.0), (5, 0.3, 0.7)])
def test_rule_exactness_to_degree(n, a, b):
    rule = gauss_jacobi_rule(n, a, b)
    for k in range(2 * n):
        quad = float(np.dot(rule.weights, rule.nodes ** k))
        exact = jacobi_moment(a, b, k)
        assert quad == pytest.approx(exact, rel=1e-12, abs=1e-13)


def test_four_point_half_singular_moments_match_bisection_oracle():
    rule = gauss_jacobi_rule(4, -0.5, 0.0)
    for k in range(8):
        quad = float(np.dot(rule.weights, rule.nodes ** k))
        exact = jacobi_moment(-0.5, 0.0, k, tol=1e-13)
        assert quad == pytest.approx(exact, rel=1e-11)


def test_refinement_never_degrades_moments():
    a, b = -0.5, 0.25
    exact = [jacobi_moment(a, b, k) for k in range(16)]
    for n in (2, 4, 8):
        coarse = gauss_jacobi_rule(n, a, b)
        fine = gauss_jacobi_rule(2 * n, a, b)
        for k in range(16):
            err_c = abs(float(np.dot(coarse.weights, coarse.nodes ** k)) - exact[k])
            err_f = abs(float(np.dot(fine.weights, fine.nodes ** k)) - exact[k])
            assert err_f <= err_c + 1e-13


def test_invalid_parameters_rejected():
    with pytest.raises(ParameterError):
        gauss_jacobi_rule(0, 0.0, 0.0)
    with pytest.raises(ParameterError):
        gauss_jacobi_rule(3, -1.0, 0.0)
    with pytest.raises(ParameterError):
        integrate_singular(lambda x: x, (0, 1), left_exp=-1.5)
    with pytest.raises(ParameterError):
        integrate_singular(lambda x: x, (0, 1), tol=0.0)


def test_inverse_sqrt_integral():
    val = integrate_singular(lambda x: x ** -0.5, (0.0, 1.0), left_exp=-0.5, tol=1e-12)
    assert val == pytest.approx(2.0, rel=1e-12)


def test_inverse_sqrt_times_linear():
    val = integrate_singular(lambda x: x ** -0.5 * (1.0 - x), (0.0, 1.0), left_exp=-0.5)
    assert val == pytest.approx(4.0 / 3.0, rel=1e-12)


def test_beta_identity():
    alpha = 1.5
    val = integrate_singular(
        lambda x: x ** (1.0 - alpha) * (1.0 - x) ** (alpha - 1.0),
        (0.0, 1.0), left_exp=1.0 - alpha, right_exp=alpha - 1.0,
    )
    assert val == pytest.approx(math.pi / 2.0, rel=1e-12)


def test_smooth_integrand_matches_plain_gauss():
    f = lambda x: np.cos(3.0 * x) * np.exp(x)
    val = integrate_singular(f, (0.0, 1.0), tol=1e-13)
    rule = gauss_jacobi_rule(64, 0.0, 0.0)
    x = 0.5 * (rule.nodes + 1.0)
    ref = 0.5 * float(np.dot(rule.weights, f(x)))
    assert val == pytest.approx(ref, rel=1e-13)


def test_empty_interval_is_zero():
    assert integrate_singular(lambda x: x, (0.5, 0.5)) == 0.0
    assert integrate_singular(lambda x: x, (0.7, 0.2)) == 0.0


def test_nonconvergence_carries_estimates():
    # a pathological integrand with an interior jump wanders forever
    f = lambda x: np.where(x < 1.0 / math.pi, 1.0, -1.0) * x ** -0.2
    with pytest.raises(QuadratureConvergenceError) as err:
        integrate_singular(f, (0.0, 1.0), left_exp=-0.2, tol=1e-14, max_doublings=3)
    assert len(err.value.estimates) == 2
    assert all(np.isfinite(e) for e in err.value.estimates)
