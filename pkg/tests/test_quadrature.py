import math

import numpy as np
import pytest

from hhbounds.errors import DomainError, EvalError
from hhbounds.quadrature import integrate, quad


def test_constant_interval_length():
    assert quad(lambda x: 1.0, 0.2, 0.7) == 0.7 - 0.2


def test_exp_on_unit_interval():
    r = integrate(math.exp, 0.0, 1.0)
    assert r.converged
    assert r.value == pytest.approx(math.e - 1, rel=1e-10)


def test_sqrt_singular_derivative():
    assert quad(math.sqrt, 0.0, 1.0) == pytest.approx(2 / 3, rel=1e-9)


def test_cubics_exact(rng):
    for _ in range(50):
        c = rng.uniform(0.1, 2.0, size=4)
        exact = c[0] + c[1] / 2 + c[2] / 3 + c[3] / 4
        got = quad(lambda x: c[0] + c[1] * x + c[2] * x * x + c[3] * x**3, 0.0, 1.0)
        assert got == pytest.approx(exact, rel=1e-14)


def test_linearity(rng):
    f, g = math.sin, lambda x: math.exp(-x * x)
    for _ in range(10):
        al, be = rng.uniform(-3, 3, size=2)
        lhs = quad(lambda x: al * f(x) + be * g(x), 0.0, 2.0, rel_tol=1e-12, abs_tol=1e-14)
        rhs = al * quad(f, 0.0, 2.0, rel_tol=1e-12, abs_tol=1e-14) + be * quad(g, 0.0, 2.0, rel_tol=1e-12, abs_tol=1e-14)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


def test_additivity(rng):
    f = lambda x: 1 / (1 + x * x)
    for c in rng.uniform(0.1, 2.9, size=10):
        whole = quad(f, 0.0, 3.0, rel_tol=1e-13, abs_tol=1e-15)
        parts = quad(f, 0.0, c, rel_tol=1e-13, abs_tol=1e-15) + quad(f, c, 3.0, rel_tol=1e-13, abs_tol=1e-15)
        assert whole == pytest.approx(parts, rel=1e-11)
    assert whole == pytest.approx(math.atan(3.0), rel=1e-12)


def test_x_squared():
    assert quad(lambda x: x * x, 0.0, 1.0) == pytest.approx(1 / 3, abs=1e-12)


def test_t_two_to_t_matches_closed_form():
    l2 = math.log(2)
    assert quad(lambda t: t * 2.0**t, 0.0, 1.0) == pytest.approx((2 * l2 - 1) / l2**2, rel=1e-10)


def test_empty_interval_rejected():
    with pytest.raises(DomainError):
        quad(math.exp, 0.3, 0.3)


def test_depth_exhaustion_reported():
    r = integrate(lambda x: math.sin(1 / x) if x else 0.0, 0.0, 1.0, max_depth=6)
    assert not r.converged
    assert r.abs_error_estimate > 0


def test_nonfinite_integrand():
    with pytest.raises(EvalError):
        quad(lambda x: math.inf, 0.0, 1.0)


def test_bad_bounds():
    with pytest.raises(DomainError):
        quad(math.exp, 1.0, 0.0)
    with pytest.raises(DomainError):
        quad(math.exp, 0.0, np.inf)
