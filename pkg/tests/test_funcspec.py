import math
import warnings

import numpy as np
import pytest

from hhbounds.errors import DomainError, EvalError, ExprSyntaxError
from hhbounds.funcspec import (
    FUNCTIONS,
    BinOp,
    Call,
    Const,
    Neg,
    Var,
    builtin_power_s,
    derivative_mismatch,
    evaluate,
    from_expressions,
    parse,
    to_source,
)


def ev(src, x):
    return evaluate(parse(src), x)


def test_power():
    assert ev("x^2", 3.0) == 9.0


def test_power_right_associative():
    assert ev("2^3^2", 0.1) == 512.0


def test_unary_minus_binds_below_power():
    assert ev("-x^2", 2.0) == -4.0
    assert ev("2^-1", 0.0) == 0.5
    assert ev("(-x)^2", 2.0) == 4.0


def test_precedence():
    assert ev("1+2*3", 0.0) == 7.0
    assert ev("1-2-3", 0.0) == -4.0
    assert ev("8/4/2", 0.0) == 1.0
    assert ev("2*x^2", 3.0) == 18.0


def test_inverse_pair():
    assert ev("ln(exp(x))", 0.37) == pytest.approx(0.37, abs=1e-15)


def test_example_derivative_value():
    assert ev("x^(-0.5)", 0.89) == pytest.approx(0.89**-0.5, rel=1e-15)
    assert ev("x^(-0.5)", 0.89) == pytest.approx(1.0600, abs=1e-4)


def test_abs_and_sqrt():
    assert ev("abs(0-x)", 0.2) == 0.2
    assert ev("sqrt(x)", 0.25) == 0.5


def test_numbers():
    assert ev("1.5e2", 0.0) == 150.0
    assert ev(".5", 0.0) == 0.5
    assert ev("2.", 0.0) == 2.0
    assert ev("1E-3", 0.0) == 0.001


def test_vectorized():
    xs = np.linspace(0.1, 1.0, 7)
    got = evaluate(parse("x^(-0.5) + 3"), xs)
    assert np.array_equal(got, xs**-0.5 + 3)
    assert evaluate(parse("2"), xs).shape == xs.shape


@pytest.mark.parametrize("src,expected_offset", [
    ("", 0), ("x+", 2), ("(x", 2), ("x)", 1), ("2x", 1), ("foo(x)", 0), ("x ^ ^ 2", 4), ("1..2", 2),
])
def test_syntax_errors_carry_offset(src, expected_offset):
    with pytest.raises(ExprSyntaxError) as info:
        parse(src)
    assert info.value.position == expected_offset
    assert f"offset {expected_offset}" in str(info.value)


@pytest.mark.parametrize("src,x", [
    ("ln(x)", 0.0), ("ln(x)", -1.0), ("1/x", 0.0), ("sqrt(x)", -1.0), ("exp(x)", 1000.0), ("x^0.5", -4.0),
])
def test_eval_errors(src, x):
    with pytest.raises(EvalError):
        ev(src, x)


def test_eval_rejects_nonfinite_point():
    with pytest.raises(EvalError):
        ev("x", math.inf)


def test_vectorized_eval_errors():
    with pytest.raises(EvalError):
        evaluate(parse("ln(x)"), np.array([0.5, 0.0]))


# ---------------------------------------------------------------- round trip

def random_tree(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            return Var()
        return Const(float(rng.choice([-1, 1]) * rng.uniform(0.1, 4.0)))
    kind = rng.integers(0, 3)
    if kind == 0:
        return Neg(random_tree(rng, depth - 1))
    if kind == 1:
        return Call(str(rng.choice(FUNCTIONS)), random_tree(rng, depth - 1))
    return BinOp(str(rng.choice(list("+-*/^"))), random_tree(rng, depth - 1), random_tree(rng, depth - 1))


def outcome(e, x):
    try:
        return evaluate(e, x)
    except EvalError:
        return "error"


def test_round_trip_random_trees(rng):
    for _ in range(100):
        tree = random_tree(rng, 5)
        back = parse(to_source(tree))
        for x in rng.uniform(0.01, 1.0, size=10):
            a, b = outcome(tree, float(x)), outcome(back, float(x))
            assert a == b or (a != a and b != b), to_source(tree)


# ---------------------------------------------------------------- fuzz

def test_parser_total_on_random_bytes(rng):
    alphabet = np.frombuffer(b"x0123456789.eE+-*/^() expnlabsqrt", dtype=np.uint8)
    for i in range(10_000):
        n = int(rng.integers(0, 65))
        if i % 2:
            raw = rng.integers(0, 256, size=n, dtype=np.uint8).tobytes()
        else:
            raw = rng.choice(alphabet, size=n).tobytes()
        src = raw.decode("latin-1")
        try:
            tree = parse(src)
        except ExprSyntaxError:
            continue
        outcome(tree, 0.5)


# ---------------------------------------------------------------- function specs

def test_builtin_values():
    fs = builtin_power_s(0.5, 1.0)
    assert fs.f(0.25) == 1.0
    assert fs.fprime(0.25) == 2.0
    assert "0.5" in fs.label


def test_builtin_scaled_derivative():
    fs = builtin_power_s(0.2, 0.5)
    assert fs.fprime(0.8) == pytest.approx(0.5 * 0.8**-0.8, rel=1e-15)
    assert fs.fprime(0.8) == pytest.approx(0.59772, abs=1e-5)


@pytest.mark.parametrize("s,c", [(0.0, 1.0), (1.0, 1.0), (0.5, 0.0), (0.5, -1.0), (0.5, math.inf)])
def test_builtin_domain(s, c):
    with pytest.raises(DomainError):
        builtin_power_s(s, c)


def test_builtin_derivative_consistency(rng):
    h = 1e-6
    for _ in range(100):
        s, c = rng.uniform(0.05, 0.95), rng.uniform(0.1, 2.0)
        x = rng.uniform(0.05, 1.0)
        fs = builtin_power_s(s, c)
        fd = (fs.f(x + h) - fs.f(x - h)) / (2 * h)
        assert fd == pytest.approx(fs.fprime(x), rel=1e-6)


def test_from_expressions_consistent_pair_is_quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fs = from_expressions("x^2", "2*x")
    assert fs.fprime(0.3) == pytest.approx(0.6)
    assert fs.f(0.3) == pytest.approx(0.09)


def test_from_expressions_mismatch_warns():
    with pytest.warns(UserWarning, match="finite difference"):
        fs = from_expressions("x^2", "3*x")
    # central difference 1.0 against f' = 1.5 at x = 0.5
    assert derivative_mismatch(fs, [0.5]) == pytest.approx(1 / 3, rel=1e-6)


def test_from_expressions_derivative_only():
    fs = from_expressions(None, "x^(-0.5)")
    assert fs.f is None
    assert fs.abs_fprime(0.25) == 2.0
