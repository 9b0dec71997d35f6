import math

import numpy as np
import pytest

from hhbounds.bounds import ParamSet, bound_t1, bound_t2, bound_t4, hh_lhs, verdict
from hhbounds.funcspec import builtin_power_s, from_expressions
from hhbounds.kernel import EndpointDerivatives
from hhbounds.tuner import MU_DELTA, P_MAX, P_MIN, golden_section, tightness_rank, tune_mu, tune_p

from oracles import admissible_case

UNIT = EndpointDerivatives(1.0, 1.0)


def p_grid_min(d, s, a, b, n=10_000):
    best = math.inf
    for lp in np.linspace(math.log(P_MIN), math.log(P_MAX), n):
        best = min(best, bound_t2(d, s, math.exp(float(lp)), a, b))
    return best


def test_golden_section_quadratic():
    x, fx, it = golden_section(lambda v: (v - 0.3) ** 2, 0.0, 1.0)
    assert x == pytest.approx(0.3, abs=1e-9)
    assert it > 10


def test_tune_p_unit_endpoints_sits_on_lower_edge():
    a, b = 0.2, 0.7
    r = tune_p(UNIT, 0.5, a, b)
    assert r.best_params == P_MIN
    assert r.at_boundary == (True, False)
    assert r.best_bound == pytest.approx(p_grid_min(UNIT, 0.5, a, b), rel=1e-6)
    assert r.best_bound <= p_grid_min(UNIT, 0.5, a, b)


def test_tune_p_matches_grid(rng):
    for _ in range(8):
        fa, fb, s, a, b = admissible_case(rng)
        d = EndpointDerivatives(fa, fb)
        r = tune_p(d, s, a, b)
        assert r.best_bound == pytest.approx(p_grid_min(d, s, a, b), rel=1e-6)
        assert r.best_bound <= bound_t2(d, s, 2.0, a, b) + 1e-12
        assert r.best_bound == pytest.approx(bound_t2(d, s, r.best_params, a, b), rel=1e-14)


def test_tune_p_deterministic():
    d = EndpointDerivatives(0.8, 0.3)
    assert tune_p(d, 0.6, 0.2, 0.9) == tune_p(d, 0.6, 0.2, 0.9)


def test_tune_mu_unit_endpoints_flags_edge():
    r = tune_mu(UNIT, 0.5, 0.2, 0.6)
    assert r.best_params == (1 - MU_DELTA, 1 - MU_DELTA)
    assert r.at_boundary == (True, True)


def test_tune_mu_symmetric_endpoints():
    d = EndpointDerivatives(0.4, 0.4)
    r = tune_mu(d, 0.7, 0.1, 0.5)
    assert r.best_params[0] == pytest.approx(r.best_params[1], abs=1e-8)


def test_tune_mu_never_loses_to_half(rng):
    for _ in range(8):
        fa, fb, s, a, b = admissible_case(rng)
        d = EndpointDerivatives(fa, fb)
        r = tune_mu(d, s, a, b)
        assert r.best_bound <= bound_t4(d, s, 0.5, 0.5, a, b) + 1e-12
        assert r.best_bound == pytest.approx(bound_t4(d, s, *r.best_params, a, b), rel=1e-14)


def test_tune_mu_survives_overflowing_edges():
    d = EndpointDerivatives(1e-300, 1e300)  # alpha is huge in the s/(2 eta) direction
    r = tune_mu(d, 1.0, 0.1, 0.9)
    assert math.isfinite(r.best_bound)


def test_tuned_bounds_are_valid_in_strict_mode(rng):
    for _ in range(15):
        s = float(rng.uniform(0.05, 0.95))
        a, b = sorted(float(v) for v in rng.uniform(0.01, 1.0, size=2))
        c = float(rng.uniform(0.01, 1.0)) * a ** (1 - s)
        fs = builtin_power_s(s, c)
        rep = verdict(fs, ParamSet(s=s), a, b)
        assert not rep.rejected
        d = rep.endpoints
        lhs = hh_lhs(fs, a, b)
        assert lhs <= tune_p(d, s, a, b).best_bound + 1e-12
        assert lhs <= tune_mu(d, s, a, b).best_bound + 1e-12


def test_rank_unit_endpoints_ties():
    one = from_expressions(None, "1+0*x")
    ranks = tightness_rank(one, 0.5, 0.2, 0.6)
    names = [e.theorem for e in ranks]
    assert names[:2] == ["t1", "t3"]
    assert ranks[0].bound == ranks[1].bound == (0.6 - 0.2) / 4


def test_rank_example_row_one():
    ranks = tightness_rank(builtin_power_s(0.5, 1.0), 0.5, 0.89, 0.9)
    t1 = next(e for e in ranks if e.theorem == "t1")
    assert t1.bound == pytest.approx(2.570313847e-3, rel=1e-9)
    bounds = [e.bound for e in ranks]
    assert bounds == sorted(bounds)
    assert {e.theorem for e in ranks} == {"t1", "t2", "t3", "t4"}
