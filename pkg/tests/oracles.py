"""Quadrature oracles for the closed-form bounds.

Each oracle integrates the display that the corresponding closed form
summarises, using only the quadrature module and plain float arithmetic.
"""

import math

import numpy as np

from hhbounds.quadrature import quad

TOL = dict(rel_tol=1e-13, abs_tol=1e-16)


def q(g):
    return quad(g, 0.0, 1.0, **TOL)


def oracle_t1(fa, fb, s, a, b):
    return (b - a) / 4 * q(lambda t: t * (fa * fb) ** (s / 2) * ((fa / fb) ** (s * t / 2) + (fb / fa) ** (s * t / 2)))


def oracle_t2(fa, fb, s, p, a, b):
    qq = p / (p - 1)
    first = q(lambda t: fa ** (s * qq * (1 + t) / 2) * fb ** (s * qq * (1 - t) / 2)) ** (1 / qq)
    second = q(lambda t: fa ** (s * qq * (1 - t) / 2) * fb ** (s * qq * (1 + t) / 2)) ** (1 / qq)
    return (b - a) / (4 * (p + 1) ** (1 / p)) * (first + second)


def oracle_t3(fa, fb, s, qq, a, b):
    first = (fa / fb) ** (s / 2) * q(lambda t: t * (fa / fb) ** (s * qq * t / 2)) ** (1 / qq)
    second = (fb / fa) ** (s / 2) * q(lambda t: t * (fb / fa) ** (s * qq * t / 2)) ** (1 / qq)
    return (b - a) / 4 * 0.5 ** (1 - 1 / qq) * (first + second)


def oracle_t4(fa, fb, s, mu1, mu2, a, b):
    eta1, eta2 = 1 - mu1, 1 - mu2
    young = mu1 * q(lambda t: t ** (1 / mu1)) + mu2 * q(lambda t: t ** (1 / mu2))
    k1 = eta1 * q(lambda t: (fa / fb) ** (s * t / (2 * eta1)))
    k2 = eta2 * q(lambda t: (fa / fb) ** (s * t / (2 * eta2)))
    return (b - a) / 4 * (fa * fb) ** (s / 2) * (young + k1 + k2)


def admissible_case(rng):
    """(fa, fb, s, a, b) from f'(x) = c x^(s-1) with c <= a^(1-s)."""
    s = float(rng.uniform(0.05, 0.95))
    a, b = sorted(float(v) for v in rng.uniform(0.01, 1.0, size=2))
    c = float(rng.uniform(0.01, 1.0)) * a ** (1 - s)
    return c * a ** (s - 1), c * b ** (s - 1), s, a, b


# ---------------------------------------------------------------- dense grids for the tuners

def _g2_vec(y):
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        small = np.abs(y) < 1e-8
        return np.where(small, 1 + y / 2, np.expm1(y) / np.where(small, 1.0, y))


def _log_g2_vec(y):
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        small = np.abs(y) < 1e-8
        safe = np.where(small, 1.0, y)
        big = y > 1
        moderate = np.log(np.expm1(np.where(big, 1.0, safe)) / np.where(big, 1.0, safe))
        large = y + np.log(-np.expm1(-np.where(big, y, 1.0)) / np.where(big, y, 1.0))
        return np.where(small, np.log1p(y / 2), np.where(big, large, moderate))


def t2_on_grid(fa, fb, s, a, b, ps):
    """Theorem-2 bound at every p in ps, vectorised."""
    qs = ps / (ps - 1)
    x = s / 2 * (math.log(fa) - math.log(fb))
    bracket = np.exp(_log_g2_vec(x * qs) / qs) + np.exp(_log_g2_vec(-x * qs) / qs)
    return (b - a) / (4 * (ps + 1) ** (1 / ps)) * (fa * fb) ** (s / 2) * bracket


def t4_coordinate(fa, fb, s, mus):
    """One coordinate's share of the Theorem-4 bracket: mu^2/(1+mu) + eta g2(.)."""
    x = s / 2 * (math.log(fa) - math.log(fb))
    eta = 1 - mus
    return mus**2 / (1 + mus) + eta * _g2_vec(x / eta)


def t4_prefactor(fa, fb, s, a, b):
    return (b - a) / 4 * (fa * fb) ** (s / 2)
