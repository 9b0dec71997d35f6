"""Adaptive Simpson integration with a Richardson-corrected local rule."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

from .errors import DomainError, EvalError

DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-12
MAX_DEPTH = 40


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_estimate: float
    evaluations: int
    converged: bool


def _finite(g: Callable[[float], float], x: float) -> float:
    y = g(x)
    y = float(y)
    if not math.isfinite(y):
        raise EvalError(f"integrand is not finite at x={x!r}")
    return y


def integrate(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
    max_depth: int = MAX_DEPTH,
) -> QuadResult:
    """Integrate g over [lo, hi].

    The interval is bisected until two half-interval Simpson estimates agree
    with the whole-interval estimate to within 15x the local tolerance; the
    accepted value includes the Richardson correction (S2 - S1)/15, which makes
    the local rule fifth order. The target is max(rel_tol*|I|, abs_tol), with
    |I| taken from a first pass over four panels.

    If some panel hits ``max_depth`` the best estimate is still returned,
    flagged ``converged=False``.
    """
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise DomainError(f"need finite lo < hi, got [{lo!r}, {hi!r}]")
    if not (rel_tol > 0 and abs_tol > 0):
        raise DomainError("tolerances must be positive")

    evals = 0

    def f(x: float) -> float:
        nonlocal evals
        evals += 1
        return _finite(g, x)

    # first pass: 4 panels to size the relative target
    xs = [lo + (hi - lo) * i / 8 for i in range(9)]
    xs[-1] = hi
    ys = [f(x) for x in xs]
    h8 = (hi - lo) / 8
    coarse = h8 / 3 * (ys[0] + 4 * sum(ys[1:8:2]) + 2 * sum(ys[2:7:2]) + ys[8])
    tol = max(rel_tol * abs(coarse), abs_tol)

    parts: list[float] = []
    errs: list[float] = []
    converged = True

    # explicit stack: (a, b, fa, fm, fb, whole, tol, depth)
    stack = []
    for i in range(0, 8, 2):
        a, m, b = xs[i], xs[i + 1], xs[i + 2]
        fa, fm, fb = ys[i], ys[i + 1], ys[i + 2]
        whole = (b - a) / 6 * (fa + 4 * fm + fb)
        stack.append((a, b, fa, fm, fb, whole, tol / 4, 2))
    stack.reverse()

    while stack:
        a, b, fa, fm, fb, whole, ptol, depth = stack.pop()
        m = (a + b) / 2
        lm = (a + m) / 2
        rm = (m + b) / 2
        flm = f(lm)
        frm = f(rm)
        left = (m - a) / 6 * (fa + 4 * flm + fm)
        right = (b - m) / 6 * (fm + 4 * frm + fb)
        delta = left + right - whole
        if abs(delta) <= 15 * ptol or depth >= max_depth or lm in (a, m) or rm in (m, b):
            if abs(delta) > 15 * ptol:
                converged = False
            parts.append(left + right + delta / 15)
            errs.append(abs(delta) / 15)
            continue
        stack.append((m, b, fm, frm, fb, right, ptol / 2, depth + 1))
        stack.append((a, m, fa, flm, fm, left, ptol / 2, depth + 1))

    total = math.fsum(parts)
    err_total = math.fsum(errs)
    if converged and err_total > max(rel_tol * abs(total), abs_tol):
        converged = False
    return QuadResult(total, err_total, evals, converged)


def quad(g: Callable[[float], float], lo: float, hi: float,
         rel_tol: float = DEFAULT_REL_TOL, abs_tol: float = DEFAULT_ABS_TOL) -> float:
    """Value-only shorthand for :func:`integrate`."""
    return integrate(g, lo, hi, rel_tol, abs_tol).value
