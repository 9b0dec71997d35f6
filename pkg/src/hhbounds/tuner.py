"""Choose the free parameters of the Theorem-2 and Theorem-4 bounds.

Both searches scan a coarse grid first and then run golden-section search
inside the bracket around the best grid point, so a multi-modal objective
cannot pull the refinement into the wrong basin. Domain edges are compared
explicitly and an edge that wins is returned exactly. A coordinate is
flagged ``at_boundary`` when it lies within the clamp width 1e-3 of an edge
(in ln p for Theorem 2).
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .bounds import bound_t1, bound_t2, bound_t3, bound_t4, endpoint_derivatives
from .funcspec import FunctionSpec
from .kernel import EndpointDerivatives

INV_PHI = (math.sqrt(5) - 1) / 2
P_MIN = 1 + 1e-4
P_MAX = 1e3
MU_DELTA = 1e-3
EDGE_WIDTH = 1e-3
REL_WIDTH = 1e-10
P_GRID = 200
MU_GRID = 64
T3_Q_CHOICES = (1.0, 2.0, 10.0)


@dataclass(frozen=True)
class TuneResult:
    best_params: float | tuple[float, float]
    best_bound: float
    at_boundary: tuple[bool, ...]
    iterations: int
    bracket_history: list = field(default_factory=list, compare=False)

    def to_dict(self) -> dict:
        params = self.best_params
        return {
            "best_params": list(params) if isinstance(params, tuple) else params,
            "best_bound": self.best_bound,
            "at_boundary": list(self.at_boundary),
            "iterations": self.iterations,
        }


def _safe(fn: Callable[[float], float]) -> Callable[[float], float]:
    def wrapped(x: float) -> float:
        try:
            v = fn(x)
        except OverflowError:
            return math.inf
        return v if math.isfinite(v) else math.inf

    return wrapped


def golden_section(fn: Callable[[float], float], lo: float, hi: float,
                   rel_width: float = REL_WIDTH, history: list | None = None
                   ) -> tuple[float, float, int]:
    """Minimize a unimodal fn on [lo, hi] until the bracket is narrower than
    rel_width * max(1, |midpoint|). Returns (x, fn(x), iterations)."""
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = fn(x1), fn(x2)
    it = 0
    while hi - lo > rel_width * max(1.0, abs(lo + hi) / 2):
        it += 1
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = fn(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = fn(x2)
        if history is not None:
            history.append((lo, hi))
        if it > 500:
            break
    x, fx = (x1, f1) if f1 <= f2 else (x2, f2)
    return x, fx, it


def _refine_1d(fn, lo: float, hi: float, grid: np.ndarray, history: list):
    """Grid scan, golden-section refinement, then compare with both edges."""
    vals = np.array([fn(float(g)) for g in grid])
    k = int(np.argmin(vals))
    blo = float(grid[max(k - 1, 0)])
    bhi = float(grid[min(k + 1, len(grid) - 1)])
    x, fx, it = golden_section(fn, blo, bhi, history=history)
    best = (fx, x)
    for edge in (lo, hi):
        fe = fn(edge)
        if fe <= best[0]:
            best = (fe, edge)
    if float(vals[k]) < best[0]:
        best = (float(vals[k]), float(grid[k]))
    return best[1], best[0], it


def tune_p(d: EndpointDerivatives, s: float, a: float, b: float) -> TuneResult:
    """Minimize the Theorem-2 bound over p in [1 + 1e-4, 1e3], searching in ln p."""
    lo, hi = math.log(P_MIN), math.log(P_MAX)
    obj = _safe(lambda lp: bound_t2(d, s, math.exp(lp), a, b))
    history: list = []
    grid = np.linspace(lo, hi, P_GRID)
    lp, val, it = _refine_1d(obj, lo, hi, grid, history)
    p = math.exp(lp) if lp not in (lo, hi) else (P_MIN if lp == lo else P_MAX)
    best = bound_t2(d, s, p, a, b)
    return TuneResult(p, best, (lp - lo <= EDGE_WIDTH, hi - lp <= EDGE_WIDTH), it, history)


def tune_mu(d: EndpointDerivatives, s: float, a: float, b: float) -> TuneResult:
    """Minimize the Theorem-4 bound over (mu1, mu2) in [1e-3, 1 - 1e-3]^2.

    A 64 x 64 grid seeds alternating golden-section passes on each
    coordinate; points where a kernel overflows score +inf.
    """
    lo, hi = MU_DELTA, 1 - MU_DELTA
    obj = _safe(lambda m: bound_t4(d, s, m[0], m[1], a, b))
    axis = np.linspace(lo, hi, MU_GRID)
    best_val, best = math.inf, (0.5, 0.5)
    for m1 in axis:
        for m2 in axis:
            v = obj((float(m1), float(m2)))
            if v < best_val:
                best_val, best = v, (float(m1), float(m2))

    mu = list(best)
    history: list = []
    iterations = 0
    for _ in range(4):
        prev = tuple(mu)
        for i in range(2):
            def coord(v, i=i):
                trial = list(mu)
                trial[i] = v
                return obj(tuple(trial))

            step = axis[1] - axis[0]
            local = np.clip(np.array([mu[i] - step, mu[i], mu[i] + step]), lo, hi)
            x, fx, it = _refine_1d(coord, lo, hi, local, history)
            iterations += it
            if fx <= coord(mu[i]):
                mu[i] = x
        if tuple(mu) == prev:
            break
    params = (mu[0], mu[1])
    val = bound_t4(d, s, mu[0], mu[1], a, b)
    flags = tuple(m - lo <= EDGE_WIDTH or hi - m <= EDGE_WIDTH for m in params)
    return TuneResult(params, val, flags, iterations, history)


@dataclass(frozen=True)
class RankEntry:
    theorem: str
    bound: float
    params: dict


def tightness_rank(fs: FunctionSpec, s: float, a: float, b: float) -> list[RankEntry]:
    """All four bounds for fs on [a, b], tightest first.

    Theorem 2 and 4 use tuned parameters, Theorem 3 the best q of {1, 2, 10}.
    Ties keep theorem order.
    """
    d = endpoint_derivatives(fs, a, b)
    entries = [RankEntry("t1", bound_t1(d, s, a, b), {})]
    tp = tune_p(d, s, a, b)
    entries.append(RankEntry("t2", tp.best_bound, {"p": tp.best_params}))
    q_best, v_best = None, math.inf
    for q in T3_Q_CHOICES:
        try:
            v = bound_t3(d, s, q, a, b)
        except OverflowError:
            continue
        if v < v_best:
            q_best, v_best = q, v
    entries.append(RankEntry("t3", v_best, {"q": q_best}))
    tm = tune_mu(d, s, a, b)
    entries.append(RankEntry("t4", tm.best_bound, {"mu1": tm.best_params[0], "mu2": tm.best_params[1]}))
    return sorted(entries, key=lambda e: (e.bound, e.theorem))
