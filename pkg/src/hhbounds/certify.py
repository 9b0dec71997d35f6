"""Sampled checks of the hypotheses the bounds rely on.

A certificate is evidence from a finite grid, not a proof. Every grid is
built as ``a + (b - a) * (i / (n - 1))`` so that the grid for ``2n - 1``
points contains the grid for ``n`` points bit for bit; a failure found at
``n`` is therefore also found after refinement.

When several samples tie for the worst margin the first one in C order
(lexicographically smallest grid index) is reported.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, EvalError

SLACK = 1e-12
DEFAULT_GRID_1D = 64
DEFAULT_GRID_3D = 24


class Property(str, enum.Enum):
    MONOTONE_DECREASING = "monotone_decreasing"
    GEOMETRICALLY_CONVEX = "geometrically_convex"
    S_GEOMETRICALLY_CONVEX = "s_geometrically_convex"
    RANGE_UNIT_INTERVAL = "range_unit_interval"


class Verdict(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"


@dataclass(frozen=True)
class SampledCertificate:
    property: Property
    verdict: Verdict
    grid: tuple[int, ...]
    worst_margin: float
    counterexample: dict | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    def to_dict(self) -> dict:
        return {
            "property": self.property.value,
            "verdict": self.verdict.value,
            "grid": list(self.grid),
            "worst_margin": self.worst_margin,
            "counterexample": self.counterexample,
            **self.details,
        }


def grid(a: float, b: float, n: int) -> np.ndarray:
    """n endpoint-inclusive points on [a, b]; nested under n -> 2n - 1."""
    if n < 2:
        raise DomainError(f"grid needs n >= 2, got {n}")
    pts = a + (b - a) * (np.arange(n) / (n - 1))
    pts[-1] = b
    return pts


def sample(g: Callable, xs: np.ndarray) -> np.ndarray:
    """Evaluate g on an array, vectorized when g supports it."""
    try:
        with np.errstate(all="ignore"):
            out = np.asarray(g(xs), dtype=float)
        if out.shape != xs.shape:
            out = np.broadcast_to(out, xs.shape).astype(float)
    except (TypeError, ValueError):
        flat = [float(g(float(x))) for x in xs.ravel()]
        out = np.asarray(flat, dtype=float).reshape(xs.shape)
    if not np.all(np.isfinite(out)):
        idx = np.unravel_index(int(np.argmin(np.isfinite(out))), xs.shape)
        raise EvalError(f"function is not finite at x={float(xs[idx])!r}")
    return out


def _check_interval(a: float, b: float):
    if not (math.isfinite(a) and math.isfinite(b) and 0 < a < b):
        raise DomainError(f"need finite 0 < a < b, got a={a!r}, b={b!r}")


def check_monotone_decreasing(g: Callable, a: float, b: float,
                              n: int = DEFAULT_GRID_1D) -> SampledCertificate:
    """Pass iff g(x_{i+1}) <= g(x_i) + 1e-12 for consecutive samples."""
    _check_interval(a, b)
    xs = grid(a, b, n)
    ys = sample(g, xs)
    margins = ys[:-1] - ys[1:]
    i = int(np.argmin(margins))
    worst = float(margins[i])
    if worst >= -SLACK:
        return SampledCertificate(Property.MONOTONE_DECREASING, Verdict.PASS, (n,), worst)
    cex = {"x0": float(xs[i]), "x1": float(xs[i + 1]),
           "g_x0": float(ys[i]), "g_x1": float(ys[i + 1])}
    return SampledCertificate(Property.MONOTONE_DECREASING, Verdict.FAIL, (n,), worst, cex)


def _geometric_points(a: float, b: float, n: int):
    xs = grid(a, b, n)
    ts = grid(0.0, 1.0, n)
    X, Y, T = np.meshgrid(xs, xs, ts, indexing="ij")
    M = X**T * Y ** (1 - T)
    return X, Y, T, M


def check_s_geometric_convexity(g: Callable, a: float, b: float, s: float,
                                n: int = DEFAULT_GRID_3D) -> SampledCertificate:
    """Check g(x^t y^(1-t)) <= g(x)^(t^s) g(y)^((1-t)^s) on an n^3 grid.

    The inequality is tested in log form,
    ``t^s ln g(x) + (1-t)^s ln g(y) - ln g(x^t y^(1-t)) >= -1e-12``.

    Raises:
        DomainError: if g is not positive at some sample.
    """
    _check_interval(a, b)
    if not (0 < s <= 1):
        raise DomainError(f"s must lie in (0, 1], got {s!r}")
    X, Y, T, M = _geometric_points(a, b, n)
    gx = sample(g, X[:, 0, 0])
    gm = sample(g, M)
    if np.any(gx <= 0) or np.any(gm <= 0):
        raise DomainError("s-geometric convexity needs g > 0 on [a, b]")
    lgx = np.log(gx)
    ts = T[0, 0, :]
    ws = ts**s
    wr = (1 - ts) ** s
    margins = ws[None, None, :] * lgx[:, None, None] + wr[None, None, :] * lgx[None, :, None] - np.log(gm)
    return _grid_certificate(Property.S_GEOMETRICALLY_CONVEX, margins, X, Y, T, gx, gm, s, n)


def check_geometric_convexity(g: Callable, a: float, b: float,
                              n: int = DEFAULT_GRID_3D) -> SampledCertificate:
    """Check g(x^t y^(1-t)) <= g(x)^t g(y)^(1-t) on an n^3 grid.

    Compares the two sides directly (not in log form); margins are RHS - LHS
    with the usual 1e-12 absolute slack.
    """
    _check_interval(a, b)
    X, Y, T, M = _geometric_points(a, b, n)
    gx = sample(g, X[:, 0, 0])
    gm = sample(g, M)
    if np.any(gx <= 0) or np.any(gm <= 0):
        raise DomainError("geometric convexity needs g > 0 on [a, b]")
    rhs = gx[:, None, None] ** T * gx[None, :, None] ** (1 - T)
    margins = rhs - gm
    return _grid_certificate(Property.GEOMETRICALLY_CONVEX, margins, X, Y, T, gx, gm, 1.0, n)


def _grid_certificate(prop, margins, X, Y, T, gx, gm, s, n) -> SampledCertificate:
    flat = int(np.argmin(margins))
    idx = np.unravel_index(flat, margins.shape)
    worst = float(margins[idx])
    if worst >= -SLACK:
        return SampledCertificate(prop, Verdict.PASS, (n, n, n), worst)
    i, j, _ = idx
    t = float(T[idx])
    cex = {
        "x": float(X[idx]), "y": float(Y[idx]), "t": t, "s": s,
        "lhs": float(gm[idx]),
        "rhs": float(gx[i] ** (t**s) * gx[j] ** ((1 - t) ** s)),
    }
    return SampledCertificate(prop, Verdict.FAIL, (n, n, n), worst, cex)


def check_range_unit(g: Callable, a: float, b: float,
                     n: int = DEFAULT_GRID_1D) -> SampledCertificate:
    """Pass iff 0 < g(x) <= 1 + 1e-12 at every sample."""
    _check_interval(a, b)
    xs = grid(a, b, n)
    ys = sample(g, xs)
    upper = 1 - ys
    margins = np.minimum(upper, ys)
    i = int(np.argmin(margins))
    worst = float(margins[i])
    details = {"max_sample": float(ys.max()), "min_sample": float(ys.min())}
    if float(ys.min()) > 0 and worst >= -SLACK:
        return SampledCertificate(Property.RANGE_UNIT_INTERVAL, Verdict.PASS, (n,), worst, None, details)
    cex = {"x": float(xs[i]), "g_x": float(ys[i])}
    return SampledCertificate(Property.RANGE_UNIT_INTERVAL, Verdict.FAIL, (n,), worst, cex, details)


def recheck_counterexample(g: Callable, cert: SampledCertificate) -> float:
    """Recompute the violation of a failed certificate from scratch.

    Returns the violation amount in the certificate's own units (positive
    means violated by that much).
    """
    if cert.verdict is not Verdict.FAIL:
        raise ValueError("certificate has no counterexample")
    c = cert.counterexample
    if cert.property is Property.MONOTONE_DECREASING:
        return float(g(c["x1"])) - float(g(c["x0"]))
    if cert.property is Property.RANGE_UNIT_INTERVAL:
        v = float(g(c["x"]))
        return max(v - 1.0, -v)
    x, y, t, s = c["x"], c["y"], c["t"], c["s"]
    gm = float(g(x**t * y ** (1 - t)))
    bound = float(g(x)) ** (t**s) * float(g(y)) ** ((1 - t) ** s)
    if cert.property is Property.GEOMETRICALLY_CONVEX:
        return gm - bound
    return math.log(gm) - math.log(bound)
