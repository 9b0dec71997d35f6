"""Scalar kernels: alpha(u, v), g1, g2, the pow-tower comparison and the special means.

g1 and g2 are the closed forms of

    g1(alpha) = int_0^1 t * alpha**t dt
    g2(alpha) = int_0^1 alpha**t dt

Both have a removable singularity at alpha = 1. Internally everything is
driven by x = ln(alpha): the bounds build x directly in log-space, so large
exponents never overflow before the last step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

# below this |ln alpha| the closed forms lose ~8 digits; use the series
SEAM = 1e-4
POW_TOWER_TOL = 1e-15

_MAX_EXP = math.log(1.7976931348623157e308)

# coefficients of 1/2 + x/3 + x^2/8 + ... ; c_k = (k+1)/(k+2)!
_G1_SERIES = tuple((k + 1) / math.factorial(k + 2) for k in range(6))
# coefficients of 1 + x/2 + x^2/6 + ... ; c_k = 1/(k+1)!
_G2_SERIES = tuple(1 / math.factorial(k + 1) for k in range(6))


def _horner(coeffs: tuple[float, ...], x: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class EndpointDerivatives:
    """|f'(a)| and |f'(b)|, the only data about f the closed-form bounds need."""

    fa_abs: float
    fb_abs: float

    def __post_init__(self):
        for name in ("fa_abs", "fb_abs"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0:
                raise DomainError(f"{name} must be finite and > 0, got {v!r}")

    @property
    def log_ratio(self) -> float:
        """ln(|f'(a)| / |f'(b)|)."""
        return math.log(self.fa_abs) - math.log(self.fb_abs)

    def swapped(self) -> "EndpointDerivatives":
        return EndpointDerivatives(self.fb_abs, self.fa_abs)


def log_alpha(d: EndpointDerivatives, u: float, v: float) -> float:
    """ln alpha(u, v) = u ln|f'(a)| - v ln|f'(b)|."""
    if not (math.isfinite(u) and math.isfinite(v)):
        raise DomainError("exponents must be finite")
    return u * math.log(d.fa_abs) - v * math.log(d.fb_abs)


def alpha(d: EndpointDerivatives, u: float, v: float) -> float:
    """alpha(u, v) = |f'(a)|**u * |f'(b)|**(-v), evaluated in log-space.

    Raises:
        OverflowError: if the result is not representable.
    """
    x = log_alpha(d, u, v)
    if x > _MAX_EXP:
        raise OverflowError(f"alpha exponent {x:.6g} exceeds double range")
    return math.exp(x)


def _check_alpha(a: float) -> float:
    if not (a > 0) or not math.isfinite(a):
        raise DomainError(f"alpha must be finite and > 0, got {a!r}")
    return math.log(a)


def g1_from_log(x: float) -> float:
    """g1 evaluated at alpha = exp(x)."""
    if abs(x) < SEAM:
        return _horner(_G1_SERIES, x)
    if x > _MAX_EXP:
        raise OverflowError(f"g1 overflows at ln(alpha) = {x:.6g}")
    ex = math.exp(x)
    return (x * ex - math.expm1(x)) / (x * x)


def g2_from_log(x: float) -> float:
    """g2 evaluated at alpha = exp(x)."""
    if abs(x) < SEAM:
        return _horner(_G2_SERIES, x)
    if x > _MAX_EXP:
        raise OverflowError(f"g2 overflows at ln(alpha) = {x:.6g}")
    return math.expm1(x) / x


def log_g1(x: float) -> float:
    """ln g1(exp(x)); finite for every finite x."""
    if x > 1.0:
        # g1 = e^x (x - 1 + e^-x) / x^2
        return x + math.log((x + math.expm1(-x)) / (x * x))
    return math.log(g1_from_log(x))


def log_g2(x: float) -> float:
    """ln g2(exp(x)); finite for every finite x."""
    if x > 1.0:
        # g2 = e^x (1 - e^-x) / x
        return x + math.log(-math.expm1(-x) / x)
    return math.log(g2_from_log(x))


def g1(alpha_value: float) -> float:
    """(alpha ln alpha - alpha + 1) / (ln alpha)**2, with g1(1) = 1/2."""
    return g1_from_log(_check_alpha(alpha_value))


def g2(alpha_value: float) -> float:
    """(alpha - 1) / ln alpha, with g2(1) = 1."""
    return g2_from_log(_check_alpha(alpha_value))


def pow_tower_holds(k: float, m: float, n: float) -> bool:
    """Check k**(m**n) <= k**(m*n) for k, m, n in (0, 1]."""
    for name, val in (("k", k), ("m", m), ("n", n)):
        if not (0 < val <= 1):
            raise DomainError(f"{name} must lie in (0, 1], got {val!r}")
    return k ** (m**n) <= k ** (m * n) + POW_TOWER_TOL


@dataclass(frozen=True)
class MeanKind:
    """One of the two-argument means A, L and L_p."""

    tag: str
    p: float | None = None

    def __post_init__(self):
        if self.tag not in ("arithmetic", "logarithmic", "generalized_logarithmic"):
            raise DomainError(f"unknown mean {self.tag!r}")
        if self.tag == "generalized_logarithmic":
            if self.p is None or not math.isfinite(self.p) or self.p in (-1.0, 0.0):
                raise DomainError(f"L_p needs finite p outside {{-1, 0}}, got {self.p!r}")

    @classmethod
    def arithmetic(cls) -> "MeanKind":
        return cls("arithmetic")

    @classmethod
    def logarithmic(cls) -> "MeanKind":
        return cls("logarithmic")

    @classmethod
    def generalized_logarithmic(cls, p: float) -> "MeanKind":
        return cls("generalized_logarithmic", p)


def mean(kind: MeanKind, a: float, b: float) -> float:
    """Arithmetic, logarithmic or generalized logarithmic mean of a, b > 0.

    The logarithmic means are extended to a == b by continuity (value a).
    """
    if not (a > 0 and b > 0) or not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"means need finite a, b > 0, got {a!r}, {b!r}")
    if kind.tag == "arithmetic":
        return (a + b) / 2
    if a == b:
        return a
    y = math.log(b) - math.log(a)
    if kind.tag == "logarithmic":
        # (b - a) / ln(b/a) = a * g2(b/a)
        return a * g2_from_log(y)
    p = kind.p
    # (b^{p+1} - a^{p+1}) / ((p+1)(b-a)) = a^p * expm1((p+1)y) / ((p+1) expm1(y))
    ratio = math.expm1((p + 1) * y) / ((p + 1) * math.expm1(y))
    return a * ratio ** (1 / p)
