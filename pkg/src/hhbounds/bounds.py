"""Trapezoid defect, the derivative identity behind it, and the four upper bounds.

Every bound has the form ``(b - a)/4 * ...`` with ``d = (|f'(a)|, |f'(b)|)``.
Exponentials are kept in log-space until the last step.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from . import certify
from .certify import Property, SampledCertificate
from .errors import DomainError, InputError
from .funcspec import FunctionSpec
from .kernel import (
    EndpointDerivatives,
    g1_from_log,
    g2_from_log,
    log_alpha,
    log_g1,
    log_g2,
)
from .quadrature import DEFAULT_ABS_TOL, DEFAULT_REL_TOL, integrate

THEOREMS = ("t1", "t2", "t3", "t4")
MARGIN_SLACK = 1e-12
LEMMA_TOL = 1e-12


class Mode(str, enum.Enum):
    STRICT = "strict"
    PAPER_COMPAT = "paper_compat"


class Regime(str, enum.Enum):
    UNIT_RANGE = "unit_range"
    ABOVE_UNIT = "above_unit"
    MIXED = "mixed"


def _check_interval(a: float, b: float):
    if not (math.isfinite(a) and math.isfinite(b) and 0 < a < b):
        raise DomainError(f"need finite 0 < a < b, got a={a!r}, b={b!r}")


def _check_finite_interval(a: float, b: float):
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise DomainError(f"need finite a < b, got a={a!r}, b={b!r}")


def _check_s(s: float):
    if not (0 < s <= 1):
        raise DomainError(f"s must lie in (0, 1], got {s!r}")


# ---------------------------------------------------------------- left-hand side

def hh_lhs(fs: FunctionSpec, a: float, b: float,
           rel_tol: float = DEFAULT_REL_TOL, abs_tol: float = DEFAULT_ABS_TOL) -> float:
    """|(f(a) + f(b))/2 - mean of f over [a, b]|.

    Integrates the gap between the chord and f, which is small when the
    defect is small, so the relative tolerance applies to the defect itself.
    Without f, the defect is recovered from f' through the derivative
    identity (it does not depend on the additive constant of f).
    """
    _check_finite_interval(a, b)
    if fs.f is None:
        return abs(lemma1_rhs(fs, a, b, rel_tol, abs_tol))
    fa, fb = float(fs.f(a)), float(fs.f(b))
    slope = (fb - fa) / (b - a)

    def gap(x: float) -> float:
        return fa + slope * (x - a) - float(fs.f(x))

    res = integrate(gap, a, b, rel_tol, abs_tol)
    return abs(res.value / (b - a))


def lemma1_rhs(fs: FunctionSpec, a: float, b: float,
               rel_tol: float = LEMMA_TOL, abs_tol: float = 1e-15) -> float:
    """((b-a)/4) * int_0^1 [t f'((1+t)b/2 + (1-t)a/2) - t f'((1+t)a/2 + (1-t)b/2)] dt."""
    _check_finite_interval(a, b)
    fp = fs.fprime

    def integrand(t: float) -> float:
        p = (1 + t) / 2
        r = (1 - t) / 2
        return t * (float(fp(p * b + r * a)) - float(fp(p * a + r * b)))

    return (b - a) / 4 * integrate(integrand, 0.0, 1.0, rel_tol, abs_tol).value


def lemma1_residual(fs: FunctionSpec, a: float, b: float) -> float:
    """|trapezoid defect (signed) - derivative-identity side|, both by quadrature at 1e-12."""
    _check_finite_interval(a, b)
    if fs.f is None:
        raise DomainError("the identity residual needs f as well as f'")
    fa, fb = float(fs.f(a)), float(fs.f(b))
    slope = (fb - fa) / (b - a)
    gap = integrate(lambda x: fa + slope * (x - a) - float(fs.f(x)), a, b, LEMMA_TOL, 1e-15)
    lhs = gap.value / (b - a)
    return abs(lhs - lemma1_rhs(fs, a, b))


# ---------------------------------------------------------------- closed-form bounds

def _product_power(d: EndpointDerivatives, s: float) -> float:
    """|f'(a) f'(b)|^(s/2)."""
    return math.exp(s / 2 * (math.log(d.fa_abs) + math.log(d.fb_abs)))


def bound_t1(d: EndpointDerivatives, s: float, a: float, b: float) -> float:
    """((b-a)/4) |f'(a)f'(b)|^(s/2) (g1(alpha(s/2, s/2)) + g1(alpha(-s/2, -s/2)))."""
    _check_interval(a, b)
    _check_s(s)
    x = log_alpha(d, s / 2, s / 2)
    y = log_alpha(d, -s / 2, -s / 2)
    return (b - a) / 4 * _product_power(d, s) * (g1_from_log(x) + g1_from_log(y))


def conjugate(p: float) -> float:
    """q with 1/p + 1/q = 1."""
    if not p > 1:
        raise DomainError(f"p must exceed 1, got {p!r}")
    return p / (p - 1)


def bound_t2(d: EndpointDerivatives, s: float, p: float, a: float, b: float) -> float:
    """(b-a)/(4 (p+1)^(1/p)) |f'(a)f'(b)|^(s/2) {g2(alpha(sq/2, sq/2))^(1/q) + g2(alpha(-sq/2, -sq/2))^(1/q)}.

    The q-th roots are taken in log-space, so large q (p near 1) cannot
    overflow.
    """
    _check_interval(a, b)
    _check_s(s)
    q = conjugate(p)
    x = log_alpha(d, s * q / 2, s * q / 2)
    y = log_alpha(d, -s * q / 2, -s * q / 2)
    bracket = math.exp(log_g2(x) / q) + math.exp(log_g2(y) / q)
    return (b - a) / (4 * (p + 1) ** (1 / p)) * _product_power(d, s) * bracket


def _half_power_root(log_g: float, q: float) -> float:
    """(1/2)^(1 - 1/q) * g^(1/q), exact when g = 1/2."""
    return 2.0 ** ((log_g / math.log(2) + 1) / q - 1)


def _check_q(q: float):
    if not (q >= 1 and math.isfinite(q)):
        raise DomainError(f"q must be finite and >= 1, got {q!r}")


def bound_t3(d: EndpointDerivatives, s: float, q: float, a: float, b: float) -> float:
    """((b-a)/4)(1/2)^(1-1/q) {|f'(a)/f'(b)|^(s/2) g1(alpha(sq/2,sq/2))^(1/q)
    + |f'(b)/f'(a)|^(s/2) g1(alpha(-sq/2,-sq/2))^(1/q)}.

    This is the statement as printed, with ratio prefactors. See
    :func:`bound_t3_product` for the variant with the product prefactor.
    """
    _check_interval(a, b)
    _check_s(s)
    _check_q(q)
    lr = d.log_ratio
    x = log_alpha(d, s * q / 2, s * q / 2)
    y = log_alpha(d, -s * q / 2, -s * q / 2)
    first = math.exp(s / 2 * lr) * _half_power_root(log_g1(x), q)
    second = math.exp(-s / 2 * lr) * _half_power_root(log_g1(y), q)
    return (b - a) / 4 * (first + second)


def bound_t3_product(d: EndpointDerivatives, s: float, q: float, a: float, b: float) -> float:
    """Theorem-3 bound with |f'(a) f'(b)|^(s/2) in front of both kernel terms.

    Factoring the integrand exactly gives the product, not the ratio; the
    two agree when |f'(a)| = |f'(b)| = 1 and this variant coincides with
    :func:`bound_t1` at q = 1. In the unit range it never exceeds
    :func:`bound_t3`.
    """
    _check_interval(a, b)
    _check_s(s)
    _check_q(q)
    x = log_alpha(d, s * q / 2, s * q / 2)
    y = log_alpha(d, -s * q / 2, -s * q / 2)
    bracket = _half_power_root(log_g1(x), q) + _half_power_root(log_g1(y), q)
    return (b - a) / 4 * _product_power(d, s) * bracket


def _check_mu(mu: float, name: str):
    if not (0 < mu < 1):
        raise DomainError(f"{name} must lie in (0, 1), got {mu!r}")


def bound_t4(d: EndpointDerivatives, s: float, mu1: float, mu2: float, a: float, b: float) -> float:
    """((b-a)/4)|f'(a)f'(b)|^(s/2) {((1+mu2)mu1^2 + (1+mu1)mu2^2)/((1+mu1)(1+mu2))
    + eta1 g2(alpha(s/(2 eta1), .)) + eta2 g2(alpha(s/(2 eta2), .))}, eta_i = 1 - mu_i.

    Raises:
        OverflowError: when a kernel argument leaves double range (eta -> 0
            with alpha > 1).
    """
    _check_interval(a, b)
    _check_s(s)
    _check_mu(mu1, "mu1")
    _check_mu(mu2, "mu2")
    eta1, eta2 = 1 - mu1, 1 - mu2
    young = ((1 + mu2) * mu1**2 + (1 + mu1) * mu2**2) / ((1 + mu1) * (1 + mu2))
    k1 = eta1 * g2_from_log(log_alpha(d, s / (2 * eta1), s / (2 * eta1)))
    k2 = eta2 * g2_from_log(log_alpha(d, s / (2 * eta2), s / (2 * eta2)))
    return (b - a) / 4 * _product_power(d, s) * (young + k1 + k2)


# ---------------------------------------------------------------- verdicts

@dataclass(frozen=True)
class ParamSet:
    """Theorem parameters.

    ``q`` is shared by Theorems 2 and 3 and must be the conjugate of ``p``.
    Give only one of them: with just ``q = 1`` Theorem 2 is not applicable
    and ``p`` stays None.
    """

    s: float
    p: float | None = None
    q: float | None = None
    mu1: float = 0.5
    mu2: float = 0.5
    mode: Mode = Mode.STRICT

    def __post_init__(self):
        if not (0 < self.s <= 1):
            raise InputError(f"s must lie in (0, 1], got {self.s!r}")
        p, q = self.p, self.q
        if p is None and q is None:
            p = 2.0
        if p is not None and not (p > 1 and math.isfinite(p)):
            raise InputError(f"p must be finite and > 1, got {p!r}")
        if q is not None and not (q >= 1 and math.isfinite(q)):
            raise InputError(f"q must be finite and >= 1, got {q!r}")
        if p is None:
            p = q / (q - 1) if q > 1 else None
        elif q is None:
            q = p / (p - 1)
        elif abs(q - p / (p - 1)) > 1e-14 * q:
            raise InputError(f"q={q!r} is not the conjugate of p={p!r}")
        for name in ("mu1", "mu2"):
            v = getattr(self, name)
            if not (0 < v < 1):
                raise InputError(f"{name} must lie in (0, 1), got {v!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "mode", Mode(self.mode))

    @property
    def eta1(self) -> float:
        return 1 - self.mu1

    @property
    def eta2(self) -> float:
        return 1 - self.mu2


@dataclass
class BoundReport:
    lhs: float
    rhs_by_theorem: dict[str, float]
    hypothesis_verdicts: dict[str, SampledCertificate]
    margins: dict[str, float]
    regime: Regime
    mode: Mode
    endpoints: EndpointDerivatives
    a: float
    b: float
    rejected: dict[str, list[str]] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)

    @property
    def violations(self) -> list[str]:
        return [t for t, m in self.margins.items() if m < -MARGIN_SLACK]

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "fa_abs": self.endpoints.fa_abs,
            "fb_abs": self.endpoints.fb_abs,
            "mode": self.mode.value,
            "regime": self.regime.value,
            "lhs": self.lhs,
            "rhs_by_theorem": dict(self.rhs_by_theorem),
            "margins": dict(self.margins),
            "rejected": {k: list(v) for k, v in self.rejected.items()},
            "errors": dict(self.errors),
            "hypothesis_verdicts": {k: c.to_dict() for k, c in self.hypothesis_verdicts.items()},
        }


def _subject(fs: FunctionSpec, power: float):
    if power == 1:
        return fs.abs_fprime
    return lambda x: fs.abs_fprime(x) ** power


def certify_subject(fs: FunctionSpec, power: float, s: float, a: float, b: float,
                    n1: int = certify.DEFAULT_GRID_1D, n3: int = certify.DEFAULT_GRID_3D
                    ) -> dict[Property, SampledCertificate]:
    """Certificates for g = |f'|^power on [a, b].

    Geometric convexity is only sampled when the s-geometric check fails;
    either one is accepted as the convexity hypothesis (see
    :func:`hypotheses_hold`).
    """
    g = _subject(fs, power)
    out = {
        Property.MONOTONE_DECREASING: certify.check_monotone_decreasing(g, a, b, n1),
        Property.RANGE_UNIT_INTERVAL: certify.check_range_unit(g, a, b, n1),
    }
    try:
        sg = certify.check_s_geometric_convexity(g, a, b, s, n3)
    except DomainError as exc:
        sg = SampledCertificate(Property.S_GEOMETRICALLY_CONVEX, certify.Verdict.FAIL,
                                (n3, n3, n3), -math.inf, None, {"error": str(exc)})
    out[Property.S_GEOMETRICALLY_CONVEX] = sg
    if not sg.passed and "error" not in sg.details:
        out[Property.GEOMETRICALLY_CONVEX] = certify.check_geometric_convexity(g, a, b, n3)
    return out


def hypotheses_hold(certs: dict[Property, SampledCertificate]) -> list[str]:
    """Names of the failed hypotheses; empty when the theorem applies.

    In the unit range an s-geometrically convex g is also geometrically
    convex, and geometric convexity with g <= 1 is all the proofs use after
    the pow-tower step, so either convexity certificate is accepted.
    """
    failed = []
    for prop in (Property.MONOTONE_DECREASING, Property.RANGE_UNIT_INTERVAL):
        if not certs[prop].passed:
            failed.append(prop.value)
    convex = certs[Property.S_GEOMETRICALLY_CONVEX].passed or (
        Property.GEOMETRICALLY_CONVEX in certs and certs[Property.GEOMETRICALLY_CONVEX].passed
    )
    if not convex:
        failed.append(Property.S_GEOMETRICALLY_CONVEX.value)
    return failed


def endpoint_derivatives(fs: FunctionSpec, a: float, b: float) -> EndpointDerivatives:
    return EndpointDerivatives(abs(float(fs.fprime(a))), abs(float(fs.fprime(b))))


def _regime(cert: SampledCertificate) -> Regime:
    lo, hi = cert.details["min_sample"], cert.details["max_sample"]
    if hi <= 1 + certify.SLACK and lo > 0:
        return Regime.UNIT_RANGE
    if lo > 1:
        return Regime.ABOVE_UNIT
    return Regime.MIXED


def verdict(fs: FunctionSpec, params: ParamSet, a: float, b: float,
            n1: int = certify.DEFAULT_GRID_1D, n3: int = certify.DEFAULT_GRID_3D) -> BoundReport:
    """Compute the defect and every applicable bound for f on [a, b].

    Strict mode emits a bound only when its hypotheses are certified:
    Theorems 1 and 4 on |f'|, Theorem 2 on |f'|^q with q the conjugate of p,
    Theorem 3 on |f'|^q. Paper-compat mode emits every bound and records the
    regime.
    """
    if not isinstance(params, ParamSet):
        raise InputError("params must be a ParamSet")
    try:
        _check_interval(a, b)
    except DomainError as exc:
        raise InputError(str(exc)) from None
    d = endpoint_derivatives(fs, a, b)
    s = params.s

    powers = {"t1": 1.0, "t4": 1.0, "t3": params.q}
    if params.p is not None:
        powers["t2"] = params.q
    certs_by_power: dict[float, dict] = {}
    verdicts: dict[str, SampledCertificate] = {}
    for power in sorted(set(powers.values())):
        certs = certify_subject(fs, power, s, a, b, n1, n3)
        certs_by_power[power] = certs
        key = "abs_fprime" if power == 1 else f"abs_fprime_pow_{power:.17g}"
        for prop, cert in certs.items():
            verdicts[f"{key}.{prop.value}"] = cert
    regime = _regime(certs_by_power[1.0][Property.RANGE_UNIT_INTERVAL]) if 1.0 in certs_by_power else \
        _regime(certify.check_range_unit(fs.abs_fprime, a, b, n1))

    evaluators = {
        "t1": lambda: bound_t1(d, s, a, b),
        "t2": lambda: bound_t2(d, s, params.p, a, b),
        "t3": lambda: bound_t3(d, s, params.q, a, b),
        "t4": lambda: bound_t4(d, s, params.mu1, params.mu2, a, b),
    }
    lhs = hh_lhs(fs, a, b)
    rhs: dict[str, float] = {}
    margins: dict[str, float] = {}
    rejected: dict[str, list[str]] = {}
    errors: dict[str, str] = {}
    for thm in THEOREMS:
        if thm not in powers:
            errors[thm] = "not applicable: p is undefined for q = 1"
            continue
        failed = hypotheses_hold(certs_by_power[powers[thm]])
        if failed and params.mode is Mode.STRICT:
            rejected[thm] = failed
            continue
        try:
            rhs[thm] = evaluators[thm]()
        except OverflowError as exc:
            errors[thm] = f"overflow: {exc}"
            continue
        margins[thm] = rhs[thm] - lhs
    return BoundReport(lhs, rhs, verdicts, margins, regime, params.mode, d, a, b, rejected, errors)
