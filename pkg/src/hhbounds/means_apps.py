"""The bounds specialised to f(x) = x^s/s, written with the special means.

With |f'(x)| = x^(s-1) the endpoint ratio is a power of a/b, so each
right-hand side below is computed from a, b directly rather than through
:class:`~hhbounds.kernel.EndpointDerivatives`; the test-suite checks the two
routes against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .kernel import MeanKind, g1, g2, mean


def _check(s: float, a: float, b: float):
    if not (0 < s < 1):
        raise DomainError(f"s must lie in (0, 1), got {s!r}")
    if not (0 < a < b <= 1):
        raise DomainError(f"need 0 < a < b <= 1, got a={a!r}, b={b!r}")


def prop_lhs(s: float, a: float, b: float) -> float:
    """(1/s) |A(a^s, b^s) - L_s(a, b)^s|, the defect of x^s/s on [a, b].

    L_s goes through :func:`~hhbounds.kernel.mean`, whose expm1 form avoids
    the cancellation in (b^(s+1) - a^(s+1))/((s+1)(b-a)) when b is close to a.
    """
    _check(s, a, b)
    arith = mean(MeanKind.arithmetic(), a**s, b**s)
    ls = mean(MeanKind.generalized_logarithmic(s), a, b) ** s
    return abs(arith - ls) / s


def _ab_power(s: float, a: float, b: float) -> float:
    return (a * b) ** (s / 2 * (s - 1))


def prop1_rhs(s: float, a: float, b: float) -> float:
    _check(s, a, b)
    beta = (a / b) ** ((s - 1) * s / 2)
    return (b - a) / 4 * _ab_power(s, a, b) * (g1(beta) + g1(1 / beta))


def prop2_rhs(s: float, p: float, a: float, b: float) -> float:
    """The generalized-mean form: (b-a)/(4(p+1)^(1/p)) |ab|^(s(s-1)/2)
    (b^(s(1-s)/2) + a^(s(1-s)/2)) L(a^c, b^c)^(1/q), c = (s-1)sq/2."""
    _check(s, a, b)
    if not p > 1:
        raise DomainError(f"p must exceed 1, got {p!r}")
    q = p / (p - 1)
    c = (s - 1) * s * q / 2
    e = s * (1 - s) / 2
    lm = mean(MeanKind.logarithmic(), a**c, b**c)
    return (b - a) / (4 * (p + 1) ** (1 / p)) * _ab_power(s, a, b) * (b**e + a**e) * lm ** (1 / q)


def _g1_as_printed(beta: float) -> float:
    """Second bracket of the printed third proposition: (beta ln beta + beta - 1)/(ln beta)^2."""
    if beta == 1:
        return 0.5
    lb = math.log(beta)
    return (beta * lb + beta - 1) / (lb * lb)


def prop3_rhs(s: float, q: float, a: float, b: float, as_printed: bool = False) -> float:
    """Theorem-3 specialization; ``as_printed`` swaps in the printed second bracket.

    The printed bracket reads ``+beta - 1`` where g1 has ``-beta + 1``. For
    0 < a < b and s < 1 its argument is below 1 and the printed bracket is
    negative, so its q-th root is taken as the signed real root.
    """
    _check(s, a, b)
    if not q >= 1:
        raise DomainError(f"q must be >= 1, got {q!r}")
    beta = (a / b) ** ((s - 1) * s * q / 2)
    first = (a / b) ** (s / 2 * (s - 1)) * g1(beta) ** (1 / q)
    second_kernel = _g1_as_printed(1 / beta) if as_printed else g1(1 / beta)
    root = math.copysign(abs(second_kernel) ** (1 / q), second_kernel)
    second = (b / a) ** (s / 2 * (s - 1)) * root
    return (b - a) / 4 * 0.5 ** (1 - 1 / q) * (first + second)


def prop4_rhs(s: float, mu1: float, mu2: float, a: float, b: float) -> float:
    _check(s, a, b)
    for name, mu in (("mu1", mu1), ("mu2", mu2)):
        if not (0 < mu < 1):
            raise DomainError(f"{name} must lie in (0, 1), got {mu!r}")
    eta1, eta2 = 1 - mu1, 1 - mu2
    young = ((1 + mu2) * mu1**2 + (1 + mu1) * mu2**2) / ((1 + mu1) * (1 + mu2))
    k1 = eta1 * g2((a / b) ** ((s - 1) * s / (2 * eta1)))
    k2 = eta2 * g2((a / b) ** ((s - 1) * s / (2 * eta2)))
    return (b - a) / 4 * _ab_power(s, a, b) * (young + k1 + k2)


def prop3_discrepancy(s: float, q: float, a: float, b: float) -> dict:
    """Second-bracket kernel and full bound, Theorem-3 form against printed form."""
    _check(s, a, b)
    beta_inv = (a / b) ** (-(s - 1) * s * q / 2)
    k_thm = g1(beta_inv)
    k_printed = _g1_as_printed(beta_inv)
    r_thm = prop3_rhs(s, q, a, b)
    r_printed = prop3_rhs(s, q, a, b, as_printed=True)
    return {
        "s": s, "q": q, "a": a, "b": b,
        "kernel_theorem": k_thm, "kernel_printed": k_printed,
        "kernel_difference": k_thm - k_printed,
        "rhs_theorem": r_thm, "rhs_printed": r_printed,
        "rhs_difference": r_thm - r_printed,
    }


# printed (s, a, b, lhs, rhs) rows of the worked example
EXAMPLE2_ROWS = (
    (0.5, 0.89, 0.9, 4.921067116e-6, 2.570313847e-3),
    (0.2, 0.15, 0.6, 9.780804473e-2, 0.136819309576863680170486),
    (0.75, 0.45, 0.86, 6.115413651e-2, 0.112144032368736206184243),
)
REPRODUCTION_TOL = 1e-6


@dataclass(frozen=True)
class ExampleRow:
    s: float
    a: float
    b: float
    lhs: float
    rhs: float
    paper_lhs: float
    paper_rhs: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def lhs_rel_diff(self) -> float:
        return abs(self.lhs - self.paper_lhs) / abs(self.paper_lhs)

    @property
    def rhs_rel_diff(self) -> float:
        return abs(self.rhs - self.paper_rhs) / abs(self.paper_rhs)

    @property
    def lhs_ok(self) -> bool:
        return self.lhs_rel_diff <= REPRODUCTION_TOL

    @property
    def rhs_ok(self) -> bool:
        return self.rhs_rel_diff <= REPRODUCTION_TOL

    @property
    def passed(self) -> bool:
        return self.lhs_ok and self.rhs_ok

    def decade_shift(self, which: str) -> int | None:
        """Power of ten separating computed and printed values, when the
        mantissas agree within tolerance and the exponents do not."""
        ours, theirs = (self.lhs, self.paper_lhs) if which == "lhs" else (self.rhs, self.paper_rhs)
        k = round(math.log10(theirs / ours))
        if k != 0 and abs(ours * 10.0**k - theirs) <= REPRODUCTION_TOL * abs(theirs):
            return k
        return None

    def to_dict(self) -> dict:
        return {
            "s": self.s, "a": self.a, "b": self.b,
            "lhs": self.lhs, "paper_lhs": self.paper_lhs, "lhs_rel_diff": self.lhs_rel_diff,
            "rhs": self.rhs, "paper_rhs": self.paper_rhs, "rhs_rel_diff": self.rhs_rel_diff,
            "margin": self.margin,
            "lhs_decade_shift": self.decade_shift("lhs"),
            "rhs_decade_shift": self.decade_shift("rhs"),
            "status": "PASS" if self.passed else "FAIL",
        }


def reproduce_example2(rows=EXAMPLE2_ROWS) -> list[ExampleRow]:
    """Recompute the worked example's defect and first bound for each row."""
    out = []
    for s, a, b, plhs, prhs in rows:
        out.append(ExampleRow(s, a, b, prop_lhs(s, a, b), prop1_rhs(s, a, b), plhs, prhs))
    return out
