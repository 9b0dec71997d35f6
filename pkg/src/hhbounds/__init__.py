"""Hermite-Hadamard trapezoid bounds for functions whose |f'| is
s-geometrically convex: evaluation, sampled certification, tuning."""

from .bounds import (
    BoundReport,
    Mode,
    ParamSet,
    Regime,
    bound_t1,
    bound_t2,
    bound_t3,
    bound_t3_product,
    bound_t4,
    hh_lhs,
    lemma1_residual,
    verdict,
)
from .certify import (
    SampledCertificate,
    check_geometric_convexity,
    check_monotone_decreasing,
    check_range_unit,
    check_s_geometric_convexity,
)
from .errors import DomainError, EvalError, ExprSyntaxError, InputError
from .funcspec import FunctionSpec, builtin_power_s, evaluate, from_expressions, parse
from .kernel import EndpointDerivatives, MeanKind, alpha, g1, g2, mean, pow_tower_holds
from .quadrature import QuadResult, integrate
from .tuner import TuneResult, tightness_rank, tune_mu, tune_p

__version__ = "0.1.0"
