"""Exact computation of spin Hurwitz numbers with divisible ramification.

The engine evaluates the numbers three independent ways -- a torus
localization closed form, an intersection-table evaluation over spin
moduli, and a symmetric-group character oracle -- and verifies the
underlying Euler-class algebra symbolically in exact arithmetic.
"""

from .combi import EmptySpace, SpinProfile, validate
from .elsv import Backend, IntersectionTable, TableCache, fit_table, prefactor
from .hurwitz import Calibration, HurwitzOracle, HurwitzQuery, brute_force_r1
from .localize import (
    ContributionReport,
    check_identity,
    hurwitz_class,
    hurwitz_scalar,
    inverse_euler_closed,
    verify_identity,
)
from .ratcore import ExactScalar, GradedClass, Laurent

__all__ = [
    "Backend",
    "Calibration",
    "ContributionReport",
    "EmptySpace",
    "ExactScalar",
    "GradedClass",
    "HurwitzOracle",
    "HurwitzQuery",
    "IntersectionTable",
    "Laurent",
    "SpinProfile",
    "TableCache",
    "brute_force_r1",
    "check_identity",
    "fit_table",
    "hurwitz_class",
    "hurwitz_scalar",
    "inverse_euler_closed",
    "prefactor",
    "validate",
    "verify_identity",
]

__version__ = "0.1.0"
