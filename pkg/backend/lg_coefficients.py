"""
LG Coefficients Module

Generates the Liouville-Green expansion coefficients for the incomplete gamma
differential equation

    w'' = {a^2 f0(z) + a f1(z) + g(z)} w,
    f0 = (z-1)^2/(4z^2),  f1 = 1/(2z),  g = -1/(4z^2),

by exact rational-function recursion:
- F[s]: F0, F1 in closed form, F[s+1] = z/(1-z) F[s]' - 1/2 sum F[j] F[s-j]
- E[s]: integral from 0 to z of (t-1) F[s](t) / (2t)
- L[s], R[s]: (-1)^s times the imaginary / real part of E[s](-i*theta)

Configuration (via .env):
- GTI_ASYM_MAX_ORDER: default table order (default: 12)
"""

import os
import sys
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import sympy
from dotenv import load_dotenv

from backend.exact_algebra import (
    LogRational,
    RationalFunction,
    T,
    integrate_E_form,
    substitute_minus_i_theta,
)

load_dotenv()

# =============================================================================
# CONFIGURATION
# =============================================================================

# Highest coefficient index built by default. The zero expansions use K = 10
# and the error bounds need order 2n, so 12 leaves a little margin.
DEFAULT_MAX_ORDER = int(os.getenv("GTI_ASYM_MAX_ORDER", "12"))


Z = RationalFunction.x()
ONE_MINUS_Z = RationalFunction(1 - T)


def f0() -> RationalFunction:
    return (Z - 1) ** 2 / (4 * Z ** 2)


def f1() -> RationalFunction:
    return 1 / (2 * Z)


def g() -> RationalFunction:
    return -1 / (4 * Z ** 2)


def phi() -> RationalFunction:
    """f1 / (2 f0) = z/(z-1)^2; F0 of the recessive family is -phi."""
    return f1() / (2 * f0())


def psi() -> RationalFunction:
    """(4 f0 f0'' - 5 f0'^2) / (16 f0^3) + g/f0 = -z(z+2)/(z-1)^4."""
    p0 = f0()
    d1 = p0.derivative()
    d2 = d1.derivative()
    return (4 * p0 * d2 - 5 * d1 * d1) / (16 * p0 ** 3) + g() / p0


def _first_step(F0: RationalFunction) -> RationalFunction:
    # s = 0 step of the Riccati recursion, where psi enters
    return Z / ONE_MINUS_Z * F0.derivative() - F0 * F0 / 2 + psi() / 2


def _next_step(F: list, s: int) -> RationalFunction:
    """F[s+1] from F[0..s], valid for s >= 1."""
    conv = sum((F[j] * F[s - j] for j in range(s + 1)), RationalFunction(0))
    return Z / ONE_MINUS_Z * F[s].derivative() - conv / 2


def _E_integrand(F_s: RationalFunction) -> RationalFunction:
    return (Z - 1) * F_s / (2 * Z)


class LGCoefficientTable:
    """
    Immutable table of F[s], E[s], L[s], R[s] for s = 0..max_order.

    L[0] and R[0] are None: E[0] = -1/2 ln(1-z) is not rational.

    Usage:
        table = get_table(12)
        table.E[2](0.5)
    """

    def __init__(self, max_order: int = DEFAULT_MAX_ORDER):
        if max_order < 1:
            raise ValueError("max_order must be >= 1")
        self.max_order = max_order

        F = [-Z / (Z - 1) ** 2, -2 * Z * (Z + 1) / (Z - 1) ** 4]
        for s in range(1, max_order):
            F.append(_next_step(F, s))
        self.F = tuple(F[: max_order + 1])

        E = [integrate_E_form(_E_integrand(F[0]), allow_log=True)]
        for s in range(1, max_order + 1):
            E.append(integrate_E_form(_E_integrand(F[s])))
        self.E = tuple(E)

        L, R = [None], [None]
        for s in range(1, max_order + 1):
            re, im = substitute_minus_i_theta(E[s].rational_part)
            sign = -1 if s % 2 else 1
            L.append(sign * im)
            R.append(sign * re)
        self.L = tuple(L)
        self.R = tuple(R)

        print(f"[LGCoefficientTable] Built max_order={max_order}", file=sys.stderr)

    def E_rational(self, s: int) -> RationalFunction:
        return self.E[s].rational_part


@lru_cache(maxsize=8)
def get_table(max_order: int = DEFAULT_MAX_ORDER) -> LGCoefficientTable:
    return LGCoefficientTable(max_order)


def _table_for(s: int) -> LGCoefficientTable:
    return get_table(max(s, DEFAULT_MAX_ORDER))


def gen_F(s: int) -> RationalFunction:
    if s < 0:
        raise ValueError("s must be >= 0")
    return _table_for(s).F[s]


def gen_E(s: int) -> LogRational:
    if s < 0:
        raise ValueError("s must be >= 0")
    return _table_for(s).E[s]


def gen_L(s: int) -> RationalFunction:
    if s < 1:
        raise ValueError("L is defined for s >= 1")
    return _table_for(s).L[s]


def gen_R(s: int) -> RationalFunction:
    if s < 1:
        raise ValueError("R is defined for s >= 1")
    return _table_for(s).R[s]


@dataclass(frozen=True)
class PlusFamilyCheck:
    ok: bool
    first_offending: Optional[int] = None

    def __bool__(self):
        return self.ok


def verify_plus_family_zero(max_order: int) -> PlusFamilyCheck:
    """
    Run the recursion for the dominant solution and check it terminates.

    In this normalization the f1 contribution sits in the s = 0 coefficient:
    F0+ = +phi, E0+ = +1/2 ln(1-z) = -E0-, which together with
    f0^(-1/4) exp(a xi) is exactly z^((1-a)/2) e^(az/2). Every coefficient
    with s >= 1 must vanish identically.
    """
    F = [phi()]
    F.append(_first_step(F[0]))
    for s in range(1, max_order):
        F.append(_next_step(F, s))

    E0 = integrate_E_form(_E_integrand(F[0]), allow_log=True)
    if not (E0.rational_part.is_zero() and E0.log_coeff == sympy.Rational(1, 2)):
        return PlusFamilyCheck(False, 0)
    for s in range(1, max_order + 1):
        if not F[s].is_zero():
            return PlusFamilyCheck(False, s)
        if not integrate_E_form(_E_integrand(F[s])).rational_part.is_zero():
            return PlusFamilyCheck(False, s)
    return PlusFamilyCheck(True)
