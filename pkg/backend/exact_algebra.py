"""
Exact Algebra Module

Symbolic substrate for the coefficient generators, built on sympy:
- BigRational is sympy.Rational; Gaussian rationals are sympy numbers p + q*I
- polynomials are sympy.Poly in the generator T over QQ
- RationalFunction keeps num/den coprime with den monic and adds the numeric
  evaluation (float, complex, numpy, mpmath) and the JSON/text output
- LogRational is rational_part + log_coeff * ln(log_arg)

integrate_E_form only supports poles at t = 1 (of any order); that is the only
pole structure the LG coefficient integrals produce.
"""

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
import sympy
from sympy import Poly
from sympy.polys.domains import QQ

BigRational = sympy.Rational
I = sympy.I

# Generator of every polynomial in the package (z, t, theta or x by context)
T = sympy.Symbol("t")


def gaussian(re, im=0):
    """Exact complex rational re + i*im."""
    return sympy.Rational(re) + I * sympy.Rational(im)


def polynomial(coeffs) -> Poly:
    """Poly over QQ from coefficients listed low degree first."""
    cs = [sympy.sympify(c) for c in coeffs] or [sympy.S.Zero]
    return Poly(list(reversed(cs)), T, domain=QQ)


def _as_poly(value) -> Poly:
    if isinstance(value, Poly):
        p = value if value.gens == (T,) else Poly(value.as_expr(), T)
    else:
        p = Poly(sympy.sympify(value), T)
    return p.to_field()


def poly_arith(p: Poly, q: Poly, op: str) -> Poly:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown polynomial operation: {op}")


def _rational_str(c) -> str:
    c = sympy.sympify(c)
    if c.is_Rational:
        return f"{c.p}/{c.q}"
    re, im = sympy.re(c), sympy.im(c)
    return f"{_rational_str(re)}{'+' if im >= 0 else '-'}{_rational_str(abs(im))}i"


def _poly_str(p: Poly, var: str) -> str:
    return sympy.sstr(p.as_expr().subs(T, sympy.Symbol(var)))


# =============================================================================
# NUMERIC EVALUATION
# =============================================================================

@lru_cache(maxsize=4096)
def _float_coeffs(p: Poly) -> np.ndarray:
    """Coefficients high degree first as float64 (complex128 if any are complex)."""
    cs = [complex(c) for c in p.all_coeffs()]
    if all(c.imag == 0 for c in cs):
        return np.array([c.real for c in cs])
    return np.array(cs)


def _mp_scalar(c):
    c = sympy.sympify(c)
    if c.is_Rational:
        return mpmath.mpf(int(c.p)) / int(c.q)
    return mpmath.mpc(_mp_scalar(sympy.re(c)), _mp_scalar(sympy.im(c)))


@lru_cache(maxsize=4096)
def _mp_coeffs(p: Poly, prec: int) -> tuple:
    # prec only keys the cache; conversion happens at the working precision
    return tuple(_mp_scalar(c) for c in p.all_coeffs())


def _is_exact(x) -> bool:
    return isinstance(x, (Fraction, sympy.Basic))


def evaluate_poly(p: Poly, x):
    """p(x): exact for Fraction/sympy arguments, mpmath for mpmath, numpy otherwise."""
    if _is_exact(x):
        return p.eval(sympy.sympify(x))
    if isinstance(x, (mpmath.mpf, mpmath.mpc)):
        return mpmath.polyval(list(_mp_coeffs(p, mpmath.mp.prec)), x)
    return np.polyval(_float_coeffs(p), x)


# =============================================================================
# RATIONAL FUNCTIONS
# =============================================================================

class RationalFunction:
    """
    num/den with gcd(num, den) = 1 and den monic.

    Instances are immutable values; every constructor path normalizes, so
    structural equality is mathematical equality.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = _as_poly(num)
        den = _as_poly(1 if den is None else den)
        if den.is_zero:
            raise ZeroDivisionError("RationalFunction with zero denominator")
        self.num, self.den = self._normalize(num, den)

    @staticmethod
    def _normalize(num: Poly, den: Poly):
        if num.is_zero:
            return Poly(0, T, domain=QQ), Poly(1, T, domain=QQ)
        _, num, den = num.cofactors(den)
        lead = den.LC()
        return num.quo_ground(lead), den.quo_ground(lead)

    @classmethod
    def _reduced(cls, num: Poly, den: Poly):
        """Wrap a pair already known to be coprime with den monic."""
        r = object.__new__(cls)
        r.num, r.den = num, den
        return r

    @classmethod
    def x(cls):
        return cls(Poly(T, T, domain=QQ))

    @staticmethod
    def _lift(other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, bool):
            return NotImplemented
        if isinstance(other, (int, Fraction, Poly, sympy.Basic)):
            return RationalFunction(other)
        return NotImplemented

    def is_zero(self):
        return self.num.is_zero

    def __bool__(self):
        return not self.is_zero()

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        den = self.den.lcm(other.den)
        num = self.num * den.quo(self.den) + other.num * den.quo(other.den)
        return RationalFunction(num, den)

    __radd__ = __add__

    def __neg__(self):
        return self._reduced(-self.num, self.den)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def reciprocal(self):
        if self.is_zero():
            raise ZeroDivisionError("reciprocal of zero RationalFunction")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other * self.reciprocal()

    def __pow__(self, n: int):
        if n < 0:
            return self.reciprocal() ** (-n)
        return self._reduced(self.num ** n, self.den ** n)

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return False
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((tuple(self.num.all_coeffs()), tuple(self.den.all_coeffs())))

    def derivative(self):
        num = self.num.diff(T) * self.den - self.num * self.den.diff(T)
        return RationalFunction(num, self.den * self.den)

    def __call__(self, x):
        if _is_exact(x):
            d = evaluate_poly(self.den, x)
            if d == 0:
                raise ZeroDivisionError(f"pole at {x}")
            return evaluate_poly(self.num, x) / d
        return evaluate_poly(self.num, x) / evaluate_poly(self.den, x)

    def coefficient_arrays(self):
        """(num, den) coefficients high degree first, for vectorized np.polyval."""
        return _float_coeffs(self.num), _float_coeffs(self.den)

    def value_at_zero(self):
        d0 = self.den.eval(0)
        if d0 == 0:
            raise ZeroDivisionError("pole at 0")
        return self.num.eval(0) / d0

    def value_at_infinity(self):
        if self.is_zero():
            return sympy.S.Zero
        dn, dd = self.num.degree(), self.den.degree()
        if dn > dd:
            raise ZeroDivisionError("pole at infinity")
        if dn < dd:
            return sympy.S.Zero
        return self.num.LC() / self.den.LC()

    def decay_order(self):
        """deg(den) - deg(num): the power of 1/t at infinity."""
        if self.is_zero():
            return math.inf
        return self.den.degree() - self.num.degree()

    def as_expr(self, var: str = "t"):
        s = sympy.Symbol(var)
        return self.num.as_expr().subs(T, s) / self.den.as_expr().subs(T, s)

    def to_json(self):
        return {
            "num": [_rational_str(c) for c in reversed(self.num.all_coeffs())],
            "den": [_rational_str(c) for c in reversed(self.den.all_coeffs())],
        }

    def to_str(self, var="z"):
        if self.den.degree() == 0:
            return _poly_str(self.num, var)
        den = sympy.sstr(sympy.factor(self.den.as_expr().subs(T, sympy.Symbol(var))))
        return f"({_poly_str(self.num, var)}) / ({den})"

    def __repr__(self):
        return f"RationalFunction({self.to_str('x')})"


def ratfunc_derivative(r: RationalFunction) -> RationalFunction:
    return r.derivative()


def _one_minus_t() -> Poly:
    return Poly(1 - T, T, domain=QQ)


@dataclass(frozen=True)
class LogRational:
    """rational_part + log_coeff * ln(log_arg)."""
    rational_part: RationalFunction
    log_coeff: sympy.Rational = sympy.S.Zero
    log_arg: Poly = field(default_factory=lambda: Poly(1, T, domain=QQ))

    @property
    def is_rational(self):
        return self.log_coeff == 0

    def __call__(self, z):
        value = self.rational_part(z)
        if self.log_coeff:
            arg = evaluate_poly(self.log_arg, z)
            if isinstance(arg, (mpmath.mpf, mpmath.mpc)):
                log = mpmath.log(arg)
                coeff = _mp_scalar(self.log_coeff)
            else:
                arg = complex(arg) if np.iscomplexobj(arg) else float(arg)
                log = cmath.log(arg) if isinstance(arg, complex) or arg < 0 else math.log(arg)
                coeff = float(self.log_coeff)
            value = value + coeff * log
        return value

    def to_str(self, var="z"):
        if not self.log_coeff:
            return self.rational_part.to_str(var)
        log = f"{self.log_coeff}*ln({_poly_str(self.log_arg, var)})"
        if self.rational_part.is_zero():
            return log
        return f"{self.rational_part.to_str(var)} + {log}"

    def to_json(self):
        return {
            "rational": self.rational_part.to_json(),
            "log_coeff": _rational_str(self.log_coeff),
            "log_arg": [_rational_str(c) for c in reversed(self.log_arg.all_coeffs())],
        }


def integrate_E_form(f: RationalFunction, allow_log: bool = False) -> LogRational:
    """
    Antiderivative of f from 0 to z, for f with poles only at t = 1.

    f is written as N(t)/(t - 1)^d; with u = t - 1 each term b_j u^(j-d)
    integrates termwise. The u^-1 term produces the logarithm, which is only
    admissible for the zeroth coefficient (allow_log=True).
    """
    from backend.errors import NonIntegrableForm

    if f.is_zero():
        return LogRational(RationalFunction(0))

    d = f.den.degree()
    if f.den != Poly((T - 1) ** d, T, domain=QQ):
        raise NonIntegrableForm(f"unexpected pole structure in integrand {f.to_str('t')}")

    b = list(reversed(f.num.shift(1).all_coeffs()))  # N(1 + u), low degree first
    shift = max(0, d - 1)
    out = [sympy.S.Zero] * (len(b) + shift + 1)
    log_coeff = sympy.S.Zero
    for j, bj in enumerate(b):
        if not bj:
            continue
        e = j - d + 1
        if e == 0:
            log_coeff = bj
            continue
        out[e + shift] += bj / e
    if log_coeff and not allow_log:
        raise NonIntegrableForm(f"nonzero residue {log_coeff} at t = 1 in {f.to_str('t')}")

    num_u = polynomial(out)
    rational = RationalFunction(num_u.shift(-1), Poly((T - 1) ** shift, T, domain=QQ))
    rational = rational - rational.value_at_zero()
    # b ln(t - 1) from 0 to z is b ln(1 - z)
    return LogRational(rational, log_coeff, _one_minus_t())


def _split_minus_i(p: Poly):
    """Real and imaginary coefficient polynomials of p(-i*t)."""
    g = Poly(sympy.expand(p.as_expr().subs(T, -I * T)), T)
    cs = g.all_coeffs()
    return (Poly([sympy.re(c) for c in cs], T, domain=QQ),
            Poly([sympy.im(c) for c in cs], T, domain=QQ))


def substitute_minus_i_theta(r: RationalFunction):
    """Split r(-i*theta) = re(theta) + i*im(theta) exactly."""
    a, b = _split_minus_i(r.num)
    c, d = _split_minus_i(r.den)
    norm = c * c + d * d
    return RationalFunction(a * c + b * d, norm), RationalFunction(b * c - a * d, norm)


# =============================================================================
# PARTIAL BELL POLYNOMIALS
# =============================================================================

@lru_cache(maxsize=None)
def _bell_terms(k: int, j: int) -> tuple:
    """B_{k,j} as (coefficient, exponents of x_1..x_{k-j+1}) pairs."""
    xs = sympy.symbols(f"x1:{k - j + 2}")
    poly = Poly(sympy.bell(k, j, xs), *xs)
    return tuple((int(c), e) for e, c in poly.terms())


def bell_partial(k: int, j: int, x):
    """
    Partial Bell polynomial B_{k,j}(x_1, ..., x_{k-j+1}).

    Only the first k - j + 1 entries of x are read; they may be numbers,
    sympy expressions or RationalFunctions.
    """
    if k < 0 or j < 0:
        raise IndexError("Bell polynomial indices must be nonnegative")
    if k == 0 or j == 0:
        return 1 if k == j else 0
    if j > k:
        return 0
    if len(x) < k - j + 1:
        raise IndexError(f"B_{k},{j} needs {k - j + 1} arguments, got {len(x)}")
    total = 0
    for coeff, exps in _bell_terms(k, j):
        term = coeff
        for xi, e in zip(x, exps):
            if not e:
                continue
            if not xi:
                break
            term = term * xi ** e
        else:
            total = total + term
    return total


def bell_table(n: int, x, j_max=None):
    """All B_{m,j} for m <= n, j <= j_max, keyed by (m, j)."""
    j_max = n if j_max is None else j_max
    table = {(0, 0): 1}
    for m in range(1, n + 1):
        table[(m, 0)] = 0
        for j in range(1, min(m, j_max) + 1):
            table[(m, j)] = bell_partial(m, j, x)
    return table
