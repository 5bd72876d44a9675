"""
Unit Tests for the exact algebra layer

Run with: pytest tests/ -v
"""

import math
import os
import sys
from fractions import Fraction

import mpmath
import pytest
import sympy

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from backend.errors import NonIntegrableForm
from backend.exact_algebra import (
    I,
    LogRational,
    RationalFunction,
    T,
    bell_partial,
    bell_table,
    gaussian,
    integrate_E_form,
    poly_arith,
    polynomial,
    ratfunc_derivative,
    substitute_minus_i_theta,
)

X = RationalFunction.x()


class TestScalars:
    """Rationals and Gaussian rationals."""

    def test_i_squared(self):
        """i * i is -1."""
        assert I * I == gaussian(-1)

    def test_gaussian_division(self):
        """(1 + i) / (1 - i) is i."""
        assert sympy.simplify(gaussian(1, 1) / gaussian(1, -1)) == I

    def test_conjugation_is_an_involution(self):
        """conj(conj(w)) == w."""
        w = gaussian(Fraction(1, 2), -3)
        assert sympy.conjugate(sympy.conjugate(w)) == w
        assert complex(w) == complex(0.5, -3)


class TestPolynomial:
    """Polynomials over Q."""

    def test_trailing_zero_coefficients_dropped(self):
        """High-order zeros are stripped so equality is structural."""
        assert polynomial((1, 2, 0, 0)) == polynomial((1, 2))
        assert polynomial((0, 0)).is_zero

    def test_arith(self):
        """(z - 1)(z + 1) = z^2 - 1 and p + 0 = p."""
        p, q = polynomial((-1, 1)), polynomial((1, 1))
        assert poly_arith(p, q, "mul") == polynomial((-1, 0, 1))
        assert poly_arith(p, polynomial(()), "add") == p
        assert poly_arith(p, p, "mul") == polynomial((1, -2, 1))
        with pytest.raises(ValueError):
            poly_arith(p, q, "div")

    def test_fraction_coefficients(self):
        """Fractions and strings become exact rationals."""
        assert polynomial((Fraction(1, 2), "1/3")).all_coeffs() == [sympy.Rational(1, 3), sympy.Rational(1, 2)]


class TestRationalFunction:
    """Normalized rational functions."""

    def test_gcd_cancelled(self):
        """(x^2 - 1)/(x - 1) reduces to x + 1."""
        r = (X * X - 1) / (X - 1)
        assert r == X + 1
        assert r.den == polynomial((1,))

    def test_monic_denominator(self):
        """Leading denominator coefficient is normalized to 1."""
        r = RationalFunction(polynomial((1,)), polynomial((0, 2)))
        assert r.den == polynomial((0, 1))
        assert r.num == polynomial((Fraction(1, 2),))

    def test_quotient_rule(self):
        """d/dx 1/(1 + x^2) = -2x/(1 + x^2)^2."""
        r = 1 / (1 + X * X)
        assert r.derivative() == -2 * X / (1 + X * X) ** 2

    def test_derivative_examples(self):
        """d/dz[-z/(z-1)^2] and d/dz[-2z(z+1)/(z-1)^4]."""
        assert ratfunc_derivative(-X / (X - 1) ** 2) == (X + 1) / (X - 1) ** 3
        got = ratfunc_derivative(-2 * X * (X + 1) / (X - 1) ** 4)
        assert got == (4 * X * X + 10 * X + 2) / (X - 1) ** 5
        assert ratfunc_derivative(RationalFunction(7)).is_zero()

    def test_mixed_scalar_ops(self):
        """int, Fraction and sympy operands lift on either side."""
        assert 2 - X == -(X - 2)
        assert Fraction(1, 3) * (3 * X) == X
        assert sympy.Rational(1, 2) * (2 * X) == X
        assert RationalFunction(1 - T) == 1 - X

    def test_limits(self):
        """Values at 0 and infinity."""
        r = (2 * X * X + 1) / (X * X + 3)
        assert r.value_at_zero() == sympy.Rational(1, 3)
        assert r.value_at_infinity() == 2
        assert (X / (X * X + 1)).decay_order() == 1
        with pytest.raises(ZeroDivisionError):
            (1 / X).value_at_zero()

    def test_float_and_exact_evaluation(self):
        """Fractions evaluate exactly, floats through numpy."""
        r = (X + 1) / (X - 3)
        assert r(Fraction(1, 2)) == sympy.Rational(-3, 5)
        assert float(r(2.0)) == pytest.approx(-3.0)
        assert complex(r(1j)) == pytest.approx((1j + 1) / (1j - 3))

    def test_mpmath_evaluation(self):
        """mpmath arguments keep working precision."""
        with mpmath.workdps(40):
            v = (X / (X - 1))(mpmath.mpf(3))
            assert isinstance(v, mpmath.mpf)
            assert v == mpmath.mpf(3) / 2
            w = (1 / (3 * X))(mpmath.mpf(1))
            assert abs(w - mpmath.mpf(1) / 3) < mpmath.mpf(10) ** -38

    def test_to_json(self):
        """Coefficients serialize low degree first as 'num/den'."""
        r = (1 - X / 2) / (X + 1)
        assert r.to_json() == {"num": ["1/1", "-1/2"], "den": ["1/1", "1/1"]}

    def test_to_str(self):
        """Readable form uses the requested variable."""
        text = (X / (X - 1) ** 2).to_str("z")
        assert text.startswith("(z) / (")
        assert "z - 1" in text

    def test_hash_follows_equality(self):
        """Equal values hash equally."""
        assert hash((X * X - 1) / (X - 1)) == hash(X + 1)

    def test_minus_i_theta_split(self):
        """z at -i theta is 0 - i theta."""
        re, im = substitute_minus_i_theta(X)
        assert re.is_zero()
        assert im == -X

    def test_minus_i_theta_constant(self):
        """A constant has no imaginary part."""
        re, im = substitute_minus_i_theta(RationalFunction(sympy.Rational(5, 7)))
        assert re == sympy.Rational(5, 7)
        assert im.is_zero()

    def test_minus_i_theta_rational(self):
        """1/(1 - z) at -i theta = (1 - i theta)/(1 + theta^2)."""
        re, im = substitute_minus_i_theta(1 / (1 - X))
        assert re == 1 / (1 + X * X)
        assert im == -X / (1 + X * X)

    def test_minus_i_theta_first_coefficient(self):
        """z/(z-1)^2 at -i theta matches complex evaluation."""
        r = X / (X - 1) ** 2
        re, im = substitute_minus_i_theta(r)
        assert re == -2 * X * X / (1 + X * X) ** 2
        assert im == -X * (1 - X * X) / (1 + X * X) ** 2
        for theta in (0.3, 1.0, 2.7):
            w = -1j * theta / (-1j * theta - 1) ** 2
            assert float(re(theta)) == pytest.approx(w.real, rel=1e-14)
            assert float(im(theta)) == pytest.approx(w.imag, rel=1e-14)


class TestIntegration:
    """Antiderivatives with poles only at t = 1."""

    def test_double_pole(self):
        """Integral of 1/(t-1)^2 from 0 to z is z/(1 - z)."""
        got = integrate_E_form(1 / (X - 1) ** 2)
        assert got.is_rational
        assert got.rational_part == X / (1 - X)

    def test_simple_pole_requires_log(self):
        """A residue at t = 1 is refused unless a logarithm is allowed."""
        with pytest.raises(NonIntegrableForm):
            integrate_E_form(1 / (X - 1))
        got = integrate_E_form(1 / (X - 1), allow_log=True)
        assert got.log_coeff == 1
        assert got.rational_part.is_zero()
        assert got(0.5) == pytest.approx(math.log(0.5))

    def test_log_mpmath(self):
        """The logarithm follows mpmath arguments."""
        got = integrate_E_form(-1 / (2 * (X - 1)), allow_log=True)
        with mpmath.workdps(30):
            v = got(mpmath.mpf("0.25"))
            assert abs(v + mpmath.log(mpmath.mpf("0.75")) / 2) < mpmath.mpf(10) ** -28

    def test_other_pole_rejected(self):
        """Poles away from t = 1 are outside the supported form."""
        with pytest.raises(NonIntegrableForm):
            integrate_E_form(1 / (X + 2) ** 2)

    def test_polynomial_integrand(self):
        """A polynomial integrates termwise with zero constant."""
        got = integrate_E_form(3 * X * X + 1)
        assert got.rational_part == X ** 3 + X

    def test_log_rational_to_str(self):
        """Text form names the logarithm."""
        lr = LogRational(RationalFunction(0), sympy.Rational(-1, 2), polynomial((1, -1)))
        assert "ln(" in lr.to_str()
        assert lr.to_json()["log_coeff"] == "-1/2"


class TestBell:
    """Partial Bell polynomials."""

    def test_small_cases(self):
        """B_{n,1} = x_n, B_{n,n} = x_1^n, B_{4,2} = 4 x1 x3 + 3 x2^2."""
        x = [1, 2, 3, 5]
        assert bell_partial(4, 1, x) == 5
        assert bell_partial(3, 3, x) == 1
        assert bell_partial(4, 2, x) == 4 * 1 * 3 + 3 * 2 * 2

    def test_zero_first_argument(self):
        """With x_1 = 0 (no linear term) B_{3,2} vanishes and B_{4,2} = 3 x2^2."""
        x = [0, 2, 3]
        assert bell_partial(3, 2, x) == 0
        assert bell_partial(4, 2, x) == 12

    def test_exactly_enough_arguments(self):
        """B_{4,2} reads only x_1..x_3."""
        assert bell_partial(4, 2, [0, 1, 2]) == 3
        assert bell_partial(5, 3, [1, 1, 1]) == 25

    def test_symbolic_arguments(self):
        """B_{3,2}(x1, x2) = 3 x1 x2 over sympy symbols."""
        x1, x2 = sympy.symbols("a b")
        assert sympy.expand(bell_partial(3, 2, [x1, x2]) - 3 * x1 * x2) == 0

    def test_rational_function_arguments(self):
        """Entries may be RationalFunctions."""
        table = bell_table(2, [X, X * X])
        assert table[(2, 1)] == X * X
        assert table[(2, 2)] == X * X

    def test_edge_indices(self):
        """B_{0,0} = 1; j = 0 or j > k give 0."""
        assert bell_partial(0, 0, []) == 1
        assert bell_partial(3, 0, [1, 2, 3]) == 0
        assert bell_partial(2, 3, [1]) == 0

    def test_missing_argument(self):
        """Too few arguments raise IndexError."""
        with pytest.raises(IndexError):
            bell_partial(4, 1, [1, 2])
        with pytest.raises(IndexError):
            bell_partial(-1, 1, [1])
