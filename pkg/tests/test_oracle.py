"""
Unit Tests for the reference oracle

Run with: pytest tests/ -v
"""

import cmath
import math
import os
import sys

import mpmath
import pytest
from scipy.special import fresnel, gamma, gammaincc

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from backend.errors import CancellationOverflow, DerivativeNearZero
from backend.oracle import (
    QuadratureConfig,
    delta_metric,
    gti_derivative,
    gti_value,
    oracle_gamma_on_ray,
    quad_CiSi,
    quad_Gamma_real,
    refine_zero,
    series_gamma,
)

EXTENDED = QuadratureConfig(precision_mode="extended")


class TestCiSi:
    """Quadrature of the generalised trigonometric integrals."""

    @pytest.mark.parametrize("x", [0.25, 1.0, 3.0, 17.25, 60.0])
    def test_a_equals_one(self, x):
        """Ci(1, x) = sin x and Si(1, x) = 1 - cos x."""
        c, s = quad_CiSi(1.0, x)
        assert c == pytest.approx(math.sin(x), abs=1e-13)
        assert s == pytest.approx(1 - math.cos(x), abs=1e-13)

    @pytest.mark.parametrize("x", [0.5, 4.0, 25.0])
    def test_a_half_fresnel(self, x):
        """Ci(1/2, x) and Si(1/2, x) are scaled Fresnel integrals."""
        S, C = fresnel(math.sqrt(2 * x / math.pi))
        c, s = quad_CiSi(0.5, x)
        scale = math.sqrt(2 * math.pi)
        assert c == pytest.approx(scale * C, rel=1e-12)
        assert s == pytest.approx(scale * S, rel=1e-12)

    def test_extended_agrees_with_panels(self):
        """Both precision modes agree at a = 10, x = 30."""
        std = quad_CiSi(10.0, 30.0)
        ext = quad_CiSi(10.0, 30.0, EXTENDED)
        assert std[0] == pytest.approx(ext[0], rel=1e-12)
        assert std[1] == pytest.approx(ext[1], rel=1e-12)

    def test_zero_argument(self):
        """The integrals vanish at x = 0."""
        assert quad_CiSi(3.0, 0.0) == (0.0, 0.0)

    def test_bad_parameters(self):
        """a must be positive and x nonnegative."""
        with pytest.raises(ValueError):
            quad_CiSi(0.0, 1.0)
        with pytest.raises(ValueError):
            quad_CiSi(1.0, -1.0)
        with pytest.raises(ValueError):
            QuadratureConfig(panel_rule_order=4)


class TestFamilies:
    """Ti and the lowercase complements."""

    def test_ti_integral_form(self):
        """Ti(a, x; alpha) is the integral of t^(a-1) cos(t - pi alpha)."""
        a, x, alpha = 2.5, 7.0, 0.3
        ref = mpmath.quad(lambda t: t ** (a - 1) * mpmath.cos(t - mpmath.pi * alpha), [0, x])
        assert gti_value("Ti", a, x, alpha) == pytest.approx(float(ref), rel=1e-12)

    @pytest.mark.parametrize("a", [0.3, 0.7])
    @pytest.mark.parametrize("z", [1.0, 5.0, 20.0])
    def test_connection_identities(self, a, z):
        """ci and si equal their tail integrals, so Ci + ci = Gamma(a) cos(pi a/2)."""
        ci_ref = mpmath.quadosc(lambda t: t ** (a - 1) * mpmath.cos(t), [z, mpmath.inf], omega=1)
        si_ref = mpmath.quadosc(lambda t: t ** (a - 1) * mpmath.sin(t), [z, mpmath.inf], omega=1)
        assert gti_value("ci", a, z) == pytest.approx(float(ci_ref), rel=1e-10)
        assert gti_value("si", a, z) == pytest.approx(float(si_ref), rel=1e-10)
        total = gti_value("Ci", a, z) + gti_value("ci", a, z)
        assert total == pytest.approx(gamma(a) * math.cos(0.5 * math.pi * a), rel=1e-12)

    @pytest.mark.parametrize("family", ["Ci", "Si", "Ti", "ci"])
    def test_derivative(self, family):
        """gti_derivative matches a central difference."""
        a, x, alpha, h = 3.5, 6.2, 0.3 if family == "Ti" else 0.0, 1e-5
        fd = (gti_value(family, a, x + h, alpha) - gti_value(family, a, x - h, alpha)) / (2 * h)
        assert gti_derivative(family, a, x, alpha) == pytest.approx(fd, rel=1e-7)

    def test_unknown_family(self):
        """Family tags are validated."""
        with pytest.raises(ValueError):
            gti_value("Xi", 1.0, 1.0)


class TestIncompleteGamma:
    """Series and quadrature for gamma and Gamma."""

    def test_series_a1(self):
        """gamma(1, z) = 1 - exp(-z)."""
        z = complex(2, 1)
        assert series_gamma(1.0, z) == pytest.approx(1 - cmath.exp(-z), rel=1e-14)

    def test_series_gate(self):
        """Standard mode refuses |z| far beyond a; extended mode widens precision."""
        with pytest.raises(CancellationOverflow):
            series_gamma(1.0, 50.0)
        assert series_gamma(1.0, 50.0, EXTENDED).real == pytest.approx(1.0, rel=1e-14)

    @pytest.mark.parametrize("theta", [0.4, 2.0, 7.5])
    def test_gamma_on_ray_a1(self, theta):
        """gamma(1, -i theta) = 1 - exp(i theta); the + ray is its conjugate."""
        expected = 1 - complex(math.cos(theta), math.sin(theta))
        assert oracle_gamma_on_ray(1.0, theta) == pytest.approx(expected, abs=1e-13)
        assert oracle_gamma_on_ray(1.0, theta, sign=1) == pytest.approx(expected.conjugate(), abs=1e-13)

    @pytest.mark.parametrize("a,x", [(1.0, 2.0), (3.0, 2.0), (25.0, 50.0), (30.0, 0.5 * 30), (2.5, 0.3)])
    def test_upper_gamma(self, a, x):
        """Gamma(a, x) against scipy's regularized complement."""
        assert quad_Gamma_real(a, x) == pytest.approx(gammaincc(a, x) * gamma(a), rel=1e-11)


class TestZerosAndDelta:
    """Refinement and the Delta metric."""

    def test_refine_sin_zero(self):
        """Ci(1, x) = sin x vanishes at x = pi."""
        z = refine_zero(1.0, "Ci", 0.0, 3.1)
        assert z.theta_star == pytest.approx(math.pi, rel=1e-13)
        assert z.newton_iters >= 1

    def test_delta_at_a1(self):
        """Delta(1, x) = tan(x) / x."""
        assert delta_metric(1.0, 1.0) == pytest.approx(math.tan(1.0), rel=1e-12)

    def test_delta_si(self):
        """Si analogue divides by x sin x: (1 - cos x)/(x sin x) at a = 1."""
        expected = (1 - math.cos(1.0)) / math.sin(1.0)
        assert delta_metric(1.0, 1.0, family="Si") == pytest.approx(expected, rel=1e-12)

    def test_delta_derivative_near_zero(self):
        """cos x = 0 makes Delta undefined."""
        with pytest.raises(DerivativeNearZero):
            delta_metric(1.0, math.pi / 2)
