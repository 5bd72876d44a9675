"""
Unit Tests for the LG evaluators

Run with: pytest tests/ -v
"""

import math
import os
import sys
from unittest.mock import patch

import pytest
from scipy.special import sici

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from backend.errors import BranchCut, CancellationWarning, DivergenceGate, NotCertified, TurningPoint
from backend.gti_eval import (
    LGEvalConfig,
    assemble_ci_si_largez,
    assemble_ti_largez,
    eps_I,
    eval_FG_largez,
    eval_GTI,
    eval_Gamma_LG,
    eval_gamma_LG,
    phase_amplitude,
)
from backend.lg_coefficients import gen_L
from backend.oracle import QuadratureConfig, gti_value, oracle_gamma_on_ray, quad_Gamma_real, series_gamma


def _gamma_oracle(a, z):
    z = complex(z)
    if z.real == 0:
        return oracle_gamma_on_ray(a, z.imag, sign=1)
    return series_gamma(a, a * z, QuadratureConfig(precision_mode="extended"))


class TestConfig:
    """LGEvalConfig validation."""

    def test_order_range(self):
        """order must lie within the coefficient table."""
        with pytest.raises(ValueError):
            LGEvalConfig(order=0)
        with pytest.raises(ValueError):
            LGEvalConfig(order=99)
        with pytest.raises(ValueError):
            LGEvalConfig(precision_mode="quad")


class TestIncompleteGammaLG:
    """LG forms of gamma(a, az) and Gamma(a, az) against the oracle."""

    @pytest.mark.parametrize("a", [25.0, 30.0])
    @pytest.mark.parametrize("n", [2, 3, 5])
    @pytest.mark.parametrize("z", [0.3, 0.5j, 2j])
    def test_lower_bound_dominance(self, a, n, z):
        """|eta| never exceeds the computed bound."""
        res = eval_gamma_LG(a, z, LGEvalConfig(order=n, bound_requested=True))
        err = abs(_gamma_oracle(a, z) / res.scaled_value - 1)
        assert err <= res.eta_bound + 1e-12
        if n == 5 and z == 2j:
            assert err <= 1e-6

    @pytest.mark.parametrize("a", [25.0, 30.0])
    def test_lower_accuracy_near_turning_point(self, a):
        """At z = i/2 the order-5 error sits near 1e-6 for a = 25; order 7 is below it."""
        z = 0.5j
        res = eval_gamma_LG(a, z, LGEvalConfig(order=7, bound_requested=True))
        err = abs(_gamma_oracle(a, z) / res.scaled_value - 1)
        assert err <= res.eta_bound + 1e-12
        assert err <= 1e-6

    @pytest.mark.parametrize("a", [25.0, 30.0])
    @pytest.mark.parametrize("n", [2, 3, 5])
    @pytest.mark.parametrize("z", [2.0, 3.0, 5.0])
    def test_upper_bound_dominance(self, a, n, z):
        """Gamma(a, az) error is within the bound from +infinity."""
        res = eval_Gamma_LG(a, z, LGEvalConfig(order=n, bound_requested=True))
        err = abs(quad_Gamma_real(a, a * z) / res.scaled_value.real - 1)
        assert err <= res.eta_bound + 1e-12
        if n == 5 and z == 5.0:
            assert err <= 1e-6

    def test_gamma_at_origin(self):
        """gamma(a, 0) = 0 with a zero bound."""
        res = eval_gamma_LG(25.0, 0, LGEvalConfig(bound_requested=True))
        assert res.value == 0
        assert res.eta_bound == 0.0

    def test_domain_errors(self):
        """Cut, turning point and uncertified points are refused."""
        with pytest.raises(BranchCut):
            eval_gamma_LG(25.0, -2.0)
        with pytest.raises(TurningPoint):
            eval_gamma_LG(25.0, 1.05)
        with pytest.raises(NotCertified):
            eval_gamma_LG(25.0, 1.5)
        with pytest.raises(NotCertified):
            eval_Gamma_LG(25.0, 0.5)

    def test_extended_mode_agrees(self):
        """Extended precision reproduces the standard result."""
        std = eval_gamma_LG(25.0, 0.5j, LGEvalConfig(order=5))
        ext = eval_gamma_LG(25.0, 0.5j, LGEvalConfig(order=5, precision_mode="extended"))
        assert ext.mode == "extended"
        assert ext.scaled_value == pytest.approx(std.scaled_value, rel=1e-12)

    def test_to_dict(self):
        """Complex values serialize as re/im."""
        d = eval_gamma_LG(25.0, 0.5j).to_dict()
        assert set(d["value"]) == {"re", "im"}
        assert d["eta_bound"] is None


class TestGTI:
    """Ci, Si, Ti and the lowercase families on the real axis."""

    def test_eps_I_first_term(self):
        """With one term eps_I is L_1(theta)/a."""
        assert eps_I(10.0, 1.3, 1) == pytest.approx(float(gen_L(1)(1.3)) / 10.0)

    @pytest.mark.parametrize("family,alpha", [("Ci", 0.0), ("Si", 0.0), ("Ti", 0.3)])
    @pytest.mark.parametrize("theta", [0.5, 1.25, 3.0])
    def test_capital_against_oracle(self, family, alpha, theta):
        """Amplitude-relative error below 1e-6 at a = 20, order 5."""
        a = 20.0
        res = eval_GTI(a, theta, family, alpha, LGEvalConfig(order=5))
        ref = gti_value(family, a, a * theta, alpha)
        amp = math.exp(phase_amplitude(a, theta).amplitude_log)
        assert abs(res.scaled_value - ref) <= 1e-6 * amp

    def test_lowercase_continuation(self):
        """ci for a > 1 is Gamma(a) cos(pi a/2) - Ci and is flagged as a continuation."""
        a, theta = 20.5, 1.25
        res = eval_GTI(a, theta, "ci", cfg=LGEvalConfig(order=5))
        ref = gti_value("ci", a, a * theta)
        assert "continuation" in res.flags
        assert res.scaled_value == pytest.approx(ref, rel=1e-5)

    def test_cancellation_warning(self):
        """A ratio above the cancellation limit is flagged and warned about."""
        with patch("backend.gti_eval.CANCELLATION_LIMIT", 0.1):
            with pytest.warns(CancellationWarning):
                res = eval_GTI(20.5, 1.25, "si")
        assert "cancellation" in res.flags

    def test_phase_amplitude_extended(self):
        """Both modes give the same phase and amplitude."""
        std = phase_amplitude(10.0, 1.25)
        ext = phase_amplitude(10.0, 1.25, cfg=LGEvalConfig(precision_mode="extended"))
        assert float(ext.phase) == pytest.approx(std.phase, rel=1e-13)
        assert float(ext.amplitude_log) == pytest.approx(std.amplitude_log, rel=1e-13)

    def test_bound_attached(self):
        """bound_requested attaches the bound along the imaginary axis."""
        res = eval_GTI(20.0, 1.0, "Ci", cfg=LGEvalConfig(order=3, bound_requested=True))
        assert res.eta_bound is not None and res.eta_bound > 0


class TestLargeArgument:
    """Classical F, G expansions."""

    def test_classical_special_case(self):
        """ci(0, z) = -Ci(z) and si(0, z) = pi/2 - Si(z) at z = 50."""
        si_c, ci_c = sici(50.0)
        ci0, si0 = assemble_ci_si_largez(0.0, 50.0)
        assert ci0 == pytest.approx(-ci_c, rel=1e-10)
        assert si0 == pytest.approx(math.pi / 2 - si_c, rel=1e-10)

    @pytest.mark.parametrize("a", [0.3, 0.7])
    def test_against_oracle(self, a):
        """Large-z ci, si, ti match the quadrature oracle."""
        z = 40.0
        ci, si = assemble_ci_si_largez(a, z)
        assert ci == pytest.approx(gti_value("ci", a, z), rel=1e-10)
        assert si == pytest.approx(gti_value("si", a, z), rel=1e-10)
        ti = assemble_ti_largez(a, z, 0.25)
        assert ti == pytest.approx(gti_value("ti", a, z, 0.25), rel=1e-10)

    def test_gate(self):
        """Arguments below 2|1-a| + 10 are refused."""
        with pytest.raises(DivergenceGate):
            eval_FG_largez(5.0, 10.0)

    def test_tolerance_not_reachable(self):
        """A tolerance below the smallest term raises."""
        with pytest.raises(DivergenceGate):
            eval_FG_largez(0.0, 12.5, tol=1e-30)

    def test_fixed_term_count(self):
        """N = 1 keeps only the leading term of F."""
        F, G = eval_FG_largez(0.5, 20.0, N=1)
        assert F == pytest.approx(20.0 ** -0.5)
        assert G == 0.0
