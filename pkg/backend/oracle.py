"""
Reference Oracle Module

Independent high-accuracy values for the generalised trigonometric integrals

    Ci(a, x) = int_0^x t^(a-1) cos t dt,   Si(a, x) = int_0^x t^(a-1) sin t dt,
    Ti(a, x, alpha) = Ci cos(pi alpha) + Si sin(pi alpha),

their complements ci, si, ti, the incomplete gamma functions on the rays the
asymptotics need, refined zeros and the Delta accuracy metric.

Standard mode: a power-series panel on [0, min(x, 1)] followed by
Gauss-Legendre panels split at multiples of pi, adaptively halved, summed
with math.fsum. Extended mode: mpmath at GTI_ASYM_EXTENDED_DPS digits through
Ci + i Si = e^(i pi a/2) gamma(a, -ix).

Configuration (via .env):
- GTI_ASYM_PANEL_ORDER: Gauss nodes per panel (default: 24)
- GTI_ASYM_REL_TOL: relative tolerance (default: 1e-14)
- GTI_ASYM_EXTENDED_DPS: decimal digits in extended mode (default: 32)
"""

import math
import os
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Tuple

import mpmath
import numpy as np
from dotenv import load_dotenv
from scipy.special import gamma as gamma_fn

from backend.errors import (
    CancellationOverflow,
    DerivativeNearZero,
    MaxIterations,
    NoSignChange,
    ToleranceNotMet,
)

load_dotenv()

# =============================================================================
# CONFIGURATION
# =============================================================================

PANEL_ORDER = int(os.getenv("GTI_ASYM_PANEL_ORDER", "24"))
REL_TOL = float(os.getenv("GTI_ASYM_REL_TOL", "1e-14"))
EXTENDED_DPS = int(os.getenv("GTI_ASYM_EXTENDED_DPS", "32"))

MAX_PANEL_DEPTH = 30
NEWTON_MAX_ITERS = 60
DELTA_EXTENDED_THRESHOLD = 1e-12
TRIG_FLOOR = 1e-12
SERIES_GATE_PAD = 20.0
MAX_SERIES_DPS = 600

FAMILIES = ("Ci", "Si", "Ti", "ci", "si", "ti")


@dataclass(frozen=True)
class QuadratureConfig:
    panel_rule_order: int = PANEL_ORDER
    precision_mode: str = "standard"
    rel_tol: float = REL_TOL

    def __post_init__(self):
        if self.panel_rule_order < 8:
            raise ValueError("panel_rule_order must be >= 8")
        if not self.rel_tol >= 1e-30:
            raise ValueError("rel_tol must be >= 1e-30")
        if self.precision_mode not in ("standard", "extended"):
            raise ValueError(f"unknown precision_mode: {self.precision_mode}")

    @property
    def extended(self) -> bool:
        return self.precision_mode == "extended"


DEFAULT_CONFIG = QuadratureConfig()


@lru_cache(maxsize=16)
def _gauss_nodes(order: int):
    return np.polynomial.legendre.leggauss(order)


# =============================================================================
# Ci / Si
# =============================================================================

def _series_CiSi(a: float, T: float) -> Tuple[float, float]:
    """Termwise integrated Taylor series of t^(a-1) e^(it) on [0, T], T <= 1."""
    if T == 0:
        return 0.0, 0.0
    ci_terms, si_terms = [], []
    log_T = math.log(T)
    for k in range(60):
        even, odd = 2 * k, 2 * k + 1
        sign = -1.0 if k % 2 else 1.0
        c = sign * math.exp((a + even) * log_T - math.lgamma(even + 1)) / (a + even)
        s = sign * math.exp((a + odd) * log_T - math.lgamma(odd + 1)) / (a + odd)
        ci_terms.append(c)
        si_terms.append(s)
        if abs(c) < 1e-18 * abs(ci_terms[0]) and abs(s) < 1e-18 * abs(si_terms[0]):
            break
    return math.fsum(ci_terms), math.fsum(si_terms)


def _gauss_panel(a: float, lo: float, hi: float, order: int) -> Tuple[float, float]:
    nodes, weights = _gauss_nodes(order)
    half = 0.5 * (hi - lo)
    t = lo + half * (nodes + 1.0)
    base = weights * np.exp((a - 1) * np.log(t)) * half
    return float(np.dot(base, np.cos(t))), float(np.dot(base, np.sin(t)))


def _adaptive_panel(a, lo, hi, order, rel_tol, depth, out_c, out_s):
    whole = _gauss_panel(a, lo, hi, order)
    mid = 0.5 * (lo + hi)
    left = _gauss_panel(a, lo, mid, order)
    right = _gauss_panel(a, mid, hi, order)
    c, s = left[0] + right[0], left[1] + right[1]
    scale = max(abs(c), abs(s), 1e-300)
    if max(abs(c - whole[0]), abs(s - whole[1])) <= rel_tol * scale:
        out_c.extend((left[0], right[0]))
        out_s.extend((left[1], right[1]))
        return
    if depth >= MAX_PANEL_DEPTH:
        raise ToleranceNotMet(f"panel [{lo}, {hi}] did not converge for a={a}")
    _adaptive_panel(a, lo, mid, order, rel_tol, depth + 1, out_c, out_s)
    _adaptive_panel(a, mid, hi, order, rel_tol, depth + 1, out_c, out_s)


def _extended_CiSi(a: float, x: float, dps: int) -> Tuple[float, float]:
    with mpmath.workdps(dps):
        a_mp = mpmath.mpf(a)
        X = mpmath.exp(1j * mpmath.pi * a_mp / 2) * mpmath.gammainc(a_mp, 0, -1j * mpmath.mpf(x))
        return float(mpmath.re(X)), float(mpmath.im(X))


def quad_CiSi(a: float, x: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> Tuple[float, float]:
    """(Ci(a, x), Si(a, x)) for a > 0, x >= 0."""
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0:
        return 0.0, 0.0
    if cfg.extended:
        return _extended_CiSi(a, x, EXTENDED_DPS)

    T0 = min(x, 1.0)
    c0, s0 = _series_CiSi(a, T0)
    parts_c, parts_s = [c0], [s0]
    if x > T0:
        breaks = [T0] + [k * math.pi for k in range(1, int(x // math.pi) + 1) if k * math.pi > T0]
        if breaks[-1] < x:
            breaks.append(x)
        for lo, hi in zip(breaks, breaks[1:]):
            _adaptive_panel(a, lo, hi, cfg.panel_rule_order, cfg.rel_tol, 0, parts_c, parts_s)
    return math.fsum(parts_c), math.fsum(parts_s)


def gti_value(family: str, a: float, x: float, alpha: float = 0.0,
              cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Any of Ci, Si, Ti, ci, si, ti at argument x; lowercase via Gamma(a) trig - upper."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family: {family}")
    Ci, Si = quad_CiSi(a, x, cfg)
    if family in ("Ci", "ci"):
        upper, total = Ci, math.cos(0.5 * math.pi * a)
    elif family in ("Si", "si"):
        upper, total = Si, math.sin(0.5 * math.pi * a)
    else:
        upper = Ci * math.cos(math.pi * alpha) + Si * math.sin(math.pi * alpha)
        total = math.cos(math.pi * (0.5 * a - alpha))
    if family[0].isupper():
        return upper
    return float(gamma_fn(a)) * total - upper


def gti_derivative(family: str, a: float, x: float, alpha: float = 0.0) -> float:
    """d/dx of gti_value: x^(a-1) times the integrand's trigonometric factor."""
    base = x ** (a - 1)
    if family in ("Ci", "ci"):
        trig = math.cos(x)
    elif family in ("Si", "si"):
        trig = math.sin(x)
    else:
        trig = math.cos(x - math.pi * alpha)
    return base * trig if family[0].isupper() else -base * trig


# =============================================================================
# INCOMPLETE GAMMA
# =============================================================================

def series_gamma(a: float, z: complex, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """
    gamma(a, z) = sum_k (-1)^k z^(a+k) / (k! (a+k)).

    Standard mode is gated at |z| <= a + 20 and audits cancellation; extended
    mode raises the working precision with |z|.
    """
    z = complex(z)
    if z == 0:
        return 0j
    r = abs(z)
    if not cfg.extended:
        if r > a + SERIES_GATE_PAD:
            raise CancellationOverflow(f"|z|={r:.4g} exceeds the series gate a+{SERIES_GATE_PAD:g}")
        za = z ** a
        term, total, max_term = 1.0 + 0j, 0j, 0.0
        k = 0
        while True:
            contrib = term / (a + k)
            total += contrib
            max_term = max(max_term, abs(contrib))
            if k > r and abs(contrib) <= cfg.rel_tol * abs(total) * 1e-2:
                break
            k += 1
            if k > 2000:
                raise CancellationOverflow("series did not terminate")
            term *= -z / k
        if max_term * 2.2e-16 > 1e-8 * abs(total):
            raise CancellationOverflow(
                f"series for gamma({a}, {z}) loses {math.log10(max_term / abs(total)):.1f} digits"
            )
        return complex(za * total)

    guard = int(r / math.log(10)) + 10
    dps = EXTENDED_DPS + guard
    if dps > MAX_SERIES_DPS:
        raise CancellationOverflow(f"series for |z|={r:.4g} needs {dps} digits")
    with mpmath.workdps(dps):
        zm = mpmath.mpc(z)
        am = mpmath.mpf(a)
        eps = mpmath.mpf(10) ** (-EXTENDED_DPS)
        term, total = mpmath.mpc(1), mpmath.mpc(0)
        k = 0
        while True:
            contrib = term / (am + k)
            total += contrib
            if k > r and abs(contrib) <= eps * abs(total):
                break
            k += 1
            term *= -zm / k
        return complex(zm ** am * total)


def oracle_gamma_on_ray(a: float, theta: float, sign: int = -1,
                        cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """gamma(a, sign * i a theta) from Ci and Si at a*theta; the two signs are conjugates."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    if sign not in (-1, 1):
        raise ValueError("sign must be +1 or -1")
    Ci, Si = quad_CiSi(a, a * theta, cfg)
    value = complex(math.cos(0.5 * math.pi * a), -math.sin(0.5 * math.pi * a)) * complex(Ci, Si)
    return value if sign == -1 else value.conjugate()


def _Gamma_panels(a, lo, hi, order):
    nodes, weights = _gauss_nodes(order)
    half = 0.5 * (hi - lo)
    t = lo + half * (nodes + 1.0)
    return float(np.dot(weights, np.exp(-t + (a - 1) * np.log(t))) * half)


def quad_Gamma_real(a: float, x: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Gamma(a, x) for real x >= 0 by unit-width panels to a cutoff plus a tail estimate."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    if cfg.extended:
        with mpmath.workdps(EXTENDED_DPS):
            return float(mpmath.gammainc(mpmath.mpf(a), mpmath.mpf(x)))

    head = 0.0
    start = x
    if x < 1.0:
        # [x, 1] by the real series; avoids the t^(a-1) endpoint
        head = (series_gamma(a, 1.0, cfg) - series_gamma(a, x, cfg)).real if x > 0 \
            else series_gamma(a, 1.0, cfg).real
        start = 1.0

    parts = [head]
    lo = start
    width = max(1.0, math.sqrt(max(a, 1.0)))
    for _ in range(100000):
        hi = lo + width
        panel = _Gamma_panels(a, lo, hi, cfg.panel_rule_order)
        check = _Gamma_panels(a, lo, hi, 2 * cfg.panel_rule_order)
        if abs(panel - check) > cfg.rel_tol * max(abs(check), 1e-300) * 10:
            raise ToleranceNotMet(f"Gamma panel [{lo}, {hi}] unresolved for a={a}")
        parts.append(check)
        lo = hi
        if lo > a:
            # t^(a-1) e^-t decays at least geometrically beyond t = a
            tail = math.exp(-lo + (a - 1) * math.log(lo)) / max(1.0 - (a - 1) / lo, 1e-3)
            if tail <= cfg.rel_tol * math.fsum(parts):
                parts.append(tail)
                return math.fsum(parts)
    raise ToleranceNotMet(f"Gamma({a}, {x}) tail did not fall below tolerance")


# =============================================================================
# ZEROS AND THE DELTA METRIC
# =============================================================================

@dataclass
class RefinedZero:
    family: str
    m: int
    theta_star: float
    residual: float
    newton_iters: int


def _amplitude(a: float, theta: float) -> float:
    x = a * theta
    return x ** a / (a * math.sqrt(1 + theta * theta))


def refine_zero(a: float, family: str, alpha: float, theta0: float,
                cfg: QuadratureConfig = DEFAULT_CONFIG, m: int = 0) -> RefinedZero:
    """
    Zero of theta -> family(a, a*theta) near theta0.

    Bracket theta0 +- pi/(2a), widened once by 2, then safeguarded Newton
    with the exact derivative a * d/dx family(a, x).
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family: {family}")

    def f(th):
        return gti_value(family, a, a * th, alpha, cfg)

    def df(th):
        return a * gti_derivative(family, a, a * th, alpha)

    h = math.pi / (2 * a)
    for width in (h, 2 * h):
        lo, hi = max(theta0 - width, theta0 / 4), theta0 + width
        f_lo, f_hi = f(lo), f(hi)
        if f_lo == 0:
            return RefinedZero(family, m, lo, 0.0, 0)
        if f_hi == 0:
            return RefinedZero(family, m, hi, 0.0, 0)
        if (f_lo < 0) != (f_hi < 0):
            break
    else:
        raise NoSignChange(f"{family}(a={a}) has no sign change near theta={theta0}")

    th = theta0 if lo < theta0 < hi else 0.5 * (lo + hi)
    for it in range(1, NEWTON_MAX_ITERS + 1):
        val = f(th)
        amp = _amplitude(a, th)
        if abs(val) <= cfg.rel_tol * amp:
            return RefinedZero(family, m, th, abs(val) / amp, it)
        if (val < 0) == (f_lo < 0):
            lo, f_lo = th, val
        else:
            hi = th
        d = df(th)
        step_ok = d != 0
        if step_ok:
            nxt = th - val / d
            step_ok = lo < nxt < hi
        if not step_ok:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - th) <= 4 * np.finfo(float).eps * th:
            return RefinedZero(family, m, nxt, abs(f(nxt)) / _amplitude(a, nxt), it)
        th = nxt
    raise MaxIterations(f"refine_zero did not converge for {family}, a={a}, theta0={theta0}")


def delta_metric(a: float, theta: float, cfg: QuadratureConfig = DEFAULT_CONFIG,
                 family: str = "Ci") -> float:
    """
    Delta(a, x) = Ci(a, x) / (x dCi/dx) = Ci(a, x) / (x^a cos x).

    The Si analogue divides by x^a sin x. Switches to extended precision
    when |Delta| falls below 1e-12.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    if family not in ("Ci", "Si"):
        raise ValueError("delta_metric is defined for Ci and Si")
    trig = math.cos(theta) if family == "Ci" else math.sin(theta)
    if abs(trig) < TRIG_FLOOR:
        raise DerivativeNearZero(f"d{family}/dtheta vanishes at theta={theta}")
    denom = theta ** a * trig
    value = gti_value(family, a, theta, 0.0, cfg) / denom
    if abs(value) < DELTA_EXTENDED_THRESHOLD and not cfg.extended:
        ext = replace(cfg, precision_mode="extended")
        value = gti_value(family, a, theta, 0.0, ext) / denom
    return value
