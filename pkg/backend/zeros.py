"""
Zeros Module

Uniform asymptotic expansions, for large a, of the positive zeros theta of
the six families at argument a*theta:

- Ci, Si, Ti: leading term from a x - arctan x = RHS, higher terms
  c_{m,k} = q_k(c_{m,0}) with q_k built symbolically (Faa di Bruno on the
  phase equation).
- ci, si: leading term from cos(a x - arctan x) = chi(a, x) (resp. sin and
  sigma), higher terms from the closed forms tilde_q / hat_q up to k = 5.
- ti: leading term only, from the alpha-shifted phase.

When S x - C (resp. C^ x + S^) is small the closed forms are unusable; the
leading term is then corrected by solving the full zero equation for a small
offset epsilon.

Configuration (via .env):
- GTI_ASYM_DEGENERACY_TAU: threshold for |S x - C| (default: 0.1)
"""

import math
import os
import sys
import threading
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
from dotenv import load_dotenv
from scipy.optimize import brentq
from scipy.special import gammaln

from backend.errors import (
    BracketFailure,
    DegenerateDenominator,
    MaxIterations,
    MultipleDegenerates,
    NonpositiveRHS,
    TrigZero,
)
from backend.exact_algebra import RationalFunction, bell_table
from backend.gti_eval import eps_I, eps_R
from backend.lg_coefficients import DEFAULT_MAX_ORDER, get_table

load_dotenv()

# =============================================================================
# CONFIGURATION
# =============================================================================

DEGENERACY_TAU = float(os.getenv("GTI_ASYM_DEGENERACY_TAU", "0.1"))

TRIG_ZERO = 1e-14
DETECTOR_DELTA = 0.1
MAX_TILDE_ORDER = 5
WINDOW_SAMPLES = 33
LOG_OVERFLOW = 700.0

_ALIASES = {"ci_lower": "ci", "si_lower": "si", "ti_lower": "ti"}
TAGS = ("Ci", "Si", "Ti", "ci", "si", "ti")


@dataclass(frozen=True)
class ZeroFamily:
    tag: str
    alpha: float = 0.0

    def __post_init__(self):
        tag = _ALIASES.get(self.tag, self.tag)
        if tag not in TAGS:
            raise ValueError(f"unknown zero family: {self.tag}")
        object.__setattr__(self, "tag", tag)
        if tag in ("Ti", "ti"):
            if not 0 <= self.alpha < 1:
                raise ValueError("alpha must lie in [0, 1)")
        elif self.alpha != 0:
            raise ValueError(f"alpha is only meaningful for Ti/ti, got {self.alpha} for {tag}")


@dataclass
class ZeroExpansion:
    family: ZeroFamily
    a: float
    m: int
    leading: float
    coeffs: Dict[int, float]
    K: int
    theta_assembled: float
    CS: Optional[Tuple[float, float]] = None
    degenerate_flag: bool = False

    def to_dict(self):
        return {
            "family": self.family.tag,
            "alpha": self.family.alpha,
            "a": self.a,
            "m": self.m,
            "leading": self.leading,
            "coeffs": {str(k): v for k, v in self.coeffs.items()},
            "K": self.K,
            "theta_assembled": self.theta_assembled,
            "CS": list(self.CS) if self.CS else None,
            "degenerate_flag": self.degenerate_flag,
        }


# =============================================================================
# CAPITAL FAMILIES
# =============================================================================

def phase(a: float, x: float, alpha: float = 0.0) -> float:
    return a * x - math.atan(x) - alpha * math.pi


def _solve_phase_equation(a: float, rhs: float) -> float:
    """Positive root of a c - arctan c = rhs, rhs > 0."""
    if a <= 0:
        raise ValueError("a must be positive")
    hi = rhs / (a - 1) if a > 1 else (rhs + 0.5 * math.pi) / a
    g = lambda c: a * c - math.atan(c) - rhs
    if g(hi) < 0:
        raise BracketFailure(f"no bracket for a={a}, rhs={rhs}")
    root = brentq(g, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
    # Newton polish
    for _ in range(2):
        d = a - 1 / (1 + root * root)
        if d <= 0:
            break
        root -= g(root) / d
    return root


def solve_leading_Ci(a: float, m: int) -> float:
    if m < 1:
        raise ValueError("m must be >= 1")
    return _solve_phase_equation(a, (m - 0.5) * math.pi)


def solve_leading_Si(a: float, m: int) -> float:
    if m < 1:
        raise ValueError("m must be >= 1")
    return _solve_phase_equation(a, m * math.pi)


def ti_offset(alpha: float) -> int:
    return 0 if alpha <= 0.5 else 1


def solve_leading_Ti(a: float, m: int, alpha: float) -> float:
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    rhs = (m - ti_offset(alpha) + alpha - 0.5) * math.pi
    if rhs <= 0:
        raise NonpositiveRHS(f"Ti zero index m={m} has no positive leading term for alpha={alpha}")
    return _solve_phase_equation(a, rhs)


@dataclass(frozen=True)
class QTable:
    """q[k] for k = 2..K as exact rational functions of x."""
    q: Dict[int, RationalFunction]
    K: int

    def __call__(self, k: int, x):
        return self.q[k](x)


def _taylor_coeff(derivs, n: int, bell):
    """[eps^n] f(c0 + delta) from f^(j)(c0) and B_{n,j}(x_1, x_2, ...)."""
    if n == 0:
        return derivs[0]
    total = RationalFunction(0)
    for j in range(1, n + 1):
        b = bell.get((n, j), 0)
        if isinstance(b, int) and b == 0:
            continue
        total = total + derivs[j] * b
    return total / math.factorial(n)


@lru_cache(maxsize=8)
def gen_q(K: int) -> QTable:
    """
    q_k(x) from the phase equation a c - arctan c + sum_s L_s(c)/a^s = const:

        c_k = [eps^(k-1)] arctan(c0 + delta) - sum_{s=1}^{k-1} [eps^(k-1-s)] L_s(c0 + delta),

    delta = sum_{k>=2} c_k eps^k, expanded by Faa di Bruno.
    """
    if K < 2:
        return QTable({}, K)
    table = get_table(max(K - 1, DEFAULT_MAX_ORDER))
    x = RationalFunction.x()

    # arctan derivatives: index 0 unused, j >= 1 is d^(j-1)/dx^(j-1) 1/(1+x^2)
    atan_d = [None, 1 / (1 + x * x)]
    while len(atan_d) <= K:
        atan_d.append(atan_d[-1].derivative())

    L_d = {}
    for s in range(1, K):
        ds = [table.L[s]]
        while len(ds) <= K - s:
            ds.append(ds[-1].derivative())
        L_d[s] = ds

    c: Dict[int, RationalFunction] = {}
    for k in range(2, K + 1):
        # Bell arguments x_i = i! c_i, with c_1 = 0
        args = [RationalFunction(0)] + [
            math.factorial(i) * c[i] for i in range(2, k)
        ]
        bell = bell_table(k - 1, args)
        value = _taylor_coeff(atan_d, k - 1, bell)
        for s in range(1, k):
            value = value - _taylor_coeff(L_d[s], k - 1 - s, bell)
        c[k] = value
    print(f"[QTable] Built q_2..q_{K}", file=sys.stderr)
    return QTable(c, K)


def expand_zero(family, a: float, m: int, K: int, alpha: float = 0.0) -> ZeroExpansion:
    """Assembled zero theta = leading + sum_{k=2}^{K} q_k(leading)/a^k of Ci, Si or Ti."""
    fam = family if isinstance(family, ZeroFamily) else ZeroFamily(family, alpha)
    if fam.tag == "Ci":
        leading = solve_leading_Ci(a, m)
    elif fam.tag == "Si":
        leading = solve_leading_Si(a, m)
    elif fam.tag == "Ti":
        leading = solve_leading_Ti(a, m, fam.alpha)
    else:
        raise ValueError(f"expand_zero handles Ci, Si, Ti; use expand_zero_lower for {fam.tag}")
    if K < 1:
        raise ValueError("K must be >= 1")
    qt = gen_q(K)
    coeffs = {k: float(qt(k, leading)) for k in range(2, K + 1)}
    theta = leading + math.fsum(v / a ** k for k, v in coeffs.items())
    return ZeroExpansion(fam, a, m, leading, coeffs, K, theta)


# =============================================================================
# LOWERCASE FAMILIES: chi, sigma
# =============================================================================

@dataclass(frozen=True)
class SignedLog:
    """sign * exp(log_abs)."""
    sign: int
    log_abs: float

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(min(self.log_abs, LOG_OVERFLOW))


def chi_alpha(a: float, theta: float, alpha: float = 0.0) -> SignedLog:
    """Gamma(a+1) cos(pi(a - 2 alpha)/2) sqrt(1+theta^2) / (a theta)^a."""
    if a <= 0 or theta <= 0:
        raise ValueError("a and theta must be positive")
    trig = math.cos(0.5 * math.pi * (a - 2 * alpha))
    if abs(trig) < TRIG_ZERO:
        raise TrigZero(f"cos(pi(a - 2 alpha)/2) vanishes for a={a}, alpha={alpha}")
    log_abs = gammaln(a + 1) + math.log(abs(trig)) + 0.5 * math.log1p(theta * theta) \
        - a * math.log(a * theta)
    return SignedLog(1 if trig > 0 else -1, float(log_abs))


def chi(a: float, theta: float) -> SignedLog:
    return chi_alpha(a, theta, 0.0)


def sigma(a: float, theta: float) -> SignedLog:
    """Gamma(a+1) sin(pi a/2) sqrt(1+theta^2) / (a theta)^a."""
    try:
        return chi_alpha(a, theta, 0.5)
    except TrigZero:
        raise TrigZero(f"sin(pi a/2) vanishes for a={a}") from None


def _x0(a: float, alpha: float) -> float:
    """Root of |chi_alpha(a, x)| = 1; |chi| decreases monotonically for a > 1."""
    f = lambda x: chi_alpha(a, x, alpha).log_abs
    lo = 1e-12
    if f(lo) <= 0:
        return lo
    hi = 1.0
    while f(hi) > 0:
        hi *= 2
        if hi > 1e12:
            raise BracketFailure(f"|chi| does not drop below 1 for a={a}")
    return brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def _phase_inverse(a: float, value: float, alpha: float) -> float:
    """x >= 0 with a x - arctan x - alpha pi = value (0 if value is below the phase at 0)."""
    target = value + alpha * math.pi
    if target <= 0:
        return 0.0
    return _solve_phase_equation(a, target)


@dataclass(frozen=True)
class LowerLeading:
    root: float
    C: float
    S: float
    window: int


def _parity(j: int) -> int:
    return 1 if (j - 1) % 2 == 0 else -1


class _WindowScan:
    """
    Incremental window scan for one (family, a, alpha).

    The phase psi = a x - arctan x - alpha pi is split into windows of width
    pi on which the relevant trigonometric function is monotone; each window
    contributes the roots of its principal-branch equation on [x0, inf).
    Roots found so far are kept, so asking for more only scans new windows.
    """

    def __init__(self, family: str, a: float, alpha: float):
        self.family = family
        self.a = a
        if family == "si":
            self.alpha_eff, self.offset, self.shift = 0.5, -0.5 * math.pi, 0.0
            self.phase_alpha = 0.0
        else:
            self.alpha_eff = alpha if family == "ti" else 0.0
            self.offset, self.shift = 0.0, self.alpha_eff * math.pi
            self.phase_alpha = self.alpha_eff
        self.x0 = _x0(a, self.alpha_eff)
        psi0 = a * self.x0 - math.atan(self.x0) - self.shift
        self.j = math.floor((psi0 - self.offset) / math.pi) + 1
        self.roots: List[LowerLeading] = []
        self.lock = threading.Lock()

    def _rhs(self, x: float) -> float:
        if self.family == "si":
            v = sigma(self.a, x).value
        else:
            v = chi_alpha(self.a, x, self.alpha_eff).value
        return min(1.0, max(-1.0, v))

    def _g(self, j: int, x: float) -> float:
        psi = self.a * x - math.atan(x) - self.shift
        if self.family == "si":
            return psi - (j - 1) * math.pi - _parity(j) * math.asin(self._rhs(x))
        return psi - (_parity(j) * math.acos(self._rhs(x)) + 2 * (j // 2) * math.pi)

    def _scan_window(self):
        j = self.j
        lo = max(self.x0, _phase_inverse(self.a, (j - 1) * math.pi + self.offset, self.phase_alpha))
        hi = _phase_inverse(self.a, j * math.pi + self.offset, self.phase_alpha)
        if hi > lo:
            xs = np.linspace(lo, hi, WINDOW_SAMPLES)
            gs = [self._g(j, x) for x in xs]
            found = []
            for k in range(len(xs) - 1):
                if gs[k] == 0:
                    found.append(xs[k])
                elif gs[k] * gs[k + 1] < 0:
                    found.append(brentq(lambda x: self._g(j, x), xs[k], xs[k + 1],
                                        xtol=1e-300, rtol=4 * np.finfo(float).eps))
            if gs[-1] == 0:
                found.append(xs[-1])
            for r in found:
                if self.roots and abs(r - self.roots[-1].root) <= 1e-12 * r:
                    continue
                rv = self._rhs(r)
                partner = _parity(j) * math.sqrt(max(0.0, 1.0 - rv * rv))
                self.roots.append(LowerLeading(r, rv, partner, j))
        self.j = j + 1

    def first(self, count: int) -> List[LowerLeading]:
        with self.lock:
            start = self.j
            while len(self.roots) < count:
                self._scan_window()
                if self.j - start > 10 ** 6:
                    raise BracketFailure("window scan did not terminate")
            return self.roots[:count]


@lru_cache(maxsize=64)
def _window_scan(family: str, a: float, alpha: float) -> _WindowScan:
    return _WindowScan(family, a, alpha)


def lower_leading_roots(family: str, a: float, count: int, alpha: float = 0.0) -> List[LowerLeading]:
    """
    The first `count` leading terms of the ci, si or ti zeros, in increasing order.

    For si the pair returned is (S^, C^) in the C, S slots. Scans are cached
    per (family, a, alpha), so a sweep over m costs one pass over the windows.
    """
    family = _ALIASES.get(family, family)
    if family not in ("ci", "si", "ti"):
        raise ValueError(f"lower_leading_roots handles ci, si, ti, got {family}")
    if a <= 1:
        raise ValueError("a must exceed 1")
    key_alpha = float(alpha) if family == "ti" else 0.0
    return _window_scan(family, float(a), key_alpha).first(count)


def solve_leading_ci(a: float, m: int) -> Tuple[float, float, float]:
    """(root, C, S) of cos(a x - arctan x) = chi(a, x), m-th smallest root."""
    r = lower_leading_roots("ci", a, m)[m - 1]
    return r.root, r.C, r.S


def solve_leading_si(a: float, m: int) -> Tuple[float, float, float]:
    """(root, S^, C^) of sin(a x - arctan x) = sigma(a, x), m-th smallest root."""
    r = lower_leading_roots("si", a, m)[m - 1]
    return r.root, r.C, r.S


def solve_leading_ti_lower(a: float, m: int, alpha: float) -> float:
    return lower_leading_roots("ti", a, m, alpha)[m - 1].root


# =============================================================================
# TILDE / HAT COEFFICIENTS
# =============================================================================

def _is_numeric(x) -> bool:
    return isinstance(x, (int, float, Fraction, np.floating))


def tilde_q(k: int, x, C, S, tau: float = DEGENERACY_TAU):
    """
    Coefficient tilde_c_{m,k} = tilde_q_k(x) of the ci zeros, k = 2..5.

    Accepts numbers or a RationalFunction x (with exact C, S) so that the
    C = 0, S = 1 reduction to q_k can be checked symbolically.
    """
    if k not in (2, 3, 4, 5):
        raise ValueError("tilde_q is available for k = 2..5")
    d = S * x - C
    if _is_numeric(x) and abs(d) < tau:
        raise DegenerateDenominator(f"|S x - C| = {abs(d):.3g} < {tau}")
    x2 = x * x
    p = x2 + 1

    if k == 2:
        return x2 * (S * x2 + 2 * C * x - S) / (p ** 2 * d)

    if k == 3:
        body = (C ** 3 * x * (5 * x2 - 9) * p ** 2
                - 2 * C ** 2 * S * (6 * x2 - 1) * p ** 2
                - C * x * (5 * x ** 6 + 9 * x ** 4 - 49 * x2 + 3)
                + 8 * S * x ** 4 * (2 * x2 - 3))
        return x2 * body / (2 * p ** 4 * d ** 3)

    if k == 4:
        body = (C ** 5 * x * (151 * x2 - 69) * p ** 4
                + C ** 4 * S * (47 * x ** 4 - 167 * x2 + 6) * p ** 4
                - C ** 3 * x * (284 * x ** 10 + 2445 * x ** 8 - 4962 * x ** 6
                                + 3124 * x ** 4 - 1258 * x2 + 15)
                - C ** 2 * S * x2 * (79 * x ** 10 - 711 * x ** 8 + 2252 * x ** 6
                                     - 6460 * x ** 4 + 2013 * x2 - 5)
                + C * x ** 3 * (133 * x ** 8 + 1862 * x ** 6 - 5076 * x ** 4
                                + 1202 * x2 + 7)
                + 4 * S * x ** 6 * (8 * x ** 6 - 183 * x ** 4 + 336 * x2 - 65))
        # overall sign fixed by the C = 0 reduction to q_4
        return -x2 * body / (6 * p ** 6 * d ** 5)

    body = (2 * C ** 7 * x * (379 * x ** 4 - 2365 * x2 + 318) * p ** 6
            - 4 * C ** 6 * S * (802 * x ** 4 - 723 * x2 + 6) * p ** 6
            - C ** 5 * x * (2139 * x ** 16 + 6650 * x ** 14 - 352255 * x ** 12
                            + 1102732 * x ** 10 - 2195479 * x ** 8 + 1221754 * x ** 6
                            - 255889 * x ** 4 + 28256 * x2 - 84)
            + 4 * C ** 4 * S * x2 * (2944 * x ** 14 - 12111 * x ** 12 + 171062 * x ** 10
                                     - 479729 * x ** 8 + 418084 * x ** 6 - 187793 * x ** 4
                                     + 18502 * x2 - 15)
            + 2 * C ** 3 * x ** 3 * (1002 * x ** 14 + 6707 * x ** 12 - 318554 * x ** 10
                                     + 955395 * x ** 8 - 1211026 * x ** 6 + 568777 * x ** 4
                                     - 46366 * x2 - 31)
            - 16 * C ** 2 * S * x ** 4 * (875 * x ** 12 - 8242 * x ** 10 + 48471 * x ** 8
                                          - 110732 * x ** 6 + 54721 * x ** 4 - 3906 * x2 - 3)
            - C * x ** 5 * (623 * x ** 12 + 6582 * x ** 10 - 301803 * x ** 8
                            + 762660 * x ** 6 - 350055 * x ** 4 + 22566 * x2 - 29)
            + 8 * S * x ** 8 * (679 * x ** 8 - 8384 * x ** 6 + 17226 * x ** 4
                                - 7168 * x2 + 431))
    return -x2 * body / (24 * p ** 8 * d ** 7)


def hat_q(k: int, x, C_hat, S_hat, tau: float = DEGENERACY_TAU):
    """si-zero coefficients: tilde_q with C -> S^ and S -> -C^."""
    try:
        return tilde_q(k, x, S_hat, -C_hat, tau)
    except DegenerateDenominator:
        raise DegenerateDenominator(f"|C^ x + S^| < {tau} at x={x}") from None


def expand_zero_lower(family, a: float, m: int, K: int = MAX_TILDE_ORDER,
                      tau: float = DEGENERACY_TAU) -> ZeroExpansion:
    """Assembled ci or si zero; degenerate_flag set (coefficients omitted) when the denominator gate trips."""
    fam = family if isinstance(family, ZeroFamily) else ZeroFamily(family)
    if fam.tag not in ("ci", "si"):
        raise ValueError(f"expand_zero_lower handles ci and si, got {fam.tag}")
    if not 1 <= K <= MAX_TILDE_ORDER:
        raise ValueError(f"K must lie in 1..{MAX_TILDE_ORDER}")

    if fam.tag == "ci":
        leading, first, second = solve_leading_ci(a, m)
        coeff_fn = tilde_q
    else:
        leading, first, second = solve_leading_si(a, m)
        # hat_q takes (C^, S^)
        first, second = second, first
        coeff_fn = hat_q

    coeffs: Dict[int, float] = {}
    degenerate = False
    try:
        for k in range(2, K + 1):
            coeffs[k] = float(coeff_fn(k, leading, first, second, tau))
    except DegenerateDenominator:
        degenerate = True
        coeffs = {}
    theta = leading + math.fsum(v / a ** k for k, v in coeffs.items())
    return ZeroExpansion(fam, a, m, leading, coeffs, K, theta, (first, second), degenerate)


def detect_degenerate(a: float, leadings: List[float], family: str = "ci",
                      tau: float = DEGENERACY_TAU) -> Optional[int]:
    """
    1-based index m whose leading term makes the tilde (or hat) denominator
    smaller than tau, or None. At most one such m may exist.
    """
    family = _ALIASES.get(family, family)
    trig = math.cos(0.5 * math.pi * a) if family == "ci" else math.sin(0.5 * math.pi * a)
    if abs(trig) < DETECTOR_DELTA:
        raise TrigZero(f"degeneracy detector needs |trig(pi a/2)| >= {DETECTOR_DELTA}, a={a}")
    flagged = []
    for m, x in enumerate(leadings, start=1):
        ph = a * x - math.atan(x)
        c, s = math.cos(ph), math.sin(ph)
        gap = s * x - c if family == "ci" else c * x + s
        if abs(gap) < tau:
            flagged.append(m)
    if len(flagged) > 1:
        raise MultipleDegenerates(f"indices {flagged} are all degenerate for a={a}")
    if not flagged:
        return None
    x = leadings[flagged[0] - 1]
    if abs(x - math.exp(-1)) > 0.5:
        warnings.warn(f"degenerate leading term {x:.6g} is far from 1/e for a={a}", stacklevel=2)
    return flagged[0]


# =============================================================================
# RESIDUALS AND THE EPSILON FALLBACK
# =============================================================================

def _corrections(a: float, theta: float, n: int) -> Tuple[float, float]:
    if n <= 0:
        return 0.0, 0.0
    return float(eps_R(a, theta, n)), float(eps_I(a, theta, n))


def _rhs(chi_value: SignedLog, e_R: float) -> float:
    if chi_value.sign == 0:
        return 0.0
    return chi_value.sign * math.exp(min(chi_value.log_abs - e_R, LOG_OVERFLOW))


def residual_ci(a: float, theta: float, n: int) -> float:
    e_R, e_I = _corrections(a, theta, n)
    return math.cos(phase(a, theta) + e_I) - _rhs(chi(a, theta), e_R)


def residual_si(a: float, theta: float, n: int) -> float:
    e_R, e_I = _corrections(a, theta, n)
    return math.sin(phase(a, theta) + e_I) - _rhs(sigma(a, theta), e_R)


def residual_ti(a: float, theta: float, n: int, alpha: float) -> float:
    e_R, e_I = _corrections(a, theta, n)
    return math.cos(phase(a, theta, alpha) + e_I) - _rhs(chi_alpha(a, theta, alpha), e_R)


def residual_capital(family: str, a: float, theta: float, n: int, alpha: float = 0.0) -> float:
    _, e_I = _corrections(a, theta, n)
    if family == "Si":
        return math.sin(phase(a, theta) + e_I)
    return math.cos(phase(a, theta, alpha if family == "Ti" else 0.0) + e_I)


def _residual_fn(family: str, a: float, n: int, alpha: float):
    family = _ALIASES.get(family, family)
    if family == "ci":
        return lambda th: residual_ci(a, th, n)
    if family == "si":
        return lambda th: residual_si(a, th, n)
    if family == "ti":
        return lambda th: residual_ti(a, th, n, alpha)
    if family in ("Ci", "Si", "Ti"):
        return lambda th: residual_capital(family, a, th, n, alpha)
    raise ValueError(f"unknown family: {family}")


def refine_epsilon_fallback(a: float, family: str, m: int, leading: float, n: int,
                            alpha: float = 0.0) -> float:
    """
    leading + epsilon, epsilon the root of the full zero equation (corrections
    truncated at n terms) closest to 0 within half an oscillation.
    """
    if n > DEFAULT_MAX_ORDER:
        raise ValueError(f"n={n} exceeds the coefficient table order")
    f = _residual_fn(family, a, n, alpha)
    half = math.pi / (2 * a)
    lo = max(-half, -0.5 * leading)
    eps_grid = np.linspace(lo, half, 41)
    vals = [f(leading + e) for e in eps_grid]
    candidates = []
    for k in range(len(eps_grid) - 1):
        if vals[k] == 0:
            candidates.append((abs(eps_grid[k]), eps_grid[k], eps_grid[k]))
        elif vals[k] * vals[k + 1] < 0:
            mid = 0.5 * (eps_grid[k] + eps_grid[k + 1])
            candidates.append((abs(mid), eps_grid[k], eps_grid[k + 1]))
    if not candidates:
        raise BracketFailure(f"no sign change of the {family} zero equation near theta={leading}")
    _, e_lo, e_hi = min(candidates)
    if e_lo == e_hi:
        return leading + e_lo
    try:
        eps = brentq(lambda e: f(leading + e), e_lo, e_hi,
                     xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
    except RuntimeError as exc:
        raise MaxIterations(str(exc)) from exc
    return leading + eps
