"""
GTI Evaluation Module

Evaluates the incomplete gamma functions gamma(a, az) and Gamma(a, az) from
their Liouville-Green expansions and, through them, the generalised
trigonometric integrals Ci, Si, Ti (and ci, si, ti via the connection
identities) on the positive real axis. The classical large-argument
expansions in terms of the auxiliary functions F and G are provided as an
independent evaluator.

Magnitudes are carried in log space: EvalResult.value * exp(log_scale) is
the function value.
"""

import cmath
import math
import os
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import mpmath
from dotenv import load_dotenv
from scipy.special import gammaln

from backend.domains import TURNING_RADIUS, error_bound, in_Z0_certified, in_Zinf_certified
from backend.errors import (
    BranchCut,
    CancellationWarning,
    DivergenceGate,
    NotCertified,
    TurningPoint,
)
from backend.lg_coefficients import DEFAULT_MAX_ORDER, get_table

load_dotenv()

# =============================================================================
# CONFIGURATION
# =============================================================================

EXTENDED_DPS = int(os.getenv("GTI_ASYM_EXTENDED_DPS", "32"))

CANCELLATION_LIMIT = 1e6
# exp() overflows near 709; keep mantissas well inside the range
LOG_SCALE_THRESHOLD = 600.0

CAPITAL = ("Ci", "Si", "Ti")
LOWER = ("ci", "si", "ti")


@dataclass(frozen=True)
class LGEvalConfig:
    order: int = 5
    precision_mode: str = "standard"
    bound_requested: bool = False

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.order > DEFAULT_MAX_ORDER:
            raise ValueError(f"order {self.order} exceeds the coefficient table ({DEFAULT_MAX_ORDER})")
        if self.precision_mode not in ("standard", "extended"):
            raise ValueError(f"unknown precision_mode: {self.precision_mode}")

    @property
    def extended(self) -> bool:
        return self.precision_mode == "extended"


@dataclass
class EvalResult:
    value: complex
    log_scale: float
    order_used: int
    eta_bound: Optional[float]
    mode: str
    flags: List[str] = field(default_factory=list)

    @property
    def scaled_value(self):
        """value * exp(log_scale); may overflow to inf."""
        return self.value * math.exp(self.log_scale) if self.log_scale else self.value

    def to_dict(self):
        v = self.value
        if isinstance(v, complex):
            value = {"re": v.real, "im": v.imag}
        else:
            value = v
        return {
            "value": value,
            "log_scale": self.log_scale,
            "order_used": self.order_used,
            "eta_bound": self.eta_bound,
            "mode": self.mode,
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class PhaseAmplitude:
    amplitude_log: float
    phase: float

    def to_dict(self):
        return {"amplitude_log": float(self.amplitude_log), "phase": float(self.phase)}


def _split_log(log_value):
    """exp(log_value) as (mantissa, log_scale)."""
    re = log_value.real
    scale = 0.0
    if abs(re) > LOG_SCALE_THRESHOLD:
        scale = float(re)
        log_value = log_value - scale
    if isinstance(log_value, (mpmath.mpc, mpmath.mpf)):
        return complex(mpmath.exp(log_value)), scale
    return cmath.exp(log_value), scale


# =============================================================================
# CORRECTION SUMS
# =============================================================================

def eps_R(a: float, theta: float, n: int):
    """sum_{s=1}^{n} R_s(theta) / a^s."""
    table = get_table(max(n, DEFAULT_MAX_ORDER))
    return sum(table.R[s](theta) / a ** s for s in range(1, n + 1))


def eps_I(a: float, theta: float, n: int):
    """sum_{s=1}^{n} L_s(theta) / a^s."""
    table = get_table(max(n, DEFAULT_MAX_ORDER))
    return sum(table.L[s](theta) / a ** s for s in range(1, n + 1))


def _E_sum(a, z, n):
    table = get_table(max(n, DEFAULT_MAX_ORDER))
    total = 0
    for s in range(1, n):
        sign = -1 if s % 2 else 1
        total = total + sign * table.E[s](z) / a ** s
    return total


# =============================================================================
# INCOMPLETE GAMMA
# =============================================================================

def _check_turning_point(z: complex):
    if abs(z - 1) < TURNING_RADIUS:
        raise TurningPoint(f"z={z} is within {TURNING_RADIUS} of the turning point z=1")


def _lg_log(a, z, n, extended: bool, upper: bool):
    if extended:
        with mpmath.workdps(EXTENDED_DPS):
            am, zm = mpmath.mpf(a), mpmath.mpc(z)
            denom = mpmath.log(zm - 1) if upper else mpmath.log(1 - zm)
            return am * mpmath.log(am * zm) - mpmath.log(am) - denom - am * zm + _E_sum(am, zm, n)
    denom = cmath.log(z - 1) if upper else cmath.log(1 - z)
    return a * cmath.log(a * z) - math.log(a) - denom - a * z + _E_sum(a, z, n)


def eval_gamma_LG(a: float, z: complex, cfg: LGEvalConfig = LGEvalConfig()) -> EvalResult:
    """gamma(a, az) = (az)^a / (a(1-z)) exp{-az + sum_{s=1}^{n-1} (-1)^s E_s(z)/a^s} (1 + eta)."""
    z = complex(z)
    if a <= 0:
        raise ValueError("a must be positive")
    if z.imag == 0 and z.real < 0:
        raise BranchCut(f"z={z} lies on the branch cut of (az)^a")
    _check_turning_point(z)
    if not in_Z0_certified(a, z):
        raise NotCertified(f"z={z} is not in the certified part of Z(0) for a={a}")
    if z == 0:
        return EvalResult(0j, 0.0, cfg.order, 0.0 if cfg.bound_requested else None,
                          cfg.precision_mode)

    value, scale = _split_log(_lg_log(a, z, cfg.order, cfg.extended, upper=False))
    eta = error_bound(a, z, cfg.order, "zero").eta_bound if cfg.bound_requested else None
    return EvalResult(value, scale, cfg.order, eta, cfg.precision_mode)


def eval_Gamma_LG(a: float, z: complex, cfg: LGEvalConfig = LGEvalConfig()) -> EvalResult:
    """Gamma(a, az) = (az)^a / (a(z-1)) exp{-az + sum_{s=1}^{n-1} (-1)^s E_s(z)/a^s} (1 + eta)."""
    z = complex(z)
    if a <= 0:
        raise ValueError("a must be positive")
    if z.imag == 0 and z.real < 0:
        raise BranchCut(f"z={z} lies on the branch cut of (az)^a")
    _check_turning_point(z)
    if not in_Zinf_certified(a, z):
        raise NotCertified(f"z={z} is not in the certified part of Z(inf) for a={a}")

    value, scale = _split_log(_lg_log(a, z, cfg.order, cfg.extended, upper=True))
    eta = error_bound(a, z, cfg.order, "infinity").eta_bound if cfg.bound_requested else None
    return EvalResult(value, scale, cfg.order, eta, cfg.precision_mode)


# =============================================================================
# GTIs ON THE REAL LINE
# =============================================================================

def phase_amplitude(a: float, theta: float, alpha: float = 0.0,
                    cfg: LGEvalConfig = LGEvalConfig()) -> PhaseAmplitude:
    """Ci(a, a theta) + i Si(a, a theta) = exp(amplitude_log + i phase), phase shifted by -alpha pi."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    n = cfg.order
    if cfg.extended:
        with mpmath.workdps(EXTENDED_DPS):
            am, tm = mpmath.mpf(a), mpmath.mpf(theta)
            amp = (am * mpmath.log(am * tm) + eps_R(am, tm, n) - mpmath.log(am)
                   - mpmath.log(1 + tm * tm) / 2)
            phase = am * tm - mpmath.atan(tm) - alpha * mpmath.pi + eps_I(am, tm, n)
            return PhaseAmplitude(amp, phase)
    amp = a * math.log(a * theta) + eps_R(a, theta, n) - math.log(a) - 0.5 * math.log1p(theta * theta)
    phase = a * theta - math.atan(theta) - alpha * math.pi + eps_I(a, theta, n)
    return PhaseAmplitude(float(amp), float(phase))


def _connection_constant(family: str, a: float, alpha: float):
    """Gamma(a) times the trigonometric factor of the lowercase identity, as (log|Gamma(a)|, trig)."""
    if family == "ci":
        trig = math.cos(0.5 * math.pi * a)
    elif family == "si":
        trig = math.sin(0.5 * math.pi * a)
    else:
        trig = math.cos(math.pi * (0.5 * a - alpha))
    return float(gammaln(a)), trig


def eval_GTI(a: float, theta: float, family: str, alpha: float = 0.0,
             cfg: LGEvalConfig = LGEvalConfig()) -> EvalResult:
    """
    family(a, a*theta) from the LG phase and amplitude.

    Lowercase families use Gamma(a) trig - capital. For a > 1 this is the
    analytic continuation of the defining integral and is flagged as such.
    """
    if family not in CAPITAL + LOWER:
        raise ValueError(f"unknown family: {family}")
    if a <= 0:
        raise ValueError("a must be positive")
    if family in ("Ci", "Si", "ci", "si"):
        alpha = 0.0

    pa = phase_amplitude(a, theta, alpha, cfg)
    flags = []
    if family.lower() == "si":
        trig_part = mpmath.sin(pa.phase) if cfg.extended else math.sin(pa.phase)
    else:
        trig_part = mpmath.cos(pa.phase) if cfg.extended else math.cos(pa.phase)

    amp_log = pa.amplitude_log
    eta = error_bound(a, complex(0, -theta), cfg.order, "zero").eta_bound \
        if cfg.bound_requested else None

    if family in CAPITAL:
        scale = float(amp_log) if abs(amp_log) > LOG_SCALE_THRESHOLD else 0.0
        with mpmath.workdps(EXTENDED_DPS):
            value = float(trig_part * mpmath.exp(amp_log - scale))
        return EvalResult(value, scale, cfg.order, eta, cfg.precision_mode, flags)

    if a > 1:
        flags.append("continuation")
    log_gamma, const_trig = _connection_constant(family, a, alpha)
    # common scale for both terms of the difference
    scale = max(float(amp_log), log_gamma)
    if abs(scale) <= LOG_SCALE_THRESHOLD:
        scale = 0.0
    with mpmath.workdps(EXTENDED_DPS):
        capital = trig_part * mpmath.exp(amp_log - scale)
        constant = const_trig * mpmath.exp(log_gamma - scale)
        if not cfg.extended:
            capital, constant = float(capital), float(constant)
        value = constant - capital
        biggest = max(abs(capital), abs(constant))
        ratio = biggest / abs(value) if value else math.inf
    if ratio > CANCELLATION_LIMIT:
        flags.append("cancellation")
        warnings.warn(
            f"{family}(a={a}, theta={theta}) loses {math.log10(ratio):.1f} digits to cancellation",
            CancellationWarning,
            stacklevel=2,
        )
    return EvalResult(float(value), scale, cfg.order, eta, cfg.precision_mode, flags)


# =============================================================================
# LARGE-ARGUMENT EXPANSIONS
# =============================================================================

def _gate(a: float) -> float:
    return 2 * abs(1 - a) + 10


def eval_FG_largez(a: float, z: float, N: Optional[int] = None,
                   tol: Optional[float] = None) -> Tuple[float, float]:
    """
    F(a, z) ~ z^(a-1) sum (-1)^n (1-a)_2n / z^2n,
    G(a, z) ~ z^(a-1) sum (-1)^n (1-a)_(2n+1) / z^(2n+1),

    summed up to and including the smallest term of the combined sequence
    (1-a)_k / z^k, or over its first N terms when N is given.
    """
    if z < _gate(a):
        raise DivergenceGate(f"z={z} is below the large-argument gate {_gate(a):g} for a={a}")
    F_terms, G_terms = [], []
    term = 1.0  # (1-a)_k / z^k
    smallest = abs(term)
    k = 0
    limit = N if N is not None else 10 ** 6
    while k < limit:
        if term == 0:
            smallest = 0.0
            break
        if k % 2 == 0:
            F_terms.append(term if (k // 2) % 2 == 0 else -term)
        else:
            G_terms.append(term if (k // 2) % 2 == 0 else -term)
        nxt = term * (1 - a + k) / z
        if N is None and abs(nxt) >= abs(term):
            smallest = abs(nxt)
            break
        term = nxt
        smallest = abs(term)
        k += 1
    if tol is not None and smallest > tol:
        raise DivergenceGate(f"smallest term {smallest:.3g} exceeds tolerance {tol:.3g}")
    prefactor = z ** (a - 1)
    return prefactor * math.fsum(F_terms), prefactor * math.fsum(G_terms)


def assemble_ci_si_largez(a: float, z: float, N: Optional[int] = None) -> Tuple[float, float]:
    F, G = eval_FG_largez(a, z, N)
    return -F * math.sin(z) + G * math.cos(z), F * math.cos(z) + G * math.sin(z)


def assemble_ti_largez(a: float, z: float, alpha: float, N: Optional[int] = None) -> float:
    F, G = eval_FG_largez(a, z, N)
    shifted = z - math.pi * alpha
    return -F * math.sin(shifted) + G * math.cos(shifted)
