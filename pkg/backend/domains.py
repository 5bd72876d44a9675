"""
Domains and Error Bounds Module

Geometry of the asymptotic domains Z(0) and Z(inf) for the incomplete gamma
LG expansions, the L-shaped paths used to certify them, and the computable
bound on the relative error term eta_n.

Configuration (via .env):
- GTI_ASYM_TURNING_RADIUS: paths must stay this far from z = 1 (default: 0.1)
- GTI_ASYM_KAPPA_SAMPLES: samples per segment for the kappa suprema (default: 512)
- GTI_ASYM_TAIL_START: offset past max(Re z, x+) where the ray to +inf is cut (default: 50)
"""

import cmath
import math
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import contourpy
import numpy as np
from dotenv import load_dotenv
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from backend.errors import BranchCut, NotCertified, QuadratureFailure, Singular
from backend.exact_algebra import RationalFunction
from backend.lg_coefficients import get_table, DEFAULT_MAX_ORDER

load_dotenv()

# =============================================================================
# CONFIGURATION
# =============================================================================

TURNING_RADIUS = float(os.getenv("GTI_ASYM_TURNING_RADIUS", "0.1"))
KAPPA_SAMPLES = int(os.getenv("GTI_ASYM_KAPPA_SAMPLES", "512"))
TAIL_START = float(os.getenv("GTI_ASYM_TAIL_START", "50"))

# |Im z| >= 1/2 lies in Z(inf) by a horizontal ray once a reaches this value
HORIZONTAL_RAY_MIN_A = 2.7

QUAD_LIMIT = 400


# =============================================================================
# POTENTIALS
# =============================================================================

def _on_cut(z: complex) -> bool:
    return z.imag == 0 and z.real <= 0


def xi(z: complex) -> complex:
    """1/2 (z - 1) - 1/2 ln z, principal branch."""
    z = complex(z)
    if _on_cut(z):
        raise BranchCut(f"xi is not defined on (-inf, 0]: z={z}")
    return 0.5 * (z - 1) - 0.5 * cmath.log(z)


def Xi(a: float, z: complex) -> float:
    """1/2 a (x - 1 - ln|z|) - 1/2 ln|1 - z|. Depends on |z| only through logs, so it is cut-free."""
    z = complex(z)
    if z == 0 or z == 1:
        raise Singular(f"Xi is singular at z={z}")
    return 0.5 * a * (z.real - 1 - math.log(abs(z))) - 0.5 * math.log(abs(1 - z))


def dXi_dx(a: float, z: complex) -> float:
    z = complex(z)
    if z == 0 or z == 1:
        raise Singular(f"dXi/dx is singular at z={z}")
    x, y = z.real, z.imag
    return 0.5 * a * (1 - x / (x * x + y * y)) - (x - 1) / (2 * ((x - 1) ** 2 + y * y))


def dXi_dy(a: float, z: complex) -> float:
    z = complex(z)
    if z == 0 or z == 1:
        raise Singular(f"dXi/dy is singular at z={z}")
    x, y = z.real, z.imag
    return -a * y / (2 * (x * x + y * y)) - y / (2 * ((x - 1) ** 2 + y * y))


def x_pm(a: float) -> Tuple[float, float]:
    """Stationary points of Xi(a, x) on the positive real axis: (x-, x+)."""
    if a <= 0:
        raise ValueError("a must be positive")
    root = math.sqrt(4 * a + 1) / (2 * a)
    base = 1 + 1 / (2 * a)
    return base - root, base + root


def in_Z0_certified(a: float, z: complex) -> bool:
    z = complex(z)
    if z == 1:
        return False
    return z.real <= x_pm(a)[0]


def in_Zinf_certified(a: float, z: complex) -> bool:
    z = complex(z)
    if z == 0 or z == 1:
        return False
    if z.real >= x_pm(a)[1]:
        return True
    return abs(z.imag) >= 0.5 and a >= HORIZONTAL_RAY_MIN_A


# =============================================================================
# PATHS
# =============================================================================

class PathKind(str, Enum):
    FROM_ZERO = "zero"
    FROM_INFINITY = "infinity"


@dataclass(frozen=True)
class PathSpec:
    """
    Chain of straight segments ending at `endpoint`.

    For FROM_INFINITY the first segment starts at the truncation point
    `tail_from`; the ray beyond it to +inf is accounted for analytically.
    """
    kind: PathKind
    segments: Tuple[Tuple[complex, complex], ...]
    endpoint: complex
    tail_from: Optional[complex] = None

    def points(self, per_segment: int = 200) -> np.ndarray:
        """Ordered samples from the start of the path to the endpoint."""
        if not self.segments:
            return np.array([self.endpoint])
        chunks = []
        for k, (p, q) in enumerate(self.segments):
            s = np.linspace(0.0, 1.0, per_segment)
            if k:
                s = s[1:]
            chunks.append(p + (q - p) * s)
        return np.concatenate(chunks)

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "segments": [[[p.real, p.imag], [q.real, q.imag]] for p, q in self.segments],
            "endpoint": [self.endpoint.real, self.endpoint.imag],
            "tail_from": None if self.tail_from is None
            else [self.tail_from.real, self.tail_from.imag],
        }


def _segment_distance(p: complex, q: complex, c: complex) -> float:
    d = q - p
    if d == 0:
        return abs(c - p)
    s = ((c - p) * d.conjugate()).real / abs(d) ** 2
    s = min(1.0, max(0.0, s))
    return abs(p + s * d - c)


def build_L_path(kind, a: float, z: complex, tail_start: float = TAIL_START) -> PathSpec:
    """
    Horizontal-then-vertical path to z.

    FromZero: 0 -> Re z -> z. FromInfinity: +inf -> Re z -> z, or, in the
    |Im z| >= 1/2 region, the horizontal ray at height Im z.
    """
    kind = PathKind(kind)
    z = complex(z)
    x, y = z.real, z.imag

    if kind is PathKind.FROM_ZERO:
        if not in_Z0_certified(a, z):
            raise NotCertified(f"z={z} is not in the certified part of Z(0) for a={a}")
        raw = [(0j, complex(x, 0)), (complex(x, 0), z)]
        tail_from = None
    else:
        if not in_Zinf_certified(a, z):
            raise NotCertified(f"z={z} is not in the certified part of Z(inf) for a={a}")
        x_plus = x_pm(a)[1]
        T = max(x, x_plus) + tail_start
        if x >= x_plus:
            raw = [(complex(T, 0), complex(x, 0)), (complex(x, 0), z)]
        else:
            raw = [(complex(T, y), z)]
        tail_from = raw[0][0]

    segments = tuple((p, q) for p, q in raw if p != q)
    for p, q in segments:
        if _segment_distance(p, q, 1 + 0j) < TURNING_RADIUS:
            raise NotCertified(
                f"path to z={z} passes within {TURNING_RADIUS} of the turning point z=1"
            )
    if tail_from is not None and abs(tail_from - 1) < TURNING_RADIUS:
        raise NotCertified("tail starts at the turning point")
    return PathSpec(kind, segments, z, tail_from)


def audit_monotone(a: float, path: PathSpec, samples: int = 200, slack: float = 1e-9) -> bool:
    """True when Xi(a, .) is nonincreasing along the path (start excluded if it is 0)."""
    pts = path.points(samples)
    values = [Xi(a, t) for t in pts if t != 0 and t != 1]
    return all(v2 <= v1 + slack * max(1.0, abs(v1)) for v1, v2 in zip(values, values[1:]))


# =============================================================================
# ERROR BOUNDS
# =============================================================================

def _numeric(r: RationalFunction):
    """Vectorized complex evaluator for an exact rational function."""
    num, den = r.coefficient_arrays()
    return lambda t: np.polyval(num, t) / np.polyval(den, t)


def _path_integral(r: RationalFunction, path: PathSpec) -> float:
    """Integral of |r(t) dt| along the path, including the analytic tail."""
    f = _numeric(r)
    total = 0.0
    for p, q in path.segments:
        length = abs(q - p)
        unit = (q - p) / length
        val, err = quad(lambda s: abs(f(p + s * unit)), 0.0, length,
                        limit=QUAD_LIMIT, epsabs=1e-13, epsrel=1e-10)
        if not math.isfinite(val) or err > max(1e-9, 1e-6 * abs(val)):
            raise QuadratureFailure(
                f"path integral of {r.to_str('t')} on [{p}, {q}] did not converge (err={err:.3g})"
            )
        total += val

    if path.tail_from is not None and not r.is_zero():
        p_order = r.decay_order()
        if p_order < 2:
            raise QuadratureFailure(f"integrand {r.to_str('t')} is not integrable at infinity")
        tT = path.tail_from
        # |r(t)| ~ c |t|^-p; doubled leading-term tail over [Re tT, inf)
        c = abs(f(tT)) * abs(tT) ** p_order
        total += 2 * c * tT.real ** (1 - p_order) / (p_order - 1)
    return total


def _segment_sup(fun, p: complex, q: complex, samples: int) -> float:
    s = np.linspace(0.0, 1.0, samples)
    vals = fun(p + (q - p) * s)
    k = int(np.argmax(vals))
    best = float(vals[k])
    lo = s[max(k - 1, 0)]
    hi = s[min(k + 1, samples - 1)]
    if hi > lo:
        res = minimize_scalar(lambda u: -float(fun(p + (q - p) * u)),
                              bounds=(lo, hi), method="bounded")
        best = max(best, -float(res.fun))
    return best


def _kappas(a: float, path: PathSpec, samples: int) -> Tuple[float, float]:
    def k0(t):
        t = np.asarray(t, dtype=complex)
        return 1.0 / np.abs(1 + t / (2 * a * (t - 1) ** 2))

    def k2(t):
        t = np.asarray(t, dtype=complex)
        return np.abs(t / (t - 1) ** 2)

    kappa0, kappa2 = 0.0, 0.0
    for p, q in path.segments:
        kappa0 = max(kappa0, _segment_sup(k0, p, q, samples))
        kappa2 = max(kappa2, _segment_sup(k2, p, q, samples))
    # both suprema include the start of the path: t = 0 or t -> +inf
    return max(kappa0, 1.0), kappa2


@dataclass
class ErrorBoundReport:
    n: int
    kappa0: float
    kappa2: float
    Phi_n: float
    Psi_n: float
    extra_integral: float
    eta_bound: float
    path: PathSpec
    a: float = field(default=0.0)

    def to_dict(self):
        return {
            "a": self.a,
            "n": self.n,
            "kappa0": self.kappa0,
            "kappa2": self.kappa2,
            "Phi_n": self.Phi_n,
            "Psi_n": self.Psi_n,
            "extra_integral": self.extra_integral,
            "eta_bound": self.eta_bound,
            "path": self.path.to_dict(),
        }


def assemble_eta(a: float, n: int, kappa0: float, kappa2: float,
                 Phi: float, Psi: float, extra: float) -> float:
    lead = kappa0 * Phi / a ** n
    expo = (2 + 2 * kappa0 + kappa0 * kappa2 / a) * Psi / a + kappa0 * extra / a + lead
    return lead * math.exp(expo)


def error_bound(a: float, z: complex, n: int, kind, samples: int = KAPPA_SAMPLES) -> ErrorBoundReport:
    """Bound on |eta_n(a, z)| along the certified L-path of the given kind."""
    if n < 1:
        raise ValueError("n must be >= 1")
    path = build_L_path(kind, a, z)
    if not path.segments:
        return ErrorBoundReport(n, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, path, a)

    table = get_table(max(2 * n, DEFAULT_MAX_ORDER))
    F = table.F
    t = RationalFunction.x()
    weight = (t - 1) / t

    Phi = _path_integral(weight * F[n], path)
    for s in range(1, n):
        inner = sum(_path_integral(weight * F[k] * F[s + n - k - 1], path) for k in range(s, n))
        Phi += 0.5 * inner / a ** s
    Psi = 2 * sum(_path_integral(weight * F[s + 1], path) / a ** s for s in range(n - 1))
    extra = _path_integral((t + 1) / (t - 1) ** 3, path)
    kappa0, kappa2 = _kappas(a, path, samples)

    eta = assemble_eta(a, n, kappa0, kappa2, Phi, Psi, extra)
    return ErrorBoundReport(n, kappa0, kappa2, Phi, Psi, extra, eta, path, a)


# =============================================================================
# LEVEL CURVES
# =============================================================================

@dataclass(frozen=True)
class GridSpec:
    re_min: float = -2.0
    re_max: float = 4.0
    im_min: float = 0.0
    im_max: float = 3.0
    nx: int = 800
    ny: int = 800
    exclude_radius: float = 0.02
    # Re xi is symmetric under conjugation; mirror curves into Im z < 0
    mirror: bool = True


@dataclass(frozen=True)
class LevelCurve:
    curve_id: int
    c: float
    points: np.ndarray  # (k, 2): re, im


def level_curves(c_values: List[float], grid: GridSpec = GridSpec()) -> List[LevelCurve]:
    """
    Polylines of Re xi(z) = c by marching squares; a small disc about z = 0 is masked.

    With grid.mirror and a grid in Im z >= 0, each polyline off the real axis is
    followed by its conjugate so the figure covers both half planes.
    """
    re = np.linspace(grid.re_min, grid.re_max, grid.nx)
    im = np.linspace(grid.im_min, grid.im_max, grid.ny)
    X, Y = np.meshgrid(re, im)
    R = np.hypot(X, Y)
    mask = R < grid.exclude_radius
    with np.errstate(divide="ignore", invalid="ignore"):
        values = 0.5 * (X - 1) - 0.5 * np.log(R)
    values = np.ma.masked_where(mask | ~np.isfinite(values), values)

    gen = contourpy.contour_generator(X, Y, values, line_type=contourpy.LineType.Separate)
    curves = []
    for c in c_values:
        for line in gen.lines(c):
            if len(line) < 2:
                continue
            pts = np.asarray(line)
            curves.append(LevelCurve(len(curves), float(c), pts))
            if grid.mirror and grid.im_min >= 0 and np.any(pts[:, 1] > 0):
                curves.append(LevelCurve(len(curves), float(c), pts * np.array([1.0, -1.0])))
    return curves
