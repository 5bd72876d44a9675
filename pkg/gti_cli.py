"""
gti-asym command line

Thin adapters over the backend modules. Every command builds its whole
output in memory and writes it in one go, so a failing run leaves no
partial file behind.

Usage:
    python gti_cli.py eval --family Ci --a 10 --theta 1.25 --order 5 [--alpha 0.3] [--bound]
    python gti_cli.py zeros --family ci --a 10.3 --m 1..100 --K 5 [--refine] --out zeros.csv
    python gti_cli.py coeffs --order 3
    python gti_cli.py bounds --a 25 --z 0,2 --n 3 --kind zero
    python gti_cli.py figure level-curves --out fig1.csv
    python gti_cli.py figure delta-plot --a 10 --m 1..100 --K 10 --out fig2.csv
    python gti_cli.py oracle --family Si --a 10 --theta 3.2 [--extended]

Exit codes: 0 success, 2 domain or argument error, 3 numerical failure.
"""

import argparse
import json
import math
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from dotenv import load_dotenv

from backend.domains import GridSpec, error_bound, level_curves
from backend.errors import DomainError, NumericalFailure
from backend.gti_eval import LGEvalConfig, eval_GTI, eval_Gamma_LG, eval_gamma_LG
from backend.lg_coefficients import DEFAULT_MAX_ORDER, get_table
from backend.manifest import RunManifest
from backend.observability import RunLogger
from backend.oracle import QuadratureConfig, delta_metric, gti_value, refine_zero
from backend.zeros import (
    MAX_TILDE_ORDER,
    ZeroFamily,
    expand_zero,
    expand_zero_lower,
    refine_epsilon_fallback,
    solve_leading_ti_lower,
)

load_dotenv()

# === CONFIGURATION ===
THREADS = max(1, int(os.getenv("GTI_ASYM_THREADS", "1")))
FALLBACK_ORDER = 5
DEFAULT_LEVELS = "-1,-0.5,-0.25,0,0.25,0.5,1"
# ===================================

_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")

ZERO_COLUMNS = ("family", "a", "m", "leading", "theta_assembled", "theta_refined",
                "delta_log10", "degenerate_flag")
DELTA_COLUMNS = ("m", "leading", "theta_mK", "delta", "log10_abs_delta")


# =============================================================================
# ARGUMENT PARSING
# =============================================================================

def decimal(text: str) -> float:
    """Plain decimal numbers only: no exponents, inf or nan."""
    if not _DECIMAL.match(text.strip()):
        raise argparse.ArgumentTypeError(f"not a decimal number: {text!r}")
    return float(text)


def index_range(text: str):
    """'1..100' or '7' -> (lo, hi), 1 <= lo <= hi."""
    lo, sep, hi = text.partition("..")
    try:
        lo = int(lo)
        hi = int(hi) if sep else lo
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an index range: {text!r}") from None
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"range must satisfy 1 <= lo <= hi: {text!r}")
    return lo, hi


def complex_point(text: str) -> complex:
    """'RE,IM' in decimal."""
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected RE,IM: {text!r}")
    return complex(decimal(parts[0]), decimal(parts[1]))


def decimal_list(text: str):
    return [decimal(p) for p in text.split(",") if p.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--reproducible", action="store_true",
                        help="omit the timestamp from the manifest header")

    parser = argparse.ArgumentParser(prog="gti-asym",
                                     description="Large-parameter asymptotics of generalised trigonometric integrals")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="LG evaluation of a GTI or incomplete gamma function")
    p.add_argument("--family", required=True, choices=["Ci", "Si", "Ti", "ci", "si", "ti", "gamma", "Gamma"])
    p.add_argument("--a", type=decimal, required=True)
    p.add_argument("--theta", type=decimal, help="GTI argument is a*theta")
    p.add_argument("--z", type=complex_point, help="RE,IM; incomplete gamma argument is a*z")
    p.add_argument("--order", type=int, default=5)
    p.add_argument("--alpha", type=decimal, default=0.0)
    p.add_argument("--bound", action="store_true", help="attach the LG error bound")
    p.add_argument("--extended", action="store_true")

    p = sub.add_parser("zeros", parents=[common], help="asymptotic zeros of a GTI family")
    p.add_argument("--family", required=True,
                   choices=["Ci", "Si", "Ti", "ci", "si", "ti", "ci_lower", "si_lower", "ti_lower"])
    p.add_argument("--a", type=decimal, required=True)
    p.add_argument("--m", type=index_range, default=(1, 1))
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--alpha", type=decimal, default=0.0)
    p.add_argument("--refine", action="store_true", help="add oracle-refined zeros and the Delta metric")
    p.add_argument("--extended", action="store_true")

    p = sub.add_parser("coeffs", parents=[common], help="dump E_s, L_s, R_s")
    p.add_argument("--order", type=int, required=True)

    p = sub.add_parser("bounds", parents=[common], help="LG error bound report as JSON")
    p.add_argument("--a", type=decimal, required=True)
    p.add_argument("--z", type=complex_point, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", choices=["zero", "infinity"], default="zero")

    p = sub.add_parser("figure", parents=[common], help="figure data as CSV")
    p.add_argument("kind", choices=["level-curves", "delta-plot"])
    p.add_argument("--c", type=decimal_list, default=decimal_list(DEFAULT_LEVELS),
                   help="level values for level-curves")
    p.add_argument("--grid-n", type=int, default=800)
    p.add_argument("--a", type=decimal, default=10.0)
    p.add_argument("--m", type=index_range, default=(1, 100))
    p.add_argument("--K", type=int, default=10)
    p.add_argument("--family", choices=["Ci", "Si"], default="Ci")
    p.add_argument("--standard", action="store_true", help="double precision oracle instead of extended")

    p = sub.add_parser("oracle", parents=[common], help="reference value of a GTI")
    p.add_argument("--family", choices=["Ci", "Si", "Ti", "ci", "si", "ti"])
    p.add_argument("--a", type=decimal)
    p.add_argument("--theta", type=decimal)
    p.add_argument("--alpha", type=decimal, default=0.0)
    p.add_argument("--grid", help="CSV with rows family,a,theta[,alpha]")
    p.add_argument("--extended", action="store_true")

    return parser


# =============================================================================
# HELPERS
# =============================================================================

def parallel_map(fn, items):
    """Results in input order; at most GTI_ASYM_THREADS workers."""
    items = list(items)
    if THREADS == 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=THREADS) as pool:
        return list(pool.map(fn, items))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_text(columns, rows) -> str:
    lines = [",".join(columns)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _quad_config(extended: bool) -> QuadratureConfig:
    return QuadratureConfig(precision_mode="extended" if extended else "standard")


def emit(body: str, manifest: RunManifest, out_path: str = None, with_header: bool = True):
    text = (manifest.header() if with_header else "") + body
    if out_path:
        folder = os.path.dirname(out_path)
        if folder:
            os.makedirs(folder, exist_ok=True)
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"[gti-asym] wrote {out_path}", file=sys.stderr)
    else:
        sys.stdout.write(text)


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_eval(args) -> str:
    cfg = LGEvalConfig(order=args.order,
                       precision_mode="extended" if args.extended else "standard",
                       bound_requested=args.bound)
    if args.family in ("gamma", "Gamma"):
        if args.z is None:
            raise ValueError("--z is required for gamma and Gamma")
        fn = eval_gamma_LG if args.family == "gamma" else eval_Gamma_LG
        result = fn(args.a, args.z, cfg)
    else:
        if args.theta is None:
            raise ValueError("--theta is required for the GTI families")
        if args.alpha and args.family not in ("Ti", "ti"):
            raise ValueError("--alpha applies to Ti and ti only")
        result = eval_GTI(args.a, args.theta, args.family, args.alpha, cfg)
    return json.dumps(result.to_dict(), sort_keys=True) + "\n"


def _zero_row(args, family: ZeroFamily, K: int, cfg: QuadratureConfig, m: int):
    a = args.a
    if family.tag in ("Ci", "Si", "Ti"):
        exp = expand_zero(family, a, m, K, family.alpha)
        leading, theta, degenerate = exp.leading, exp.theta_assembled, exp.degenerate_flag
    elif family.tag in ("ci", "si"):
        exp = expand_zero_lower(family, a, m, K)
        leading, theta, degenerate = exp.leading, exp.theta_assembled, exp.degenerate_flag
        if degenerate:
            theta = refine_epsilon_fallback(a, family.tag, m, leading, FALLBACK_ORDER)
    else:
        # no coefficient expansion for ti: the assembled zero is the epsilon root
        leading = solve_leading_ti_lower(a, m, family.alpha)
        theta = refine_epsilon_fallback(a, "ti", m, leading, FALLBACK_ORDER, family.alpha)
        degenerate = False

    refined = delta_log10 = None
    if args.refine:
        refined = refine_zero(a, family.tag, family.alpha, theta, cfg, m).theta_star
        if family.tag in ("Ci", "Si"):
            delta = delta_metric(a, a * theta, cfg, family.tag)
            delta_log10 = math.log10(abs(delta)) if delta else -math.inf
    return (family.tag, a, m, leading, theta, refined, delta_log10, degenerate)


def cmd_zeros(args) -> str:
    family = ZeroFamily(args.family, args.alpha)
    lower = family.tag in ("ci", "si", "ti")
    K = args.K if args.K is not None else (MAX_TILDE_ORDER if lower else 10)
    if lower and family.tag != "ti" and not 1 <= K <= MAX_TILDE_ORDER:
        raise ValueError(f"--K must lie in 1..{MAX_TILDE_ORDER} for {family.tag}")
    if K < 1:
        raise ValueError("--K must be >= 1")
    if args.a <= 1:
        raise ValueError("zeros need a > 1")
    cfg = _quad_config(args.extended)
    lo, hi = args.m
    rows = parallel_map(lambda m: _zero_row(args, family, K, cfg, m), range(lo, hi + 1))
    return csv_text(ZERO_COLUMNS, rows)


def cmd_coeffs(args) -> str:
    if not 1 <= args.order <= DEFAULT_MAX_ORDER:
        raise ValueError(f"--order must lie in 1..{DEFAULT_MAX_ORDER}")
    table = get_table(DEFAULT_MAX_ORDER)
    lines = []
    for s in range(1, args.order + 1):
        E = table.E_rational(s)
        lines.append(f"E_{s}(z) = {E.to_str('z')}")
        lines.append(f"L_{s}(x) = {table.L[s].to_str('x')}")
        lines.append(f"R_{s}(x) = {table.R[s].to_str('x')}")
        lines.append(json.dumps({"s": s, "E": E.to_json(), "L": table.L[s].to_json(),
                                 "R": table.R[s].to_json()}, sort_keys=True))
    return "\n".join(lines) + "\n"


def cmd_bounds(args) -> str:
    report = error_bound(args.a, args.z, args.n, args.kind)
    return json.dumps(report.to_dict(), sort_keys=True) + "\n"


def figure_level_curves(c_values, grid_n: int = 800) -> str:
    grid = GridSpec(nx=grid_n, ny=grid_n)
    rows = []
    for curve in level_curves(c_values, grid):
        for re_z, im_z in curve.points:
            rows.append((curve.curve_id, curve.c, float(re_z), float(im_z)))
    return csv_text(("curve_id", "c", "re_z", "im_z"), rows)


def figure_delta_plot(a: float, m_range, K: int, family: str = "Ci", extended: bool = True) -> str:
    """log10 |Delta| at a * (assembled zero) for each m."""
    if a <= 1:
        raise ValueError("delta-plot needs a > 1")
    cfg = _quad_config(extended)

    def row(m):
        exp = expand_zero(family, a, m, K)
        x = a * exp.theta_assembled
        delta = delta_metric(a, x, cfg, family)
        log_delta = math.log10(abs(delta)) if delta else -math.inf
        return (m, exp.leading, x, delta, log_delta)

    lo, hi = m_range
    return csv_text(DELTA_COLUMNS, parallel_map(row, range(lo, hi + 1)))


def cmd_figure(args) -> str:
    if args.kind == "level-curves":
        return figure_level_curves(args.c, args.grid_n)
    return figure_delta_plot(args.a, args.m, args.K, args.family, extended=not args.standard)


def _read_grid(path: str):
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.lower().startswith("family"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) not in (3, 4):
                raise ValueError(f"bad grid row: {line!r}")
            alpha = decimal(parts[3]) if len(parts) == 4 else 0.0
            rows.append((parts[0], decimal(parts[1]), decimal(parts[2]), alpha))
    return rows


def cmd_oracle(args) -> str:
    cfg = _quad_config(args.extended)
    if args.grid:
        points = _read_grid(args.grid)

        def value(p):
            fam, a, theta, alpha = p
            return (fam, a, theta, alpha, gti_value(fam, a, a * theta, alpha, cfg))

        return csv_text(("family", "a", "theta", "alpha", "value"), parallel_map(value, points))
    if args.family is None or args.a is None or args.theta is None:
        raise ValueError("oracle needs --family, --a and --theta (or --grid)")
    v = gti_value(args.family, args.a, args.a * args.theta, args.alpha, cfg)
    return json.dumps({"family": args.family, "a": args.a, "theta": args.theta,
                       "alpha": args.alpha, "x": args.a * args.theta, "value": v,
                       "mode": cfg.precision_mode}, sort_keys=True) + "\n"


COMMANDS = {
    "eval": cmd_eval,
    "zeros": cmd_zeros,
    "coeffs": cmd_coeffs,
    "bounds": cmd_bounds,
    "figure": cmd_figure,
    "oracle": cmd_oracle,
}

# JSON bodies stay parseable on stdout; files always get the header.
JSON_COMMANDS = ("eval", "bounds")


def _parameters(args) -> dict:
    params = {k: v for k, v in vars(args).items() if k not in ("out", "reproducible", "command")}
    return {k: (f"{v.real},{v.imag}" if isinstance(v, complex) else v) for k, v in params.items()}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on bad arguments

    logger = RunLogger()
    command = args.command if args.command != "figure" else f"figure {args.kind}"
    manifest = RunManifest.create(command, _parameters(args), DEFAULT_MAX_ORDER, args.reproducible)
    start = time.time()
    try:
        body = COMMANDS[args.command](args)
    except (DomainError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        logger.log_event(command, "fail", (time.time() - start) * 1000, type(e).__name__)
        return 2
    except NumericalFailure as e:
        print(f"Error: {e}", file=sys.stderr)
        logger.log_event(command, "fail", (time.time() - start) * 1000, type(e).__name__)
        return 3

    with_header = bool(args.out) or args.command not in JSON_COMMANDS
    emit(body, manifest, args.out, with_header)
    logger.log_event(command, "success", (time.time() - start) * 1000, meta=manifest.parameters)
    return 0


if __name__ == "__main__":
    sys.exit(main())
