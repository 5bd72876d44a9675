"""
Figure Data Script

Writes the data behind the three figures into data/:
1. fig1.csv - level curves Re xi(z) = c, including the Stokes curve c = 0
2. fig2.csv - log10 |Delta| at the assembled Ci zeros for a = 10
3. fig3.csv - the same for a = 20.5

Usage:
    python scripts/reproduce_figures.py [--only fig1|fig2|fig3] [--K 10] [--m-max 100] [--reproducible]
"""

import os
import sys
import argparse
import time

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from backend.lg_coefficients import DEFAULT_MAX_ORDER
from backend.manifest import RunManifest
from backend.observability import RunLogger
from gti_cli import DEFAULT_LEVELS, decimal_list, figure_delta_plot, figure_level_curves

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")

FIGURES = {
    "fig1": {"kind": "level-curves"},
    "fig2": {"kind": "delta-plot", "a": 10.0},
    "fig3": {"kind": "delta-plot", "a": 20.5},
}


def ensure_data_dir():
    """Create data directory if it doesn't exist."""
    if not os.path.exists(DATA_DIR):
        os.makedirs(DATA_DIR)
        print(f"✅ Created data directory: {DATA_DIR}")
    else:
        print(f"📁 Data directory exists: {DATA_DIR}")


def build_figure(name: str, K: int, m_max: int, reproducible: bool) -> str:
    fig = FIGURES[name]
    if fig["kind"] == "level-curves":
        params = {"c": decimal_list(DEFAULT_LEVELS)}
        body = figure_level_curves(params["c"])
    else:
        params = {"a": fig["a"], "m": [1, m_max], "K": K, "family": "Ci"}
        body = figure_delta_plot(fig["a"], (1, m_max), K)
    manifest = RunManifest.create(f"figure {fig['kind']}", params, DEFAULT_MAX_ORDER, reproducible)
    return manifest.header() + body


def main():
    parser = argparse.ArgumentParser(description="Write figure data files")
    parser.add_argument("--only", choices=sorted(FIGURES), help="produce a single figure")
    parser.add_argument("--K", type=int, default=10, help="expansion order for the zero figures")
    parser.add_argument("--m-max", type=int, default=100)
    parser.add_argument("--reproducible", action="store_true",
                        help="omit timestamps so reruns are byte-identical")
    args = parser.parse_args()

    print("🚀 gti-asym figure data")
    print("-" * 40)
    ensure_data_dir()

    logger = RunLogger()
    names = [args.only] if args.only else sorted(FIGURES)
    for name in names:
        start = time.time()
        text = build_figure(name, args.K, args.m_max, args.reproducible)
        path = os.path.join(DATA_DIR, f"{name}.csv")
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        duration = (time.time() - start) * 1000
        logger.log_event("reproduce_figures", "success", duration, meta={"figure": name})
        print(f"✅ Wrote {path} ({duration / 1000:.1f} s)")


if __name__ == "__main__":
    main()
