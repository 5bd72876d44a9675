import math
import sys

import sympy

from backend.exact_algebra import RationalFunction
from backend.lg_coefficients import get_table, verify_plus_family_zero
from backend.oracle import gti_value
from backend.zeros import gen_q


def closed_forms():
    """Printed E_1..E_3 and q_2..q_5, built from exact rational arithmetic."""
    z = RationalFunction.x()
    x = z
    E = {
        1: z / (z - 1) ** 2,
        2: z * (3 * z + 2) / (2 * (z - 1) ** 4),
        3: z * (13 * z * z + 21 * z + 3) / (3 * (z - 1) ** 6),
    }
    w = x * x + 1
    q = {
        2: x * (x * x - 1) / w ** 2,
        3: 4 * x ** 3 * (2 * x * x - 3) / w ** 4,
        4: -2 * x ** 3 * (8 * x ** 6 - 183 * x ** 4 + 336 * x ** 2 - 65) / (3 * w ** 6),
        5: -x ** 3 * (679 * x ** 8 - 8384 * x ** 6 + 17226 * x ** 4 - 7168 * x ** 2 + 431)
        * sympy.Rational(1, 3) / w ** 8,
    }
    return E, q


def run_healthcheck():
    print("🏥 Starting gti-asym Healthcheck (Strict Mode)...\n")
    E_ref, q_ref = closed_forms()

    # 1. Symbolic E coefficients
    print("[1/4] Generating E_1..E_3 (exact)...")
    try:
        table = get_table(12)
        for s, ref in E_ref.items():
            got = table.E_rational(s)
            if got != ref:
                print(f"   ❌ E_{s} mismatch: got {got.to_str()}, expected {ref.to_str()}")
                sys.exit(1)
        print("   ✅ E_1, E_2, E_3 match the closed forms.")
    except Exception as e:
        print(f"   ❌ Coefficient generation failed: {e}")
        sys.exit(1)

    # 2. Zero coefficients
    print("\n[2/4] Generating q_2..q_5 (exact)...")
    try:
        qt = gen_q(5)
        for k, ref in q_ref.items():
            if qt.q[k] != ref:
                print(f"   ❌ q_{k} mismatch: got {qt.q[k].to_str('x')}")
                sys.exit(1)
        print("   ✅ q_2..q_5 match the closed forms.")
    except Exception as e:
        print(f"   ❌ q generation failed: {e}")
        sys.exit(1)

    # 3. Plus family
    print("\n[3/4] Checking plus-family vanishing up to s = 8...")
    check = verify_plus_family_zero(8)
    if not check:
        print(f"   ❌ Plus family does not vanish at s = {check.first_offending}")
        sys.exit(1)
    print("   ✅ F+_s = E+_s = 0 for 1 <= s <= 8.")

    # 4. Oracle against elementary closed forms
    print("\n[4/4] Oracle at a = 1 (Ci = sin x, Si = 1 - cos x)...")
    try:
        worst = 0.0
        for x in (0.5, 3.0, 17.25, 60.0):
            worst = max(worst,
                        abs(gti_value("Ci", 1.0, x) - math.sin(x)),
                        abs(gti_value("Si", 1.0, x) - (1 - math.cos(x))))
        if worst > 1e-12:
            print(f"   ❌ Oracle error {worst:.3e} exceeds 1e-12")
            sys.exit(1)
        print(f"   ✅ Max abs error {worst:.2e}.")
    except Exception as e:
        print(f"   ❌ Oracle Failed: {e}")
        sys.exit(1)

    print("\n✨ HEALTHCHECK PASSED.")


if __name__ == "__main__":
    run_healthcheck()
