"""
Freeze extended-precision reference values for H_0^(1) and H_1^(1).

Values come from the ascending series of J_0, Y_0, J_1, Y_1 summed in mpmath
with enough guard digits to absorb the cancellation (about (|z| + Im z)/ln 10
digits), and are cross-checked against mpmath.hankel1 at higher precision.

    python3 scripts/hankel_oracle.py  # rewrites src/tfscatter/data/hankel_reference.json
"""

import json
import math
from pathlib import Path

import mpmath as mp
import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "tfscatter" / "data" / "hankel_reference.json"


def series_h01(z):
    """Ascending-series H0, H1 at the current mpmath precision."""
    z = mp.mpc(z)
    q = -z * z / 4
    term = mp.mpc(1)
    j0 = j1 = y0 = y1 = mp.mpc(0)
    hk = mp.mpf(0)
    k = 0
    tiny = mp.mpf(10) ** (-mp.mp.dps - 5)
    while True:
        t1 = term / (k + 1)
        hk1 = hk + mp.mpf(1) / (k + 1)
        j0 += term
        y0 -= hk * term
        j1 += t1
        y1 += (hk + hk1) * t1
        if k > 2 * abs(z) and abs(term) < tiny:
            break
        hk = hk1
        term *= q / ((k + 1) ** 2)
        k += 1
    half = z / 2
    lg = mp.log(half) + mp.euler
    j1 *= half
    Y0 = 2 / mp.pi * (lg * j0 + y0)
    Y1 = -2 / (mp.pi * z) + 2 / mp.pi * lg * j1 - half * y1 / mp.pi
    return j0 + 1j * Y0, j1 + 1j * Y1


def reference(z, guard=30):
    digits = (abs(z) + z.imag) / math.log(10)
    with mp.workdps(int(guard + 20 + digits)):
        h0, h1 = series_h01(z)
        out = complex(h0), complex(h1)
    with mp.workdps(int(guard + 40 + digits)):
        c0 = complex(mp.hankel1(0, mp.mpc(z)))
        c1 = complex(mp.hankel1(1, mp.mpc(z)))
    for a, b in ((out[0], c0), (out[1], c1)):
        if abs(a - b) > 1e-15 * abs(b):
            raise RuntimeError(f"oracle disagreement at {z}: {a} vs {b}")
    return out


def main():
    mods = np.logspace(-3, 2, 25)
    args = np.linspace(0.0, np.pi / 2, 20)
    grid = [complex(r * np.cos(a), r * np.sin(a)) for r in mods for a in args]
    # pin the endpoints of the argument range exactly
    grid = [complex(z.real if abs(z.real) > 1e-300 and a < np.pi / 2 else 0.0,
                    z.imag if a > 0 else 0.0)
            for z, a in zip(grid, np.tile(args, len(mods)))]
    extra = [1.0 + 0j, 10.0 + 0j, 2.0 + 0.05j, 2.0 + 0j]
    points = []
    for z in grid + extra:
        h0, h1 = reference(z)
        points.append([z.real, z.imag, h0.real, h0.imag, h1.real, h1.imag])
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({
        "description": "H0, H1 of the first kind; columns re z, im z, re h0, im h0, re h1, im h1",
        "grid_points": len(grid),
        "values": points,
    }, indent=0))
    print(f"wrote {len(points)} reference values to {OUT}")


if __name__ == "__main__":
    main()
