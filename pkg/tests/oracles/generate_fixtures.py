"""Regenerate the frozen special-function fixtures in tests/fixtures/.

Run from the repository root:

    python3 tests/oracles/generate_fixtures.py

Faddeeva values come from the series/continued-fraction reference and are
cross-checked against mpmath's own erfc before anything is written, so a
bug in the reference cannot silently poison the fixtures.  Moshinsky
values come from the propagator-integral quadrature, evaluated at two
working precisions that must agree.
"""

import csv
import pathlib
import random
import sys

import mpmath as mp

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1]))

from oracles.faddeeva_reference import faddeeva_erfc_crosscheck, faddeeva_reference
from oracles.moshinsky_quadrature import moshinsky_quadrature

FIXTURES = pathlib.Path(__file__).resolve().parents[1] / "fixtures"

LAMBDA_TILDE = 0.56037006  # m*lambda/hbar^2 for lambda = 4.27 eV A, electron mass
K_STANDARD = 0.1449  # A^-1, incidence wavenumber at E = 0.08 eV

# (x, q, t) anchors for the Moshinsky evaluator: pre/post front, both wave
# directions, the bound-state pole, both resonance quadrants, and one point
# in the exponentially growing first-quadrant regime.
MOSHINSKY_POINTS = [
    (0.0, K_STANDARD, 0.01),
    (0.0, K_STANDARD, 1.0),
    (0.0, -K_STANDARD, 1.0),
    (10.0, K_STANDARD, 0.01),
    (50.0, K_STANDARD, 1e-5),
    (1000.0, K_STANDARD, 0.55),
    (1000.0, K_STANDARD, 0.75),
    (5.0, LAMBDA_TILDE * 1j, 0.05),
    (0.0, LAMBDA_TILDE * 1j, 0.2),
    (2.0, -0.2 - 0.3j, 0.02),
    (2.0, 0.2 - 0.3j, 0.02),
    (1.0, 0.1 + 0.05j, 0.5),
    (0.02, K_STANDARD, 0.001),
]


def _fmt(v):
    return format(float(v), ".17e")


def write_faddeeva_fixunits():
    rng = random.Random(20240817)
    box = [complex(rng.uniform(-6, 6), rng.uniform(-6, 6)) for _ in range(1000)]

    large = []
    while len(large) < 100:
        r = 10.0 ** rng.uniform(1.0, 4.0)
        phi = rng.uniform(-3.14159, 3.14159)
        z = complex(r * mp.cos(phi), r * mp.sin(phi))
        # keep w(z) representable in double precision
        if z.imag < 0 and (z.imag**2 - z.real**2) > 600.0:
            continue
        large.append(z)

    for name, points in (("faddeeva_box.csv", box), ("faddeeva_large.csv", large)):
        rows = []
        for z in points:
            w = faddeeva_reference(z, dps=40)
            chk = faddeeva_erfc_crosscheck(z, dps=40)
            rel = abs(w - chk) / abs(chk)
            if rel > mp.mpf("1e-30"):
                raise RuntimeError(f"reference disagreement at z={z}: {rel}")
            rows.append((z.real, z.imag, float(mp.re(w)), float(mp.im(w))))
        path = FIXTURES / name
        with open(path, "w", newline="\n") as fh:
            fh.write("# Faddeeva reference values, series/continued-fraction oracle"
                     " at 40 significant digits\n")
            writer = csv.writer(fh)
            writer.writerow(["re_z", "im_z", "re_w", "im_w"])
            for r in rows:
                writer.writerow([_fmt(v) for v in r])
        print(f"wrote {path} ({len(rows)} rows)")


def write_moshinsky_fixtures():
    rows = []
    for (x, q, t) in MOSHINSKY_POINTS:
        m30 = moshinsky_quadrature(x, q, t, dps=30)
        m45 = moshinsky_quadrature(x, q, t, dps=45)
        rel = abs(m30 - m45) / abs(m45)
        if rel > mp.mpf("1e-24"):
            raise RuntimeError(f"quadrature not converged at {(x, q, t)}: {rel}")
        qc = complex(q)
        rows.append((x, qc.real, qc.imag, t, float(mp.re(m45)), float(mp.im(m45))))
    path = FIXTURES / "moshinsky_quadrature.csv"
    with open(path, "w", newline="\n") as fh:
        fh.write("# Moshinsky kernel values from propagator-integral quadrature"
                 " (electron-mass unit system)\n")
        writer = csv.writer(fh)
        writer.writerow(["x", "re_q", "im_q", "t", "re_m", "im_m"])
        for r in rows:
            writer.writerow([_fmt(v) for v in r])
    print(f"wrote {path} ({len(rows)} rows)")


if __name__ == "__main__":
    FIXTURES.mkdir(parents=True, exist_ok=True)
    write_faddeeva_fixunits()
    write_moshinsky_fixtures()
