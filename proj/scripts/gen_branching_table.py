#!/usr/bin/env python3
"""Generate the effective branching table for the 7-level Rb-87 D1 model.

Lumps the 16-level D1 spontaneous-decay strengths (squared dipole matrix
elements, Wigner-Eckart over the hyperfine basis) onto the effective states:

  excited rows:  |3> = (F'=2, m'=+1)
                 |5> = all excited m' != 0   (pi-excited lump, 6 sublevels)
                 |6> = (F'=1, m'=0)
                 |7> = (F'=2, m'=0)
  ground cols:   |1> = (F=1, m=0)
                 |2> = (F=2, m=0)
                 |4> = all ground m != 0     (trap lump, 6 sublevels)

Strengths within a lump are summed with equal sublevel weights, then each row
is normalized to 1.  Exact rational arithmetic throughout; the fixture is
written with 7 significant digits.

Usage: gen_branching_table.py [output-path]
"""

import sys
from fractions import Fraction

from sympy import Rational, sqrt, simplify
from sympy.physics.wigner import clebsch_gordan, wigner_6j

I = Rational(3, 2)   # nuclear spin of Rb-87
J = Rational(1, 2)   # 5S1/2
Jp = Rational(1, 2)  # 5P1/2 (D1)


def decay_strength(Fp, mp, F, m):
    """Relative |<F m|er_q|F' m'>|^2 for spontaneous decay, q = m - m'."""
    q = m - mp
    if abs(q) > 1 or abs(m) > F or abs(mp) > Fp:
        return Rational(0)
    cg = clebsch_gordan(Fp, 1, F, mp, q, m)
    sixj = wigner_6j(J, Jp, 1, Fp, F, I)
    amp2 = cg**2 * (2 * Fp + 1) * (2 * J + 1) * sixj**2
    return simplify(amp2)


GROUND = [(1, m) for m in range(-1, 2)] + [(2, m) for m in range(-2, 3)]
EXCITED = [(1, m) for m in range(-1, 2)] + [(2, m) for m in range(-2, 3)]

ground_lumps = {
    "1": [(1, 0)],
    "2": [(2, 0)],
    "4": [(F, m) for (F, m) in GROUND if m != 0],
}
excited_lumps = {
    "3": [(2, 1)],
    "5": [(F, m) for (F, m) in EXCITED if m != 0],
    "6": [(1, 0)],
    "7": [(2, 0)],
}

# Sanity: the total decay strength out of every excited sublevel is the same.
totals = []
for (Fp, mp) in EXCITED:
    tot = sum(decay_strength(Fp, mp, F, m) for (F, m) in GROUND)
    totals.append(simplify(tot))
assert all(simplify(t - totals[0]) == 0 for t in totals), totals

rows = {}
for ename, esubs in excited_lumps.items():
    raw = {}
    for gname, gsubs in ground_lumps.items():
        s = Rational(0)
        for (Fp, mp) in esubs:
            for (F, m) in gsubs:
                s += decay_strength(Fp, mp, F, m)
        raw[gname] = simplify(s)
    norm = sum(raw.values())
    rows[ename] = {g: simplify(v / norm) for g, v in raw.items()}

out = sys.argv[1] if len(sys.argv) > 1 else "data/branching_d1.txt"
with open(out, "w") as fh:
    fh.write("# Effective branching table b[e][g] for the Rb-87 D1 7-level model.\n")
    fh.write("# Rows: excited effective states; columns: ground effective states.\n")
    fh.write("# Generated by scripts/gen_branching_table.py (exact rationals in\n")
    fh.write("# trailing comment of each row, rounded to 7 significant digits).\n")
    fh.write("level      g1           g2           g4\n")
    for ename in ("3", "5", "6", "7"):
        vals = [rows[ename][g] for g in ("1", "2", "4")]
        nums = "  ".join(f"{float(v):.6e}" for v in vals)
        exact = ", ".join(str(v) for v in vals)
        fh.write(f"e{ename}   {nums}   # exact: {exact}\n")

print("wrote", out)
for ename in ("3", "5", "6", "7"):
    vals = [rows[ename][g] for g in ("1", "2", "4")]
    print(f"e{ename}: " + "  ".join(f"{str(v):>8}" for v in vals),
          " (floats:", "  ".join(f"{float(v):.7g}" for v in vals) + ")")
