#!/usr/bin/env python3
"""Solve a fixed-format MPS file with scipy's HiGHS-backed MILP solver and
print the optimal objective value.

Used by the test suite to cross-check exported models against an external
solver. Supports the subset of MPS this project emits: OBJSENSE, N/L/G/E
rows, INTORG/INTEND markers, RHS, and BV/FR/MI/LO/UP/FX bounds.
"""

import sys

import numpy as np
from scipy.optimize import LinearConstraint, milp


def parse(path):
    sense = 1.0  # minimize by default
    rows = {}
    row_order = []
    obj_row = None
    cols = {}
    col_order = []
    integrality = {}
    rhs = {}
    bounds = {}
    section = None
    in_integer = False

    with open(path) as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("*"):
                continue
            head = line.split()
            if line[0] not in " \t":
                section = head[0]
                continue
            if section == "OBJSENSE":
                sense = -1.0 if head[0].upper() == "MAX" else 1.0
            elif section == "ROWS":
                kind, name = head[0], head[1]
                if kind == "N":
                    obj_row = name
                else:
                    rows[name] = kind
                    row_order.append(name)
            elif section == "COLUMNS":
                if len(head) >= 3 and head[1] == "'MARKER'":
                    in_integer = head[2] == "'INTORG'"
                    continue
                name = head[0]
                if name not in cols:
                    cols[name] = {}
                    col_order.append(name)
                    integrality[name] = 1 if in_integer else 0
                    if in_integer:
                        bounds.setdefault(name, [0.0, 1.0])
                for rname, value in zip(head[1::2], head[2::2]):
                    cols[name][rname] = cols[name].get(rname, 0.0) + float(value)
            elif section == "RHS":
                for rname, value in zip(head[1::2], head[2::2]):
                    rhs[rname] = float(value)
            elif section == "BOUNDS":
                kind, _, name = head[0], head[1], head[2]
                value = float(head[3]) if len(head) > 3 else 0.0
                b = bounds.setdefault(name, [0.0, np.inf])
                if kind == "UP":
                    b[1] = value
                elif kind == "LO":
                    b[0] = value
                elif kind == "FX":
                    b[0] = b[1] = value
                elif kind == "FR":
                    b[0], b[1] = -np.inf, np.inf
                elif kind == "MI":
                    b[0] = -np.inf
                elif kind == "BV":
                    b[0], b[1] = 0.0, 1.0
                    integrality[name] = 1

    n = len(col_order)
    c = np.zeros(n)
    for j, name in enumerate(col_order):
        c[j] = sense * cols[name].get(obj_row, 0.0)

    a = np.zeros((len(row_order), n))
    lo = np.zeros(len(row_order))
    hi = np.zeros(len(row_order))
    for i, rname in enumerate(row_order):
        for j, name in enumerate(col_order):
            a[i, j] = cols[name].get(rname, 0.0)
        b = rhs.get(rname, 0.0)
        kind = rows[rname]
        if kind == "L":
            lo[i], hi[i] = -np.inf, b
        elif kind == "G":
            lo[i], hi[i] = b, np.inf
        else:
            lo[i], hi[i] = b, b

    integ = np.array([integrality[name] for name in col_order])
    blo = np.array([bounds.get(name, [0.0, np.inf])[0] for name in col_order])
    bhi = np.array([bounds.get(name, [0.0, np.inf])[1] for name in col_order])
    return c, a, lo, hi, integ, blo, bhi, sense


def main():
    path = sys.argv[1]
    c, a, lo, hi, integ, blo, bhi, sense = parse(path)
    constraints = LinearConstraint(a, lo, hi) if a.size else ()
    from scipy.optimize import Bounds

    res = milp(
        c,
        constraints=constraints,
        integrality=integ,
        bounds=Bounds(blo, bhi),
        options={"mip_rel_gap": 1e-9},
    )
    if not res.success:
        print(f"STATUS {res.status} {res.message}", file=sys.stderr)
        sys.exit(3)
    print(f"{sense * res.fun:.12g}")


if __name__ == "__main__":
    main()
