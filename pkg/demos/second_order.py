"""Quadratic relations of both N^2-dimensional calculi on Sp_q(4) at q = 4.

Runs the full suite chain and prints the dimension bookkeeping that
distinguishes the universal exterior algebra from the second
antisymmetrizer algebra.
"""
from __future__ import annotations

from qext import NumericField, SUITES, Context, run_suite

for sign in ("plus", "minus"):
    ctx = Context.build("sp", 4, sign, NumericField(2))
    done = {}
    for name in SUITES:
        if name == ("sr_minus" if sign == "plus" else "sr_plus"):
            continue
        done[name] = run_suite(name, ctx, done)
    th = done["theorem"]
    print(f"calculus {sign}:")
    for name, rep in done.items():
        print(f"  {name:14s} {'pass' if rep.passed else 'FAIL'}"
              f"  ({len(rep.failures())} failing of {len(rep.checks)})")
    print("  ", th.get("dim Omega2_u,l - dim Omega2_s,l = 1").witness)
