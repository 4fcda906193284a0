"""The O_q(3) case of the Gamma_+ argument.

For O_q(3) one has rhat = q^2, so the factor q^-2 rhat - q^2 rhat^-1 of the
coefficient determinant vanishes identically.  The two quadratic elements
Q and QU^+ then only reach eta^+, and a direct computation over all
relation-ideal elements of degree <= 2 does not reach eta^- either.
"""
from __future__ import annotations

from qext import SYMBOLIC, Context
from qext.verify import relation_image, run_suite

ctx = Context.build("o", 3, "plus", SYMBOLIC)
cs = ctx.qd.consts
print("rhat =", cs.rhat)
print("q^-2 rhat - q^2 rhat^-1 =", cs.rhat / cs.q ** 2 - cs.q ** 2 * cs.rhatm)

rep = run_suite("sr_plus", ctx)
for c in rep.checks:
    print(f"  {c.status:5s} {c.name}" + (f"  -- {c.witness}" if c.witness else ""))

img = relation_image(ctx)
gens = list(ctx.calc.adj_action_2.values())
closure = img.copy()
frontier = list(img.basis)
while frontier:
    frontier = [w for v in frontier for g in gens if closure.add(w := g @ v)]
print("dim S(R, deg <= 2):", img.dim, " after closing under the action:", closure.dim)
for t in "+-0":
    print(f"  eta^{t} contained: {closure.contains(ctx.calc.eta_tau(t))}")
