"""Build and certify the braid matrix of O_q(3), then split it into projectors."""
from __future__ import annotations

from qext import SYMBOLIC, build_qdata, group_spec
from qext.qdata import build_metric, certify_rhat

spec = group_spec("o", 3)
qd = build_qdata(spec, SYMBOLIC)
cs = qd.consts
print(f"group {spec.short}: rhat = {cs.rhat}, x = {cs.x}")
print(f"certified convention variant (lower, flip) = {qd.variant}")

report = certify_rhat(qd.R, build_metric(spec), stop_early=False)
for name, ok in report.checks.items():
    print(f"  {'ok ' if ok else 'BAD'} {name}")

print("projector ranks (+, -, 0):", qd.P.ranks)
print("nonzero entries of rhat:", qd.R.nonzero_count())
