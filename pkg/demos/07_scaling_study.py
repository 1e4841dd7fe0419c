"""The sqrt(eps) law of the penalty method.

Minimizing energy + (1/eps) * ||u1 u2 u3||^2 with a feasible competitor shows
||u1 u2 u3|| <= sqrt(eps * E*), so the converged product norm should decay
with slope about one half on a log-log plot against eps.  This script fits
that slope on a desk-scale grid.
"""

import os

from segsolve import PenaltyConfig, run_scaling_study
from segsolve.diagnostics import study_fit_json, study_to_csv
from segsolve.grid import build_grid

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

grid = build_grid(41, 41, (-1, 1, -1, 1))
cfg = PenaltyConfig(epsilon_target=1e-5, scheme="picard", alpha=0.5)
ladder = [1e-2, 1e-3, 1e-4, 1e-5]

study = run_scaling_study(grid, "ex41", ladder, cfg)

print(f"{'epsilon':>10s} {'product_L2':>12s} {'converged':>10s}")
for eps, norm, conv in zip(study.epsilons, study.product_l2, study.converged):
    print(f"{eps:10.1e} {norm:12.4e} {str(conv):>10s}")

print(f"\nlog-log fit: slope {study.slope:.4f} (expected ~0.5), R^2 = {study.r2:.5f}")
if study.inconclusive:
    print("fit flagged inconclusive (R^2 < 0.9)")

study_to_csv(study, os.path.join(OUT, "scaling_study.csv"))
study_fit_json(study, os.path.join(OUT, "scaling_fit.json"))
print(f"study table and fit summary written to {OUT}")
