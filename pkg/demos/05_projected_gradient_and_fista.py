"""Projected gradient descent, plain and accelerated.

Both methods take explicit heat-flow steps and project onto the segregation
set pointwise, so every iterate satisfies the constraint exactly.  The
accelerated variant adds Nesterov momentum with backtracking on the energy
surrogate; it needs noticeably fewer iterations at the same tolerance.
"""

from segsolve import FistaConfig, PgdConfig, fista_run, pgd_run
from segsolve.grid import build_grid, interior_product_max

grid = build_grid(51, 51, (-1, 1, -1, 1))

state_p, rep_p = pgd_run(grid, "bc4", PgdConfig())
state_f, rep_f = fista_run(grid, "bc4", FistaConfig())

print(f"{'method':8s} {'iters':>7s} {'energy':>10s} {'interior max|u1u2u3|':>22s}")
print(f"{'pgd':8s} {rep_p.iters:7d} {rep_p.final_energy:10.6f} "
      f"{interior_product_max(state_p):22.1e}")
print(f"{'fista':8s} {rep_f.iters:7d} {rep_f.final_energy:10.6f} "
      f"{interior_product_max(state_f):22.1e}")

print("\nenergy decrease (every 200th recorded value, fista):")
energies = [h["energy"] for h in rep_f.history]
for i in range(0, len(energies), max(1, len(energies) // 8)):
    print(f"  iter {i + 1:6d}: {energies[i]:.8f}")

restarts = rep_f.meta["restarts"]
print(f"\nfista restarts: {restarts}; recorded energy sequence is nonincreasing by construction")
