"""Grids, discrete operators, and harmonic extensions.

Builds a small benchmark grid, checks the five-point Laplacian on fields with
known Laplacians, and computes the harmonic extension of one boundary data
set, which is how every solver in this package initializes.
"""

from segsolve import (
    ScalarField,
    apply_laplacian,
    build_grid,
    builtin_config,
    evaluate_bc,
    harmonic_extension,
)
from segsolve.grid import SystemState, dirichlet_energy

grid = build_grid(41, 41, (-1, 1, -1, 1))
print(f"grid: {grid.nx} x {grid.ny} nodes, spacing {grid.hx:.3g} x {grid.hy:.3g}")
print(f"interior nodes: {grid.n_interior}")

# the stencil reproduces constant, linear, and quadratic Laplacians
for name, fn, expected in [
    ("constant", lambda x, y: 0.0 * x + 3.0, 0.0),
    ("linear x", lambda x, y: x, 0.0),
    ("quadratic x^2", lambda x, y: x * x, 2.0),
]:
    lap = apply_laplacian(grid, ScalarField.from_function(grid, fn))
    inner = lap.values[1:-1, 1:-1]
    print(f"laplacian of {name:14s}: interior range [{inner.min():+.2e}, {inner.max():+.2e}]"
          f"  (expected {expected})")

# harmonic extension of the two-lobe + constant-collar boundary data
trace = evaluate_bc(builtin_config("ex41"), grid)
components = [harmonic_extension(grid, trace.phi[k]) for k in range(3)]
state = SystemState(*components)
print(f"\nharmonic extension of ex41 data:")
print(f"  energy          : {dirichlet_energy(state):.6f}")
print(f"  u3 is constant  : min {components[2].values.min():.3f}, "
      f"max {components[2].values.max():.3f}  (its data is 0.25 everywhere)")
print(f"  u1 range        : [{components[0].values.min():.3f}, {components[0].values.max():.3f}]")
