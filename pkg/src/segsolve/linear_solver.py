"""Interior solves for the weighted Helmholtz problems -lap(u) + (w/eps) u = f.

The five-point stencil with Dirichlet data reduces to a symmetric positive
definite system on the interior nodes,

    (2/hx^2 + 2/hy^2 + w/eps) u_ij
      - (u_(i-1)j + u_(i+1)j)/hx^2 - (u_i(j-1) + u_i(j+1))/hy^2
      = f_ij + boundary-neighbor coupling,

solved matrix-free by conjugate gradients with a Jacobi (diagonal)
preconditioner.  A dense factorization of the same system is provided as an
independent oracle for small grids.  With w = 0 the solve is the discrete
harmonic extension of the boundary data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Grid, ScalarField

__all__ = [
    "HelmholtzProblem",
    "SolverControls",
    "SolveInfo",
    "LinearSolveError",
    "solve_helmholtz",
    "solve_helmholtz_with_info",
    "harmonic_extension",
    "dense_oracle_solve",
    "dense_interior_system",
    "interior_laplacian_matrix",
]

DENSE_ORACLE_CAP = 400


class LinearSolveError(RuntimeError):
    """Raised when CG fails to reach the target residual within its budget."""

    def __init__(self, message: str, iterations: int, rel_residual: float):
        super().__init__(message)
        self.iterations = iterations
        self.rel_residual = rel_residual


@dataclass
class HelmholtzProblem:
    """One component's interior problem -lap(u) + (w/eps) u = f, u = g on the boundary.

    weight and trace are full (ny, nx) arrays; only interior weights and the
    boundary ring of the trace enter the system.  load is an optional interior
    source (zero for the plain penalized equations).
    """

    grid: Grid
    weight: np.ndarray
    epsilon: float
    trace: np.ndarray
    load: np.ndarray | None = None

    def __post_init__(self):
        if isinstance(self.weight, ScalarField):
            self.weight = self.weight.values
        if isinstance(self.trace, ScalarField):
            self.trace = self.trace.values
        self.weight = np.asarray(self.weight, dtype=float)
        self.trace = np.asarray(self.trace, dtype=float)
        if self.weight.shape != self.grid.shape or self.trace.shape != self.grid.shape:
            raise ValueError("weight/trace shape does not match grid")
        if np.any(self.weight < 0.0):
            raise ValueError("Helmholtz weight must be nonnegative")
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")
        if self.load is not None:
            self.load = np.asarray(self.load, dtype=float)
            if self.load.shape != self.grid.shape:
                raise ValueError("load shape does not match grid")


@dataclass
class SolverControls:
    rel_tol: float = 1e-10
    max_iters: int | None = None  # None: 10 * interior node count

    def __post_init__(self):
        if not self.rel_tol > 0.0:
            raise ValueError("rel_tol must be positive")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    def budget(self, grid: Grid) -> int:
        return self.max_iters if self.max_iters is not None else 10 * grid.n_interior


@dataclass
class SolveInfo:
    iterations: int
    rel_residual: float
    converged: bool
    residual_norms: list[float] = field(default_factory=list)


def _interior_rhs(p: HelmholtzProblem) -> np.ndarray:
    g = p.grid
    ax, ay = 1.0 / g.hx**2, 1.0 / g.hy**2
    b = np.zeros((g.ny - 2, g.nx - 2))
    if p.load is not None:
        b += p.load[1:-1, 1:-1]
    b[0, :] += ay * p.trace[0, 1:-1]
    b[-1, :] += ay * p.trace[-1, 1:-1]
    b[:, 0] += ax * p.trace[1:-1, 0]
    b[:, -1] += ax * p.trace[1:-1, -1]
    return b


def _make_apply(p: HelmholtzProblem):
    g = p.grid
    ax, ay = 1.0 / g.hx**2, 1.0 / g.hy**2
    diag = 2.0 * ax + 2.0 * ay + p.weight[1:-1, 1:-1] / p.epsilon

    def apply_op(x: np.ndarray) -> np.ndarray:
        y = diag * x
        y[:, 1:] -= ax * x[:, :-1]
        y[:, :-1] -= ax * x[:, 1:]
        y[1:, :] -= ay * x[:-1, :]
        y[:-1, :] -= ay * x[1:, :]
        return y

    return apply_op, diag


def _assemble_field(p: HelmholtzProblem, interior: np.ndarray) -> ScalarField:
    g = p.grid
    full = np.zeros(g.shape)
    full[0, :] = p.trace[0, :]
    full[-1, :] = p.trace[-1, :]
    full[:, 0] = p.trace[:, 0]
    full[:, -1] = p.trace[:, -1]
    full[1:-1, 1:-1] = interior
    return ScalarField(g, full)


def solve_helmholtz_with_info(
    p: HelmholtzProblem,
    controls: SolverControls | None = None,
    x0: np.ndarray | ScalarField | None = None,
) -> tuple[ScalarField, SolveInfo]:
    """Preconditioned CG solve; returns the field and convergence info.

    The stopping test is on the diagonally preconditioned residual norm
    relative to the preconditioned right-hand side.  x0 (full-shape array or
    field) warm-starts the iteration.
    """
    controls = controls or SolverControls()
    apply_op, diag = _make_apply(p)
    b = _interior_rhs(p)

    bz = float(np.vdot(b, b / diag))
    if bz == 0.0:
        # zero data: unique solution is zero (coefficient is nonnegative)
        info = SolveInfo(0, 0.0, True, [0.0])
        return _assemble_field(p, np.zeros_like(b)), info

    if x0 is None:
        x = np.zeros_like(b)
    else:
        x0v = x0.values if isinstance(x0, ScalarField) else np.asarray(x0, dtype=float)
        x = x0v[1:-1, 1:-1].copy()

    scale = np.sqrt(bz)
    r = b - apply_op(x)
    z = r / diag
    rz = float(np.vdot(r, z))
    res = np.sqrt(max(rz, 0.0)) / scale
    history = [res]
    p_dir = z.copy()
    budget = controls.budget(p.grid)
    iters = 0
    while res > controls.rel_tol and iters < budget:
        ap = apply_op(p_dir)
        alpha = rz / float(np.vdot(p_dir, ap))
        x += alpha * p_dir
        r -= alpha * ap
        z = r / diag
        rz_new = float(np.vdot(r, z))
        res = np.sqrt(max(rz_new, 0.0)) / scale
        history.append(res)
        beta = rz_new / rz
        rz = rz_new
        p_dir = z + beta * p_dir
        iters += 1

    info = SolveInfo(iters, res, res <= controls.rel_tol, history)
    if not info.converged:
        raise LinearSolveError(
            f"CG did not reach rel_tol={controls.rel_tol:g} in {iters} iterations "
            f"(achieved {res:.3e})",
            iterations=iters,
            rel_residual=res,
        )
    return _assemble_field(p, x), info


def solve_helmholtz(
    p: HelmholtzProblem,
    controls: SolverControls | None = None,
    x0: np.ndarray | ScalarField | None = None,
) -> ScalarField:
    fld, _ = solve_helmholtz_with_info(p, controls, x0)
    return fld


def harmonic_extension(
    grid: Grid,
    trace: np.ndarray | ScalarField,
    controls: SolverControls | None = None,
    x0: np.ndarray | ScalarField | None = None,
) -> ScalarField:
    """Field with zero discrete Laplacian at interior nodes matching the trace."""
    tr = trace.values if isinstance(trace, ScalarField) else np.asarray(trace, dtype=float)
    p = HelmholtzProblem(grid, np.zeros(grid.shape), 1.0, tr)
    return solve_helmholtz(p, controls, x0)


def _interior_index(grid: Grid):
    m, n = grid.ny - 2, grid.nx - 2
    return lambda j, i: j * n + i, m, n


def dense_interior_system(p: HelmholtzProblem) -> tuple[np.ndarray, np.ndarray]:
    """Dense matrix and right-hand side of the reduced interior system."""
    g = p.grid
    idx, m, n = _interior_index(g)
    ax, ay = 1.0 / g.hx**2, 1.0 / g.hy**2
    N = m * n
    A = np.zeros((N, N))
    for j in range(m):
        for i in range(n):
            k = idx(j, i)
            A[k, k] = 2.0 * ax + 2.0 * ay + p.weight[j + 1, i + 1] / p.epsilon
            if i > 0:
                A[k, idx(j, i - 1)] = -ax
            if i < n - 1:
                A[k, idx(j, i + 1)] = -ax
            if j > 0:
                A[k, idx(j - 1, i)] = -ay
            if j < m - 1:
                A[k, idx(j + 1, i)] = -ay
    b = _interior_rhs(p).ravel()
    return A, b


def interior_laplacian_matrix(grid: Grid) -> np.ndarray:
    """Dense matrix of the negative discrete Laplacian on interior nodes."""
    p = HelmholtzProblem(grid, np.zeros(grid.shape), 1.0, np.zeros(grid.shape))
    A, _ = dense_interior_system(p)
    return A


def dense_oracle_solve(p: HelmholtzProblem) -> ScalarField:
    """Direct factorization solve of the reduced system (test oracle).

    Capped at DENSE_ORACLE_CAP interior nodes; singularity is reported even
    though it cannot occur for nonnegative weights.
    """
    if p.grid.n_interior > DENSE_ORACLE_CAP:
        raise ValueError(
            f"dense oracle limited to {DENSE_ORACLE_CAP} interior nodes, "
            f"got {p.grid.n_interior}"
        )
    A, b = dense_interior_system(p)
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise LinearSolveError(f"singular reduced system: {exc}", 0, np.inf) from exc
    return _assemble_field(p, x.reshape(p.grid.ny - 2, p.grid.nx - 2))
