"""Pointwise metric projection onto the three-phase segregation set.

A triple is feasible when all entries are nonnegative and at least one is
zero.  The set is the union of three convex faces (k-th entry zero, others
nonnegative); the Euclidean projection onto face k clips negatives and zeroes
entry k, at squared distance ((v_k)+)^2 + sum_i ((v_i)-)^2.  The common
negative-part term makes the best face the one with the smallest positive
part, ties going to the smallest index.  An optional hysteresis tolerance
keeps the previously zeroed index at near-ties to avoid phase flicker.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryTrace
from .grid import Grid, SystemState

__all__ = [
    "ProjectionControls",
    "PhaseAssignment",
    "project_point",
    "project_field",
    "project_stack_interior",
    "face_projections",
    "projection_selftest",
    "assignment_to_csv",
]


@dataclass
class ProjectionControls:
    tau: float = 0.0  # hysteresis tolerance

    def __post_init__(self):
        if self.tau < 0.0:
            raise ValueError("hysteresis tolerance must be >= 0")


@dataclass
class PhaseAssignment:
    """Per-node index (1..3) of the zeroed component; 0 at boundary nodes."""

    grid: Grid
    k: np.ndarray

    def __post_init__(self):
        self.k = np.asarray(self.k, dtype=np.int8)
        if self.k.shape != self.grid.shape:
            raise ValueError("assignment shape does not match grid")


def project_point(v, prev: int | None = None, tau: float = 0.0):
    """Project one triple onto the segregation set.

    Returns (projected 3-array, zeroed index in {1,2,3}).  With prev given,
    the previous index is kept whenever its positive part is within tau of
    the smallest positive part.
    """
    p0 = v[0] if v[0] > 0.0 else 0.0
    p1 = v[1] if v[1] > 0.0 else 0.0
    p2 = v[2] if v[2] > 0.0 else 0.0
    if p0 <= p1:
        k = 0 if p0 <= p2 else 2
    else:
        k = 1 if p1 <= p2 else 2
    if prev is not None:
        pp = (p0, p1, p2)[prev - 1]
        if pp <= (p0, p1, p2)[k] + tau:
            k = prev - 1
    out = np.array([p0, p1, p2])
    out[k] = 0.0
    return out, k + 1


def project_stack_interior(
    values: np.ndarray,
    prev_k: np.ndarray | None = None,
    tau: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized projection of a (3, m, n) block of interior triples.

    prev_k holds previous 1-based indices (0 where undefined).  Returns the
    projected block and the new 1-based index array.
    """
    p = np.maximum(values, 0.0)
    k = np.argmin(p, axis=0)
    if prev_k is not None:
        valid = prev_k > 0
        prev0 = np.where(valid, prev_k - 1, 0).astype(np.intp)
        p_prev = np.take_along_axis(p, prev0[None], axis=0)[0]
        pmin = np.take_along_axis(p, k[None], axis=0)[0]
        keep = valid & (p_prev <= pmin + tau)
        k = np.where(keep, prev0, k)
    out = p.copy()
    np.put_along_axis(out, k[None], 0.0, axis=0)
    return out, (k + 1).astype(np.int8)


def project_field(
    state: SystemState,
    trace: BoundaryTrace,
    prev: PhaseAssignment | None = None,
    controls: ProjectionControls | None = None,
) -> tuple[SystemState, PhaseAssignment]:
    """Project interior nodes; boundary nodes are set to the trace verbatim."""
    grid = state.grid
    if trace.grid != grid:
        raise ValueError("trace grid does not match state grid")
    tau = (controls or ProjectionControls()).tau
    stack = state.stack()
    prev_k = None
    if prev is not None:
        if prev.grid != grid:
            raise ValueError("previous assignment grid does not match")
        prev_k = prev.k[1:-1, 1:-1]
    inner, k_inner = project_stack_interior(stack[:, 1:-1, 1:-1], prev_k, tau)
    out = trace.phi.copy()
    out[:, 1:-1, 1:-1] = inner
    kfull = np.zeros(grid.shape, dtype=np.int8)
    kfull[1:-1, 1:-1] = k_inner
    return SystemState.from_stack(grid, out), PhaseAssignment(grid, kfull)


def face_projections(v) -> tuple[np.ndarray, np.ndarray]:
    """The three explicit face projections of a triple and their squared distances."""
    v = np.asarray(v, dtype=float)
    pos = np.maximum(v, 0.0)
    cands = np.tile(pos, (3, 1))
    np.fill_diagonal(cands, 0.0)
    d2 = np.sum((cands - v[None, :]) ** 2, axis=1)
    return cands, d2


def projection_selftest(count: int, seed: int, tol: float = 1e-12):
    """Compare project_point against face enumeration on seeded random triples.

    Vectors are drawn uniformly from [-1, 2]^3.  Returns (ok, failures) where
    failures lists (vector, got_distance, best_distance, got_k, expected_k).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    vs = rng.uniform(-1.0, 2.0, size=(count, 3))
    failures = []
    for v in vs:
        out, k = project_point(v)
        d2 = float(np.sum((out - v) ** 2))
        _, dists = face_projections(v)
        best = float(dists.min())
        k_expected = int(np.argmin(dists)) + 1
        if abs(d2 - best) > tol or k != k_expected:
            failures.append((v.copy(), d2, best, k, k_expected))
    return not failures, failures


def assignment_to_csv(pa: PhaseAssignment, path) -> None:
    """Write interior assignments as `x,y,k` rows in row-major order."""
    g = pa.grid
    xs, ys = g.xs(), g.ys()
    with open(path, "w", newline="") as fh:
        fh.write("x,y,k\n")
        for j in range(1, g.ny - 1):
            for i in range(1, g.nx - 1):
                fh.write(f"{xs[i]:.17g},{ys[j]:.17g},{int(pa.k[j, i])}\n")
