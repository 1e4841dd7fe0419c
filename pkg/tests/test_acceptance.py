"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Heavy runs are shared through session fixtures: criteria 6 and 7 use one
projected-gradient run at n = 201, and criteria 8 and 10 use two CLI
benchmark executions at n = 101.  Expect the full module to take roughly
half an hour; run it with `pytest tests/test_acceptance.py -v -s`.
"""

import json
import subprocess
import time

import numpy as np
import pytest

from segsolve.boundary import builtin_config, evaluate_bc, sup_bound
from segsolve.contours import extract_field_contours
from segsolve.diagnostics import RegionSpec, build_region_mask, run_scaling_study
from segsolve.grid import build_grid, interior_product_max, region_mean
from segsolve.linear_solver import HelmholtzProblem, dense_oracle_solve, solve_helmholtz
from segsolve.penalty import PenaltyConfig, run_penalty
from segsolve.projected_gradient import PgdConfig, pgd_run
from segsolve.projection import face_projections, project_point

SQUARE = (-1.0, 1.0, -1.0, 1.0)
NINE_BCS = [f"bc{k}" for k in range(1, 10)]


def report(num, ok, detail):
    print(f"criterion {num:2d} [{'PASS' if ok else 'FAIL'}] {detail}")
    assert ok, f"criterion {num}: {detail}"


@pytest.fixture(scope="session")
def pgd_ex41_n201():
    """Criteria 6 and 7 share this projected-gradient run (about 8 minutes)."""
    grid = build_grid(201, 201, SQUARE)
    t0 = time.perf_counter()
    state, run_report = pgd_run(grid, "ex41", PgdConfig())
    return grid, state, run_report, time.perf_counter() - t0


@pytest.fixture(scope="session")
def fista_bench_dirs(tmp_path_factory):
    """Criteria 8 and 10 share two deterministic CLI benchmark sweeps."""
    dirs = []
    for tag in ("first", "second"):
        out = tmp_path_factory.mktemp(f"bench_{tag}")
        res = subprocess.run(
            [
                "segsolve", "bench", "--algos", "fista", "--n", "101",
                "--deterministic", "--out", str(out),
            ],
            capture_output=True,
            text=True,
        )
        assert res.returncode in (0, 2), res.stderr
        dirs.append(out)
    return dirs


def test_criterion_1_projection_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240901)
    vs = rng.uniform(-1.0, 2.0, size=(100000, 3))
    worst = 0.0
    ok = True
    for v in vs:
        out, k = project_point(v)
        d2 = float(np.sum((out - v) ** 2))
        _, dists = face_projections(v)
        worst = max(worst, abs(d2 - float(dists.min())))
        if abs(d2 - float(dists.min())) > 1e-12 or k != int(np.argmin(dists)) + 1:
            ok = False
            break
    elapsed = time.perf_counter() - t0
    report(1, ok, f"1e5 random projections, worst distance gap {worst:.2e}, {elapsed:.1f}s")


def test_criterion_2_maximum_principle_suite():
    t0 = time.perf_counter()
    grid = build_grid(51, 51, SQUARE)
    failures = []
    for bc_id in NINE_BCS:
        trace = evaluate_bc(builtin_config(bc_id), grid)
        bound = sup_bound(trace)
        for scheme in ("picard", "gauss_seidel", "semi_implicit"):
            lo, hi = [0.0], [0.0]

            def watch(eps, it, stack):
                lo[0] = min(lo[0], float(stack.min()))
                hi[0] = max(hi[0], float(stack.max()))

            cfg = PenaltyConfig(epsilon_target=1e-4, scheme=scheme)
            run_penalty(grid, trace, cfg, iterate_hook=watch)
            if lo[0] < -1e-10 or hi[0] > bound + 1e-10:
                failures.append((bc_id, scheme, lo[0], hi[0]))
    elapsed = time.perf_counter() - t0
    report(
        2,
        not failures,
        f"9 configs x 3 schemes at n=51, eps=1e-4, iterate bounds within "
        f"[-1e-10, M+1e-10]; failures={failures or 'none'}, {elapsed:.0f}s",
    )


def test_criterion_3_comparison_principle():
    t0 = time.perf_counter()
    grid = build_grid(17, 17, SQUARE)
    rng = np.random.default_rng(7)
    b = grid.boundary_mask()
    worst = 0.0
    for _ in range(50):
        c1 = rng.uniform(0.0, 20.0, grid.shape)
        c2 = c1 + rng.uniform(0.0, 20.0, grid.shape)
        tr = np.zeros(grid.shape)
        tr[b] = rng.uniform(0.0, 1.0, grid.shape)[b]
        u1 = solve_helmholtz(HelmholtzProblem(grid, c1, 1.0, tr)).values
        u2 = solve_helmholtz(HelmholtzProblem(grid, c2, 1.0, tr)).values
        worst = max(worst, float((u2 - u1).max()))
    elapsed = time.perf_counter() - t0
    report(3, worst <= 1e-10, f"50 coefficient pairs, worst u(c2)-u(c1) = {worst:.2e}, {elapsed:.1f}s")


def test_criterion_4_linear_solver_oracle():
    t0 = time.perf_counter()
    grid = build_grid(9, 9, SQUARE)
    rng = np.random.default_rng(11)
    b = grid.boundary_mask()
    worst = 0.0
    for _ in range(100):
        w = rng.uniform(0.0, 3.0, grid.shape)
        tr = np.zeros(grid.shape)
        tr[b] = rng.uniform(0.0, 1.0, grid.shape)[b]
        eps = 10.0 ** rng.uniform(-4.0, 0.0)
        p = HelmholtzProblem(grid, w, eps, tr)
        diff = np.abs(solve_helmholtz(p).values - dense_oracle_solve(p).values).max()
        worst = max(worst, float(diff))

    g3 = build_grid(3, 3, SQUARE)
    tr3 = np.zeros(g3.shape)
    tr3[0, 1], tr3[-1, 1], tr3[1, 0], tr3[1, -1] = 0.3, 0.7, 0.2, 0.4
    w3 = np.zeros(g3.shape)
    w3[1, 1] = 2.0
    u = solve_helmholtz(HelmholtzProblem(g3, w3, 0.5, tr3)).values[1, 1]
    closed = (0.3 + 0.7 + 0.2 + 0.4) / (4.0 + 2.0 / 0.5)
    closed_err = abs(u - closed)
    elapsed = time.perf_counter() - t0
    report(
        4,
        worst <= 1e-8 and closed_err <= 1e-12,
        f"100 random 9x9 problems, worst CG-vs-dense {worst:.2e}; "
        f"single-node closed form error {closed_err:.2e}, {elapsed:.1f}s",
    )


def test_criterion_5_sqrt_epsilon_scaling():
    t0 = time.perf_counter()
    grid = build_grid(101, 101, SQUARE)
    cfg = PenaltyConfig(epsilon_target=1e-5, scheme="picard", alpha=0.5)
    study = run_scaling_study(grid, "ex41", [1e-2, 1e-3, 1e-4, 1e-5], cfg)
    elapsed = time.perf_counter() - t0
    ok = 0.35 <= study.slope <= 0.65 and all(study.converged)
    report(
        5,
        ok,
        f"ex41 n=101 ladder 1e-2..1e-5: log-log slope {study.slope:.4f} "
        f"(R^2={study.r2:.4f}), {elapsed:.0f}s",
    )


def test_criterion_6_pgd_feasibility_and_termination(pgd_ex41_n201):
    grid, state, run_report, elapsed = pgd_ex41_n201
    violations_ok = all(h["violation_max"] == 0.0 for h in run_report.history)
    violations_ok = violations_ok and interior_product_max(state) == 0.0
    energies = [h["energy"] for h in run_report.history]
    mono_ok = all(b <= a + 1e-15 for a, b in zip(energies[10:], energies[11:]))
    conv_ok = run_report.converged and run_report.iters <= 50000
    last_step = run_report.history[-1]["step_norm"]
    report(
        6,
        violations_ok and mono_ok and conv_ok,
        f"ex41 n=201 PGD: interior violation exactly 0: {violations_ok}; "
        f"energy nonincreasing after iter 10: {mono_ok}; converged in "
        f"{run_report.iters} iters (cap 50000): {conv_ok} "
        f"(final step norm {last_step:.2e}, tol 1e-8), {elapsed:.0f}s",
    )


def test_criterion_7_inner_square_mean(pgd_ex41_n201):
    grid, state, _, _ = pgd_ex41_n201
    mask = build_region_mask(grid, RegionSpec("inner_square", a=0.3))
    mean = region_mean(state.u3, mask)
    ok = 0.028 <= mean <= 0.068
    report(7, ok, f"ex41 n=201 PGD: mean u3 over [-0.3,0.3]^2 = {mean:.4f}, band [0.028, 0.068]")


def test_criterion_8_fista_benchmark_sweep(fista_bench_dirs):
    out = fista_bench_dirs[0]
    failures = []
    for bc_id in NINE_BCS:
        rep = json.loads((out / "fista" / bc_id / "report.json").read_text())
        energies = [h["energy"] for h in rep["history"]]
        mono = all(b <= a + 1e-15 for a, b in zip(energies, energies[1:]))
        steps = [h["step_norm"] for h in rep["history"] if h["step_norm"] is not None]
        converged = rep["converged"] and rep["iters"] <= 20000 and steps[-1] < 1e-8
        if not (converged and mono):
            failures.append((bc_id, rep["iters"], f"{steps[-1]:.2e}", mono))
    report(
        8,
        not failures,
        "nine configs at n=101 (alpha0=0.03h^2, rho=0.5, eta=0.2, tau=1e-10): "
        f"step norm < 1e-8 within 20000 iters with nonincreasing energy; "
        f"failures={failures or 'none'}",
    )


def test_criterion_9_interface_extraction_exactness():
    t0 = time.perf_counter()
    grid = build_grid(101, 101, SQUARE)
    X, Y = grid.meshgrid()
    polys = extract_field_contours(grid, X, 0.5)
    line_dev = max(float(np.abs(p[:, 0] - 0.5).max()) for p in polys)

    grid_r = build_grid(81, 81, SQUARE)
    Xr, Yr = grid_r.meshgrid()
    polys_r = extract_field_contours(grid_r, 1.0 - (Xr**2 + Yr**2), 0.75)
    rad_dev = max(
        float(np.abs(np.hypot(p[:, 0], p[:, 1]) - 0.5).max()) for p in polys_r
    )
    elapsed = time.perf_counter() - t0
    ok = line_dev <= 1e-12 and rad_dev <= grid_r.hx
    report(
        9,
        ok,
        f"line contour x-deviation {line_dev:.2e} (tol 1e-12); radial deviation "
        f"{rad_dev:.3e} (tol h={grid_r.hx}), {elapsed:.2f}s",
    )


def test_criterion_10_deterministic_artifacts(fista_bench_dirs):
    first, second = fista_bench_dirs
    compared = 0
    mismatched = []
    for bc_id in NINE_BCS:
        for name in ("report.json", "contours.svg"):
            a = (first / "fista" / bc_id / name).read_bytes()
            b = (second / "fista" / bc_id / name).read_bytes()
            compared += 1
            if a != b:
                mismatched.append(f"{bc_id}/{name}")
    if (first / "fista_sheet.svg").read_bytes() != (second / "fista_sheet.svg").read_bytes():
        mismatched.append("fista_sheet.svg")
    compared += 1
    report(
        10,
        not mismatched,
        f"two --deterministic bench sweeps: {compared} report/SVG files compared, "
        f"mismatches={mismatched or 'none'}",
    )
