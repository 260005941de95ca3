"""Acceptance criteria; each test records one PASS/FAIL line in the terminal summary.

The lines are printed in an "acceptance criteria" section after the run.
Criteria marked ``slow`` take tens of seconds.
"""
import time
from fractions import Fraction

import numpy as np
import pytest

from zakai_rbf import (
    apply_L0,
    apply_Lk,
    build_propagators,
    cardinal_derivative_row,
    generate_wendland,
    get_model,
    interpolate,
    radius_schedule,
    uniform_grid_1d,
)
from zakai_rbf import experiments as ex
from zakai_rbf.config import default_config
from zakai_rbf.models import Jet
from zakai_rbf.solver import march, run

from conftest import default_system
from test_kernels import PUBLISHED

TABLE_R = {16: 2.0159, 32: 3.5919, 64: 6.4000}
TABLE_FILL = {16: 0.0274, 32: 0.0221, 64: 0.0172}


@pytest.fixture(scope="module")
def table_rows():
    """N=32, n in {64, 1024}, S=500 coupled samples with the shipped defaults."""
    cfg = default_config()
    cfg.grid.N = [32]
    cfg.time.n = [64, 1024]
    t0 = time.perf_counter()
    rows = {r.n: r for r in ex.rmse_experiment(cfg)}
    return rows, time.perf_counter() - t0


def test_c1_wendland_regeneration(acceptance_report):
    t0 = time.perf_counter()
    worst = 0.0
    for (d, tau), (k, q) in PUBLISHED.items():
        power, cof = generate_wendland(d, tau).factored()
        assert power == k
        ratios = [Fraction(c) / p for c, p in zip(cof, q)]
        assert len(cof) == len(q) and ratios[0] > 0
        worst = max(worst, max(float(abs(r / ratios[0] - 1)) for r in ratios))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-12 and elapsed < 1.0
    acceptance_report("C1 Wendland regeneration", ok, f"max rel dev {worst:.1e}, {elapsed:.3f}s")
    assert ok


def test_c2_radius_schedule(acceptance_report):
    t0 = time.perf_counter()
    got = {N: radius_schedule(N, 4) for N in TABLE_R}
    elapsed = time.perf_counter() - t0
    ok = all(abs(got[N] - TABLE_R[N]) <= 1e-3 for N in TABLE_R) and elapsed < 1.0
    acceptance_report("C2 R schedule", ok, ", ".join(f"R({N})={got[N]:.4f}" for N in got))
    assert ok


def test_c3_fill_distance_column(acceptance_report):
    t0 = time.perf_counter()
    got = {N: uniform_grid_1d(N, radius_schedule(N, 4)).fill ** 2.5 for N in TABLE_FILL}
    elapsed = time.perf_counter() - t0
    ok = all(abs(got[N] - TABLE_FILL[N]) <= 1e-3 for N in TABLE_FILL) and elapsed < 1.0
    acceptance_report("C3 fill^2.5", ok, ", ".join(f"N={N}: {got[N]:.4f}" for N in got))
    assert ok


@pytest.mark.slow
def test_c4_iota_stability(acceptance_report):
    cfg = default_config()
    assert cfg.kernel.tau == 4 and cfg.kernel.d == 1
    t0 = time.perf_counter()
    recs = ex.iota_sweep(cfg, N_max=512)
    elapsed = time.perf_counter() - t0
    bad = [r["N"] for r in recs if not r["ok"]]
    margin = min(r["bound"] - r["iota"] for r in recs)
    ok = not bad and len(recs) == 511 and elapsed < 600
    acceptance_report(
        "C4 iota(N) < 5/sep for N=2..512",
        ok,
        f"scale={cfg.kernel.scale}, min margin {margin:.2f}, failures {bad[:5]}, {elapsed:.1f}s",
    )
    assert ok


@pytest.mark.slow
def test_c5_collocation_rmse_band(table_rows, acceptance_report):
    rows, elapsed = table_rows
    r = rows[1024]
    ok = r.status == "ok" and 0.015 <= r.rmse <= 0.04 and elapsed < 900
    acceptance_report("C5a collocation RMSE in [0.015, 0.04]", ok, f"{r.rmse:.4f} +/- {r.rmse_se:.4f}")
    assert ok


@pytest.mark.slow
def test_c5_fd_rmse_band(table_rows, acceptance_report):
    r = table_rows[0][1024]
    ok = 0.12 <= r.rmse_fd <= 0.30
    acceptance_report("C5b FD RMSE in [0.12, 0.30]", ok, f"{r.rmse_fd:.4f} +/- {r.rmse_fd_se:.4f}")
    assert ok


@pytest.mark.slow
def test_c5_collocation_beats_fd(table_rows, acceptance_report):
    r = table_rows[0][1024]
    ok = r.rmse < r.rmse_fd
    acceptance_report("C5c collocation RMSE < FD RMSE", ok, f"{r.rmse:.4f} vs {r.rmse_fd:.4f}")
    assert ok


@pytest.mark.slow
def test_c6_rmse_decreases_with_n(table_rows, acceptance_report):
    rows, _ = table_rows
    ok = rows[64].rmse > rows[1024].rmse
    acceptance_report("C6 RMSE(n=64) > RMSE(n=1024)", ok, f"{rows[64].rmse:.4f} > {rows[1024].rmse:.4f}")
    assert ok


# -- criterion 7: property suites ---------------------------------------------

def test_c7a_reproduction(rng, acceptance_report):
    worst = 0.0
    for N in (8, 16, 32, 64):
        s = default_system(N)
        for _ in range(50 // 4 + 1):
            f = rng.normal(size=N)
            worst = max(worst, np.max(np.abs(interpolate(s, f)(s.points) - f)) / np.max(np.abs(f)))
    ok = worst <= 1e-8
    acceptance_report("C7a interpolation reproduction", ok, f"max rel {worst:.1e}")
    assert ok


def test_c7b_cardinality(acceptance_report):
    worst = max(
        np.max(np.abs(cardinal_derivative_row(s, (0,), s.points) - np.eye(s.N)))
        for s in map(default_system, (8, 16, 32, 64))
    )
    ok = worst <= 1e-8
    acceptance_report("C7b cardinal Q_j(x_i) = delta_ij", ok, f"max dev {worst:.1e}")
    assert ok


def test_c7c_derivatives_vs_finite_differences(rng, acceptance_report):
    k = generate_wendland(1, 4, 0.8)
    z = rng.uniform(-0.75, 0.75, size=(200, 1))
    z = z[np.abs(z[:, 0]) > 0.02]
    h = 1e-4
    fd1 = (k(z + h) - k(z - h)) / (2 * h)
    fd2 = (k(z + h) - 2 * k(z) + k(z - h)) / h**2
    e_kernel = max(
        np.max(np.abs(k.derivative((1,), z) - fd1)) / np.max(np.abs(fd1)),
        np.max(np.abs(k.derivative((2,), z) - fd2)) / np.max(np.abs(fd2)),
    )
    s = default_system(32)
    I = interpolate(s, rng.normal(size=32))
    x = rng.uniform(-3, 3, size=(200, 1))
    h = 1e-5
    g = (I(x + h) - I(x - h)) / (2 * h)
    e_interp = np.max(np.abs(I.derivative((1,), x) - g)) / np.max(np.abs(g))
    ok = e_kernel <= 1e-6 and e_interp <= 1e-5
    acceptance_report("C7c derivatives vs finite differences", ok, f"kernel {e_kernel:.1e}, interpolant {e_interp:.1e}")
    assert ok


def _setup(N=32, xi=None):
    model = get_model("tanh-drift")
    s = default_system(N)
    return model, s, build_propagators(model, s, xi)


def test_c7d_linearity_and_zero(rng, acceptance_report):
    _, s, props = _setup()
    dw = rng.normal(0, np.sqrt(1 / 256), size=(1, 256, 1))
    f, g = rng.normal(size=32), rng.normal(size=32)
    uf, ug, uc, u0 = (march(props, v, None, 1 / 256, dw)[0] for v in (f, g, 2 * f - 0.5 * g, np.zeros(32)))
    lin = np.max(np.abs(uc - (2 * uf - 0.5 * ug))) / max(1.0, np.max(np.abs(uc)))
    ok = lin <= 1e-10 and np.all(u0 == 0)
    acceptance_report("C7d solver linearity and zero preservation", ok, f"linearity {lin:.1e}, zero exact {np.all(u0 == 0)}")
    assert ok


def test_c7e_seed_determinism(acceptance_report):
    model, s, props = _setup()
    a, b = (run(model, s, props, 128, seed=99) for _ in range(2))
    ok = np.array_equal(a.grid_values, b.grid_values) and np.array_equal(a.path.values, b.path.values)
    acceptance_report("C7e seed determinism", ok, "bitwise equal" if ok else "runs differ")
    assert ok


def test_c7f_offgrid_consistency(acceptance_report):
    model = get_model("tanh-drift")
    s = default_system(32)
    props = build_propagators(model, s, s.points)
    res = run(model, s, props, 256, seed=5, eval_points=s.points)
    gap = np.max(np.abs(res.grid_values - res.eval_values))
    ok = gap <= 1e-12
    acceptance_report("C7f off-grid/on-grid consistency", ok, f"max gap {gap:.1e}")
    assert ok


def test_c7g_propagator_identity(rng, acceptance_report):
    model = get_model("tanh-drift")
    worst = 0.0
    for N in (8, 16, 32):
        s = default_system(N)
        props = build_propagators(model, s)
        f = rng.normal(size=N)
        I = interpolate(s, f)
        x = s.points

        def jet(p):
            return Jet(I(p), I.derivative((1,), p)[:, None], I.derivative((2,), p)[:, None, None])

        for k in range(model.m + 1):
            want = apply_L0(model, jet, x) if k == 0 else apply_Lk(model, k, jet, x)
            worst = max(worst, np.max(np.abs(props.P[k] @ f - want)) / max(1.0, np.max(np.abs(want))))
    ok = worst <= 1e-8
    acceptance_report("C7g propagator identity", ok, f"max rel {worst:.1e}")
    assert ok


def test_c7h_stability_proxy(acceptance_report):
    sups = {a: [] for a in (0, 1, 2)}
    for N in (16, 32, 64, 128):
        s = default_system(N)
        R = s.grid.R
        x = np.linspace(-R, R, 403)[1:-1, None]
        for a in sups:
            sups[a].append(np.abs(cardinal_derivative_row(s, (a,), x)).sum(axis=1).max())
    growth = {a: v[-1] / v[0] for a, v in sups.items()}
    ok = all(g < 2 for g in growth.values())
    detail = "; ".join(f"|a|={a}: {sups[a][0]:.2f}->{sups[a][-1]:.2f} (x{growth[a]:.2f})" for a in sups)
    acceptance_report("C7h stability proxy growth < 2", ok, detail)
    assert ok
