"""Monte Carlo and diagnostic experiments on the tanh-drift test equation.

Every sample ``s`` draws its Brownian increments from substream ``s`` of the
base seed, and the same path drives the reference solution, the collocation
scheme and the finite difference baseline. Per-sample squared errors are
summed in sample order, so results do not depend on batching.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, backend
from .config import ExperimentConfig
from .fd_baseline import build_fd, fd_run
from .grid import radius_schedule, uniform_grid_1d
from .interpolation import FactorizationError, build_system, iota_diagnostic
from .io import write_json, write_table
from .kernels import generate_wendland
from .models import REFERENCES, get_model
from .solver import BLOWUP_THRESHOLD, build_propagators, generate_wiener, march, sample_rng

__all__ = [
    "RmseRow",
    "rmse_experiment",
    "iota_sweep",
    "trajectory_snapshot",
    "kernel_dump",
    "write_manifest",
    "eval_points",
    "box_radius",
    "sample_increments",
]

log = logging.getLogger(__name__)

RMSE_HEADER = [
    "N", "R", "fill_pow", "n", "sqrt_dt", "rmse", "rmse_se", "rmse_fd", "rmse_fd_se",
    "samples", "status", "blowup",
]


@dataclass
class RmseRow:
    N: int
    R: float
    fill_pow: float
    n: int
    sqrt_dt: float
    rmse: float = math.nan
    rmse_se: float = math.nan
    rmse_fd: float = math.nan
    rmse_fd_se: float = math.nan
    samples: int = 0
    status: str = "ok"
    blowup: bool = False
    per_sample: dict = field(default_factory=dict, repr=False)

    def as_row(self) -> list:
        return [getattr(self, h) for h in RMSE_HEADER]


def eval_points(cfg: ExperimentConfig) -> np.ndarray:
    lo, hi = cfg.eval_points.interval
    return np.linspace(lo, hi, cfg.eval_points.count)


def box_radius(cfg: ExperimentConfig, N: int) -> float:
    return radius_schedule(N, cfg.kernel.tau) if cfg.grid.R == "schedule" else float(cfg.grid.R)


def sample_increments(cfg: ExperimentConfig, n: int, indices) -> np.ndarray:
    """Increments ``(len(indices), n, 1)``, sample ``s`` from substream ``s``."""
    if cfg.mc.zero_noise:
        return np.zeros((len(indices), n, 1))
    return np.stack(
        [generate_wiener(n, 1, cfg.time.T, rng=sample_rng(cfg.mc.seed, s)).increments for s in indices]
    )


def _rmse_and_se(per_sample: np.ndarray, count: int) -> tuple[float, float]:
    """RMSE from per-sample sums of squares and a delta-method standard error."""
    ms = per_sample / count
    mean = math.fsum(ms) / ms.size
    rmse = math.sqrt(mean)
    if ms.size < 2 or rmse == 0.0:
        return rmse, 0.0 if ms.size >= 2 else math.nan
    se_mean = float(np.std(ms, ddof=1)) / math.sqrt(ms.size)
    return rmse, se_mean / (2.0 * rmse)


def _setup(cfg: ExperimentConfig, N: int):
    kernel = generate_wendland(cfg.kernel.d, cfg.kernel.tau, cfg.kernel.scale)
    R = box_radius(cfg, N)
    grid = uniform_grid_1d(N, R)
    xi = eval_points(cfg)
    if xi.min() <= -R or xi.max() >= R:
        log.warning("evaluation interval [%g, %g] is not inside (-R, R) with R=%g", xi.min(), xi.max(), R)
    return kernel, R, grid, xi


def rmse_experiment(cfg: ExperimentConfig, with_fd: bool = True) -> list[RmseRow]:
    """RMSE of the collocation scheme (and the FD baseline) for every ``(N, n)`` pair."""
    model = get_model(cfg.model)
    reference = REFERENCES[cfg.reference]
    S, T = cfg.mc.samples, cfg.time.T
    rows = []
    for N in cfg.N_list:
        kernel, R, grid, xi = _setup(cfg, N)
        fill_pow = grid.fill ** (cfg.kernel.tau - 1.5)
        try:
            system = build_system(kernel, grid)
            props = build_propagators(model, system, xi[:, None])
            fd = build_fd(model, N, R) if with_fd else None
        except (FactorizationError, np.linalg.LinAlgError) as exc:
            log.error("N=%d: setup failed: %s", N, exc)
            rows += [RmseRow(N, R, fill_pow, n, math.sqrt(T / n), status=f"failed: {exc}") for n in cfg.n_list]
            continue
        u0_grid = model.u0(grid.points)
        u0_eval = model.u0(xi[:, None])
        for n in cfg.n_list:
            row = RmseRow(N, R, fill_pow, n, math.sqrt(T / n), samples=S)
            t = np.linspace(0.0, T, n + 1)
            sq = np.zeros(S)
            sq_fd = np.zeros(S)
            t0 = time.perf_counter()
            try:
                for start in range(0, S, cfg.mc.batch):
                    idx = range(start, min(S, start + cfg.mc.batch))
                    dw = sample_increments(cfg, n, idx)
                    W = np.concatenate([np.zeros((len(idx), 1)), np.cumsum(dw[:, :, 0], axis=1)], axis=1)
                    exact = reference(t[None, :, None], xi[None, None, :], W[:, :, None])
                    if cfg.method == "oracle":
                        approx = exact.copy()
                    else:
                        _, approx = march(
                            props,
                            np.broadcast_to(u0_grid, (len(idx), N)),
                            np.broadcast_to(u0_eval, (len(idx), xi.size)),
                            T / n,
                            dw,
                        )
                        if not np.all(np.abs(approx) <= BLOWUP_THRESHOLD):
                            row.blowup = True
                    sq[idx.start:idx.stop] = np.sum((exact - approx) ** 2, axis=(1, 2))
                    if fd is not None:
                        traj = fd_run(fd, u0_grid, n, T, dw)
                        ex_fd = reference(t[None, :, None], fd.x[None, None, :], W[:, :, None])
                        sq_fd[idx.start:idx.stop] = np.sum((ex_fd - traj) ** 2, axis=(1, 2))
            except (FactorizationError, np.linalg.LinAlgError) as exc:
                row.status = f"failed: {exc}"
                rows.append(row)
                continue
            row.rmse, row.rmse_se = _rmse_and_se(sq, xi.size * (n + 1))
            row.per_sample["collocation"] = sq / (xi.size * (n + 1))
            if fd is not None:
                row.rmse_fd, row.rmse_fd_se = _rmse_and_se(sq_fd, N * (n + 1))
                row.per_sample["fd"] = sq_fd / (N * (n + 1))
            if row.blowup:
                row.status = "blowup"
            log.info("N=%d n=%d rmse=%.4f rmse_fd=%.4f (%.1fs)", N, n, row.rmse, row.rmse_fd, time.perf_counter() - t0)
            rows.append(row)
    return rows


def iota_sweep(cfg: ExperimentConfig, N_max: Optional[int] = None, N_values=None) -> list[dict]:
    """``iota(N)`` against the bound ``c2 / sep`` for ``N = 2..N_max``."""
    N_max = cfg.iota.N_max if N_max is None else N_max
    if N_max < 2:
        raise ValueError("N_max must be >= 2")
    kernel = generate_wendland(cfg.kernel.d, cfg.kernel.tau, cfg.kernel.scale)
    out = []
    for N in (range(2, N_max + 1) if N_values is None else N_values):
        R = box_radius(cfg, N)
        grid = uniform_grid_1d(N, R)
        bound = cfg.iota.c2 / grid.sep**cfg.kernel.d
        rec = {"N": N, "R": R, "sep": grid.sep, "iota": math.nan, "bound": bound, "ok": False, "status": "ok"}
        try:
            rec["iota"] = iota_diagnostic(build_system(kernel, grid), cfg.iota.c1)
            rec["ok"] = rec["iota"] < bound
        except FactorizationError as exc:
            rec["status"] = f"failed: {exc}"
        out.append(rec)
    return out


def trajectory_snapshot(cfg: ExperimentConfig, seed: Optional[int] = None) -> dict:
    """Exact and approximate values along fixed-``x`` time series and fixed-``t`` profiles."""
    snap = cfg.snapshot
    model = get_model(cfg.model)
    reference = REFERENCES[cfg.reference]
    kernel, R, grid, xi = _setup(cfg, snap.N)
    xs = np.asarray(snap.x, dtype=float)
    pts = np.unique(np.concatenate([xi, xs]))
    system = build_system(kernel, grid)
    props = build_propagators(model, system, pts[:, None])
    n, T = snap.n, cfg.time.T
    seed = cfg.mc.seed if seed is None else seed
    if cfg.mc.zero_noise:
        dw = np.zeros((1, n, 1))
    else:
        dw = generate_wiener(n, 1, T, rng=sample_rng(seed)).increments[None]
    _, ev = march(props, model.u0(grid.points)[None], model.u0(pts[:, None])[None], T / n, dw)
    approx = ev[0]
    t = np.linspace(0.0, T, n + 1)
    W = np.concatenate([[0.0], np.cumsum(dw[0, :, 0])])
    exact = reference(t[:, None], pts[None, :], W[:, None])
    cols = [int(np.argmin(np.abs(pts - x))) for x in xs]
    series = [(pts[c], t[i], exact[i, c], approx[i, c]) for c in cols for i in range(n + 1)]
    steps = [s for s in snap.steps if 0 <= s <= n]
    profiles = [(t[s], pts[j], exact[s, j], approx[s, j]) for s in [0] + steps for j in range(pts.size)]
    gap = max(abs(e - a) for _, _, e, a in series + profiles)
    return {"series": series, "profiles": profiles, "max_gap": gap, "seed": seed, "W": W, "t": t}


def kernel_dump(d: int, tau: int):
    """Rows ``(power, numerator, denominator, value)`` of ``phi_{d,tau}`` on ``[0, 1]``."""
    k = generate_wendland(d, tau)
    return [(i, c.numerator, c.denominator, float(c)) for i, c in enumerate(k.coeffs)]


def write_manifest(out_dir, cfg: ExperimentConfig, experiment: str, files, extra=None) -> str:
    manifest = {
        "experiment": experiment,
        "tool": "zakai_rbf",
        "version": __version__,
        "backend": backend.NAME,
        "config_sha256": cfg.digest(),
        "seed": cfg.mc.seed,
        "kernel_scale": cfg.kernel.scale,
        "config": cfg.to_dict(),
        "files": [Path(f).name for f in files],
    }
    if extra:
        manifest.update(extra)
    return write_json(Path(out_dir) / "manifest.json", manifest)


def write_rmse(rows: list[RmseRow], path) -> str:
    return write_table(path, RMSE_HEADER, (r.as_row() for r in rows))


def write_iota(records: list[dict], path) -> str:
    header = ["N", "R", "sep", "iota", "bound", "ok", "status"]
    return write_table(path, header, ([r[h] for h in header] for r in records))


def write_snapshot(snap: dict, out_dir) -> list[str]:
    out_dir = Path(out_dir)
    return [
        write_table(out_dir / "snapshot_series.csv", ["x", "t", "exact", "approx"], snap["series"]),
        write_table(out_dir / "snapshot_profiles.csv", ["t", "x", "exact", "approx"], snap["profiles"]),
        write_table(out_dir / "snapshot_path.csv", ["t", "W"], zip(snap["t"], snap["W"])),
    ]
