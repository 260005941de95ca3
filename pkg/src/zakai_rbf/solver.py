"""Explicit kernel collocation time stepping for Zakai equations.

Grid values follow ``u_i = u_{i-1} + sum_k (A_k A^{-1} u_{i-1}) dW_k`` with
``dW_0 = dt``. Off-grid points are advanced by the same recursion using rows
of ``L_k Phi(xi - x_l) A^{-1}``, not by re-interpolating grid values.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import backend
from .interpolation import InterpolationSystem
from .kernels import WendlandKernel
from .models import Jet, ZakaiModel, operator_coefficients

__all__ = [
    "Propagators",
    "SolverRun",
    "WienerPath",
    "build_propagators",
    "operator_matrix",
    "generate_wiener",
    "sample_rng",
    "step",
    "run",
    "march",
    "reinterpolate",
    "BLOWUP_THRESHOLD",
]

log = logging.getLogger(__name__)

BLOWUP_THRESHOLD = 1e12


def kernel_jets(kernel: WendlandKernel, x: np.ndarray, centers: np.ndarray) -> Jet:
    """Jets of ``x -> Phi(x - c)`` for every query point and center: value ``(P, N)``."""
    d = kernel.d
    z = x[:, None, :] - centers[None, :, :]
    value = kernel(z)
    grad = np.stack([kernel.derivative(tuple(int(i == q) for i in range(d)), z) for q in range(d)], axis=-1)
    hess = np.empty(value.shape + (d, d))
    for i in range(d):
        for j in range(i, d):
            alpha = [0] * d
            alpha[i] += 1
            alpha[j] += 1
            hess[..., i, j] = hess[..., j, i] = kernel.derivative(alpha, z)
    return Jet(value, grad, hess)


def operator_matrix(model: ZakaiModel, kernel: WendlandKernel, x, centers, k: int) -> np.ndarray:
    """``B[p, l] = L_k Phi(. - x_l)`` evaluated at ``x_p``."""
    S2, S1, S0 = operator_coefficients(model, k, x)
    jet = kernel_jets(kernel, np.asarray(x, dtype=float), centers)
    out = S0[:, None] * jet.value + np.einsum("pi,pni->pn", S1, jet.grad)
    if np.any(S2):
        out += np.einsum("pij,pnij->pn", S2, jet.hess)
    return out


@dataclass(frozen=True, eq=False)
class Propagators:
    """``P[k] = A_k A^{-1}`` (``k = 0..m``) and optional off-grid rows ``E[k]``."""

    P: np.ndarray  # (m+1, N, N)
    E: Optional[np.ndarray] = None  # (m+1, M, N)
    eval_points: Optional[np.ndarray] = None

    @property
    def m(self) -> int:
        return self.P.shape[0] - 1


def build_propagators(model: ZakaiModel, system: InterpolationSystem, eval_points=None) -> Propagators:
    if model.d != system.kernel.d:
        raise ValueError(f"model dimension {model.d} != grid dimension {system.kernel.d}")
    if system.kernel.tau < 3:
        warnings.warn(
            f"tau={system.kernel.tau} < 3: the collocation convergence theory requires tau >= 3",
            stacklevel=2,
        )
    x = system.points
    # P_k = A_k A^{-1} = (A^{-1} A_k^T)^T since A is symmetric
    P = np.stack([system.solve(operator_matrix(model, system.kernel, x, x, k).T).T for k in range(model.m + 1)])
    E = xi = None
    if eval_points is not None:
        xi = np.asarray(eval_points, dtype=float)
        xi = xi.reshape(-1, model.d) if xi.ndim < 2 else xi
        E = np.stack([system.solve(operator_matrix(model, system.kernel, xi, x, k).T).T for k in range(model.m + 1)])
    return Propagators(P, E, xi)


@dataclass(frozen=True)
class WienerPath:
    times: np.ndarray  # (n+1,)
    increments: np.ndarray  # (n, m)
    values: np.ndarray  # (n+1, m), W(t_0) = 0

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


def sample_rng(seed: int, index: Optional[int] = None) -> np.random.Generator:
    """PCG64 generator; ``index`` selects an independent spawned substream of ``seed``."""
    key = () if index is None else (int(index),)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


def generate_wiener(n: int, m: int, T: float, seed=0, rng: Optional[np.random.Generator] = None) -> WienerPath:
    """``n`` i.i.d. ``Normal(0, T/n)`` increments per noise on the uniform grid ``t_i = i T / n``."""
    if n < 1 or m < 1 or not T > 0:
        raise ValueError(f"need n >= 1, m >= 1, T > 0; got n={n}, m={m}, T={T}")
    rng = rng if rng is not None else sample_rng(seed)
    dt = T / n
    inc = rng.normal(0.0, np.sqrt(dt), size=(n, m))
    values = np.zeros((n + 1, m))
    np.cumsum(inc, axis=0, out=values[1:])
    times = np.arange(n + 1) * dt
    times[-1] = T
    return WienerPath(times, inc, values)


def step(u_prev, props: Propagators, dt: float, dW) -> np.ndarray:
    """One explicit step ``u + (P_0 u) dt + sum_k (P_k u) dW_k``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    u_prev = np.asarray(u_prev, dtype=float)
    dW = np.atleast_1d(np.asarray(dW, dtype=float))
    out = u_prev + (props.P[0] @ u_prev) * dt
    for k in range(1, props.m + 1):
        out += (props.P[k] @ u_prev) * dW[k - 1]
    return out


def march(props: Propagators, u0, v0, dt: float, increments) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Batched recursion: ``u0 (S, N)``, ``increments (S, n, m)`` -> trajectories ``(S, n+1, .)``."""
    u0 = np.atleast_2d(np.asarray(u0, dtype=float))
    dw = np.asarray(increments, dtype=float)
    if dw.ndim == 2:
        dw = dw[None]
    E = props.E
    if E is not None and v0 is None:
        raise ValueError("off-grid propagators need off-grid initial values")
    v0 = None if E is None else np.atleast_2d(np.asarray(v0, dtype=float))
    return backend.collocation_march(props.P, E, u0, v0, float(dt), dw)


@dataclass(frozen=True, eq=False)
class SolverRun:
    path: WienerPath
    grid_values: np.ndarray  # (n+1, N)
    eval_values: Optional[np.ndarray]  # (n+1, M)
    seed: Optional[int]
    blew_up: bool

    @property
    def time_grid(self) -> np.ndarray:
        return self.path.times

    @property
    def increments(self) -> np.ndarray:
        return self.path.increments

    def to_csv(self, prefix) -> list[str]:
        """Write ``<prefix>_grid.csv``, ``<prefix>_eval.csv`` and ``<prefix>_path.csv``."""
        from .io import write_trajectory

        files = [write_trajectory(f"{prefix}_grid.csv", self.path.times, self.grid_values, "u")]
        if self.eval_values is not None:
            files.append(write_trajectory(f"{prefix}_eval.csv", self.path.times, self.eval_values, "v"))
        files.append(write_trajectory(f"{prefix}_path.csv", self.path.times, self.path.values, "W"))
        return files


def run(
    model: ZakaiModel,
    system: InterpolationSystem,
    props: Propagators,
    n: int,
    T: float = 1.0,
    seed: int = 0,
    eval_points=None,
    path: Optional[WienerPath] = None,
) -> SolverRun:
    """Solve one sample path; ``path`` overrides the seeded Brownian increments.

    ``eval_points`` must be the points ``props`` was built with (or ``None``).
    """
    if eval_points is not None and props.E is None:
        raise ValueError("build the propagators with these eval_points first")
    if path is None:
        path = generate_wiener(n, model.m, T, seed)
    elif path.increments.shape != (n, model.m):
        raise ValueError(f"path has shape {path.increments.shape}, expected {(n, model.m)}")
    u0 = model.u0(system.points)
    v0 = model.u0(props.eval_points) if props.E is not None else None
    grid, ev = march(props, u0, v0, path.dt, path.increments)
    grid = grid[0]
    ev = None if ev is None else ev[0]
    blew = bool(np.max(np.abs(grid)) > BLOWUP_THRESHOLD or (ev is not None and np.max(np.abs(ev)) > BLOWUP_THRESHOLD))
    if blew:
        log.warning("collocation run exceeded %g in magnitude; scheme is unstable for this setup", BLOWUP_THRESHOLD)
    return SolverRun(path, grid, ev, seed, blew)


def reinterpolate(system: InterpolationSystem, grid_values, points) -> np.ndarray:
    """Interpolate each row of ``grid_values`` at ``points`` (comparison utility)."""
    grid_values = np.atleast_2d(grid_values)
    rows = system.kernel_rows((0,) * system.kernel.d, points)
    return grid_values @ system.solve(rows.T)
