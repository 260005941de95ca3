"""Implicit Euler finite differences for one-dimensional Zakai equations.

Zero Dirichlet values are imposed at ``x = -R`` and ``x = R``; the unknowns live
on ``x_j = -R + j dx``, ``j = 1..N``, ``dx = 2R/(N+1)``. Each step solves

    (I - dt L) u_{i+1} = u_i (1 + dW_{i+1})

with a tridiagonal central-difference ``L`` for the drift operator. The noise
part is fixed to ``L_1 u = u`` (``beta = 1``, ``gamma = 0``).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .grid import uniform_grid_1d
from .models import ZakaiModel

__all__ = ["FdScheme", "build_fd", "fd_operator", "fd_run"]


@dataclass(frozen=True, eq=False)
class FdScheme:
    x: np.ndarray  # (N,)
    R: float
    dx: float
    lower: np.ndarray  # lower[j] couples u_{j-1} into row j; lower[0] = 0
    diag: np.ndarray
    upper: np.ndarray  # upper[j] couples u_{j+1} into row j; upper[-1] = 0

    @property
    def N(self) -> int:
        return self.x.size

    def operator_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.lower[1:], -1) + np.diag(self.upper[:-1], 1)

    def apply(self, u) -> np.ndarray:
        """``L u`` for a vector or a batch of row vectors."""
        u = np.asarray(u, dtype=float)
        out = self.diag * u
        out[..., 1:] += self.lower[1:] * u[..., :-1]
        out[..., :-1] += self.upper[:-1] * u[..., 1:]
        return out

    def implicit_factor(self, dt: float):
        """Thomas factors of ``I - dt L``."""
        lo = -dt * self.lower
        di = 1.0 - dt * self.diag
        up = -dt * self.upper
        cprime, denom = backend.tridiag_factor(lo, di, up)
        return lo, cprime, denom


def fd_operator(a: np.ndarray, b: np.ndarray, dx: float):
    """Bands of ``1/2 a u'' + (b u)'`` by central differences from nodal ``a``, ``b``.

    ``a`` and ``b`` are sampled at the interior nodes; the boundary values of
    ``u`` are zero so neighbouring coefficients outside the grid never enter.
    """
    N = a.size
    lower = np.zeros(N)
    upper = np.zeros(N)
    diag = -a / dx**2
    lower[1:] = 0.5 * a[1:] / dx**2 - b[:-1] / (2 * dx)
    upper[:-1] = 0.5 * a[:-1] / dx**2 + b[1:] / (2 * dx)
    return lower, diag, upper


def build_fd(model: ZakaiModel, N: int, R: float) -> FdScheme:
    if model.d != 1 or model.m != 1:
        raise ValueError(f"the finite difference baseline is 1-D with one noise; got d={model.d}, m={model.m}")
    grid = uniform_grid_1d(N, R)
    x = grid.points[:, 0]
    dx = grid.fill
    c = model.coefficients(grid.points)
    lower, diag, upper = fd_operator(c["a"][:, 0, 0], c["b"][:, 0], dx)
    return FdScheme(x, float(R), dx, lower, diag, upper)


def fd_run(scheme: FdScheme, u0_values, n: int, T: float, increments) -> np.ndarray:
    """Trajectories ``(n+1, N)`` for one path, or ``(S, n+1, N)`` for a batch.

    ``increments`` has shape ``(n,)``, ``(n, 1)`` or ``(S, n)`` / ``(S, n, 1)``.
    """
    dw = np.asarray(increments, dtype=float)
    if dw.ndim >= 2 and dw.shape[-1] == 1 and dw.shape[-2] == n:
        dw = dw[..., 0]
    single = dw.ndim == 1
    dw = np.atleast_2d(dw)
    if dw.shape[1] != n:
        raise ValueError(f"expected {n} increments per path, got {dw.shape[1]}")
    u0 = np.broadcast_to(np.asarray(u0_values, dtype=float), (dw.shape[0], scheme.N))
    try:
        lo, cprime, denom = scheme.implicit_factor(T / n)
    except ZeroDivisionError as exc:
        raise np.linalg.LinAlgError(f"implicit finite difference matrix is singular: {exc}") from exc
    out = backend.fd_march(lo, cprime, denom, np.ascontiguousarray(u0), dw)
    return out[0] if single else out
