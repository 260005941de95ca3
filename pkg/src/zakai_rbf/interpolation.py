"""Kernel interpolation on a collocation grid.

The Gram matrix ``A = {Phi(x_j - x_l)}`` is factorised once by Cholesky; every
solve below reuses that factor.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, eigh

from .grid import CollocationGrid
from .kernels import WendlandKernel

__all__ = [
    "FactorizationError",
    "InterpolationSystem",
    "Interpolant",
    "build_system",
    "interpolate",
    "cardinal_derivative_row",
    "iota_diagnostic",
    "conditioning_report",
    "multi_indices",
]


class FactorizationError(RuntimeError):
    """The Gram matrix is not numerically positive definite."""


def multi_indices(d: int, max_order: int = 2) -> list[tuple[int, ...]]:
    """All multi-indices of length ``d`` with total order ``<= max_order``."""
    return [a for a in product(range(max_order + 1), repeat=d) if sum(a) <= max_order]


@dataclass(frozen=True, eq=False)
class InterpolationSystem:
    kernel: WendlandKernel
    grid: CollocationGrid
    matrix: np.ndarray
    _chol: tuple

    @property
    def points(self) -> np.ndarray:
        return self.grid.points

    @property
    def N(self) -> int:
        return self.grid.N

    def solve(self, rhs) -> np.ndarray:
        """``A^{-1} rhs`` for a vector or a matrix of right-hand sides."""
        return cho_solve(self._chol, np.asarray(rhs, dtype=float))

    def inverse(self) -> np.ndarray:
        return self.solve(np.eye(self.N))

    def kernel_rows(self, alpha, x) -> np.ndarray:
        """``V[p, i] = D^alpha Phi(x_p - x_i)`` for query points ``x`` of shape ``(P, d)``."""
        x = _as_points(x, self.kernel.d)
        return self.kernel.derivative(alpha, x[:, None, :] - self.points[None, :, :])


def _as_points(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return x.reshape(1, 1)
    if x.ndim == 1:
        return x.reshape(-1, 1) if d == 1 else x.reshape(1, d)
    return x


def build_system(kernel: WendlandKernel, grid: CollocationGrid) -> InterpolationSystem:
    """Assemble and factorise the Gram matrix of ``kernel`` on ``grid``."""
    if grid.d != kernel.d:
        raise ValueError(f"grid dimension {grid.d} does not match kernel dimension {kernel.d}")
    A = kernel.gram(grid.points)
    A = 0.5 * (A + A.T)  # exact symmetry; entries are already equal up to round-off
    try:
        chol = cho_factor(A, lower=True, check_finite=True)
    except LinAlgError as exc:
        raise FactorizationError(
            f"Cholesky failed for N={grid.N}, scale={kernel.scale}: {exc}; "
            "change the kernel scale or the grid"
        ) from exc
    return InterpolationSystem(kernel, grid, A, chol)


class Interpolant:
    """``I(f)(x) = sum_j c_j Phi(x - x_j)`` with ``c = A^{-1} f|_Gamma``."""

    def __init__(self, system: InterpolationSystem, coeffs: np.ndarray):
        self.system = system
        self.coeffs = coeffs

    def __call__(self, x) -> np.ndarray:
        return self.derivative((0,) * self.system.kernel.d, x)

    def derivative(self, alpha: Sequence[int], x) -> np.ndarray:
        return self.system.kernel_rows(alpha, x) @ self.coeffs


def interpolate(system: InterpolationSystem, values) -> Interpolant:
    values = np.asarray(values, dtype=float)
    if values.shape[0] != system.N:
        raise ValueError(f"expected {system.N} values, got {values.shape[0]}")
    if not np.all(np.isfinite(values)):
        raise ValueError("interpolation values must be finite")
    return Interpolant(system, system.solve(values))


def cardinal_derivative_row(system: InterpolationSystem, alpha, x) -> np.ndarray:
    """``(D^alpha Q_1(x), ..., D^alpha Q_N(x))``.

    A single point gives an ``(N,)`` vector; ``P`` points give ``(P, N)``.
    """
    single = np.ndim(x) == 0 or (np.ndim(x) == 1 and system.kernel.d > 1)
    V = system.kernel_rows(alpha, x)  # (P, N)
    rows = system.solve(V.T).T  # A symmetric: rows of V A^{-1}
    return rows[0] if single else rows


def iota_diagnostic(system: InterpolationSystem, c1: float = 1.0) -> int:
    """Largest per-row count of ``|(A^{-1})_ij| > c1 * sep**d / N``."""
    if system.N < 2:
        raise ValueError("the inverse-decay diagnostic needs at least two points")
    threshold = c1 * system.grid.sep ** system.kernel.d / system.N
    Ainv = system.inverse()
    return int(np.max(np.count_nonzero(np.abs(Ainv) > threshold, axis=1)))


def conditioning_report(system: InterpolationSystem) -> tuple[float, float]:
    """Smallest eigenvalue and spectral condition number of ``A``."""
    w = eigh(system.matrix, eigvals_only=True)
    return float(w[0]), float(w[-1] / w[0])
