"""Collocation point sets in the open box ``(-R, R)^d`` and their spacing measures."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

__all__ = [
    "CollocationGrid",
    "uniform_grid_1d",
    "uniform_grid",
    "radius_schedule",
    "distances",
]


@dataclass(frozen=True, eq=False)
class CollocationGrid:
    """Ordered, pairwise distinct points inside ``(-R, R)^d``.

    ``fill`` is the Hausdorff distance from the box to the points and ``sep`` is
    half the minimum pairwise distance. ``fill_approximate`` marks a fill
    distance estimated from a lattice (a lower bound) rather than computed
    in closed form.
    """

    points: np.ndarray  # (N, d)
    R: float
    fill: float
    sep: float
    fill_approximate: bool = False

    @property
    def N(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def to_csv(self, path) -> None:
        header = ",".join(f"x{i + 1}" for i in range(self.d))
        np.savetxt(path, self.points, delimiter=",", header=header, comments="", fmt="%.17g")

    @classmethod
    def from_points(cls, points, R: float) -> "CollocationGrid":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[0] == 1 and np.ndim(points) == 1:
            pts = pts.T
        fill, sep, approx = distances(pts, R, return_flag=True)
        return cls(pts, float(R), fill, sep, approx)


def radius_schedule(N: int, tau: int) -> float:
    """Box half-width ``R(N) = N**(1 - 1/(2 tau - 2)) / 5`` used with the uniform grid."""
    if tau < 2:
        raise ValueError(f"radius schedule needs tau >= 2, got {tau}")
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    return 0.2 * float(N) ** (1.0 - 1.0 / (2 * tau - 2))


def uniform_grid_1d(N: int, R: float) -> CollocationGrid:
    """``x_j = -R + j * 2R/(N+1)`` for ``j = 1..N``.

    The two boundary gaps of width ``2R/(N+1)`` dominate the fill distance.
    """
    if int(N) != N or N < 2:
        raise ValueError(f"uniform grid needs N >= 2, got {N}")
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    N = int(N)
    h = 2.0 * R / (N + 1)
    j = np.arange(1, N + 1)
    # symmetric construction keeps x_j + x_{N+1-j} == 0 to round-off
    x = (j - (N + 1) / 2.0) * h
    return CollocationGrid(x[:, None], float(R), fill=h, sep=h / 2.0)


def uniform_grid(n_per_axis: int, R: float, d: int) -> CollocationGrid:
    """Tensor product of the 1-D rule; ``n_per_axis**d`` points."""
    if d == 1:
        return uniform_grid_1d(n_per_axis, R)
    axis = uniform_grid_1d(n_per_axis, R).points[:, 0]
    pts = np.array(list(itertools.product(axis, repeat=d)))
    h = 2.0 * R / (n_per_axis + 1)
    # farthest box point is a corner: distance h in every coordinate
    return CollocationGrid(pts, float(R), fill=h * np.sqrt(d), sep=h / 2.0)


def _fill_1d_exact(x: np.ndarray, R: float) -> float:
    xs = np.sort(x)
    gaps = np.diff(xs) / 2.0
    cand = [xs[0] + R, R - xs[-1]]
    if gaps.size:
        cand.append(gaps.max())
    return float(max(cand))


def distances(points, R: float, return_flag: bool = False):
    """Fill distance and separation distance of ``points`` in ``(-R, R)^d``.

    In 1-D the fill distance is exact. For ``d > 1`` it is the maximum nearest
    point distance over a lattice with spacing at most ``sep/4`` (a lower bound);
    pass ``return_flag=True`` to receive ``(fill, sep, approximate)``.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] < 2:
        raise ValueError("at least two points are needed for a separation distance")
    if np.any(np.abs(pts) >= R):
        raise ValueError("points must lie strictly inside (-R, R)^d")
    dmin = pdist(pts).min()
    if dmin == 0.0:
        raise ValueError("duplicate collocation points")
    sep = 0.5 * float(dmin)
    d = pts.shape[1]
    if d == 1:
        fill, approx = _fill_1d_exact(pts[:, 0], R), False
    else:
        m = int(np.ceil(2.0 * R / (sep / 4.0))) + 1
        if m**d > 5_000_000:
            raise ValueError(f"lattice of {m}**{d} points is too large for a fill estimate")
        axis = np.linspace(-R, R, m)
        lattice = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
        fill, approx = float(cKDTree(pts).query(lattice)[0].max()), True
    if return_flag:
        return fill, sep, approx
    return fill, sep
