"""Wendland compactly supported radial kernels.

Kernels are generated exactly in rational arithmetic by repeated radial
integration of a truncated power, normalised so that ``phi(0) == 1``, and
then converted once to floating point for evaluation.

Floating point evaluation never expands the polynomial around ``r = 0``.
Each radial profile is stored as ``(1 - r)**k * q(r)`` with the factor of
``(1 - r)`` divided out exactly, so values near the support boundary keep
full relative accuracy.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np

from . import backend

__all__ = [
    "WendlandKernel",
    "generate_wendland",
    "kernel_eval",
    "kernel_derivative",
    "poly_eval_exact",
]

Poly = tuple  # tuple[Fraction, ...], ascending powers


def _trim(p: Sequence[Fraction]) -> Poly:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(p)


def _mul(p: Sequence[Fraction], q: Sequence[Fraction]) -> Poly:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return _trim(out)


def _deriv(p: Sequence[Fraction]) -> Poly:
    if len(p) == 1:
        return (Fraction(0),)
    return _trim([i * p[i] for i in range(1, len(p))])


def poly_eval_exact(p: Sequence[Fraction], r: Fraction) -> Fraction:
    """Evaluate an exact polynomial (ascending coefficients) by Horner's rule."""
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * r + c
    return acc


def _one_minus_r_pow(k: int) -> Poly:
    return tuple(Fraction((-1) ** i * comb(k, i)) for i in range(k + 1))


def _radial_integral(p: Sequence[Fraction]) -> Poly:
    """Return ``r -> int_r^1 t p(t) dt`` for a profile that vanishes on ``[1, inf)``."""
    # antiderivative of t * p(t)
    anti = [Fraction(0)] * (len(p) + 2)
    for i, c in enumerate(p):
        anti[i + 2] = c / (i + 2)
    total = sum(anti, Fraction(0))
    out = [-c for c in anti]
    out[0] += total
    return _trim(out)


def _split_boundary_root(p: Sequence[Fraction]) -> tuple[int, Poly]:
    """Factor ``p(r) = (1 - r)**k * q(r)`` with ``q(1) != 0``, exactly."""
    p = _trim(p)
    k = 0
    while len(p) > 1 and sum(p, Fraction(0)) == 0:
        # synthetic division by (r - 1), then flip sign for (1 - r)
        n = len(p) - 1
        q = [Fraction(0)] * n
        q[n - 1] = p[n]
        for i in range(n - 1, 0, -1):
            q[i - 1] = p[i] + q[i]
        p = _trim([-c for c in q])
        k += 1
    return k, p


@dataclass(frozen=True)
class _Factored:
    power: int
    q: np.ndarray  # ascending float coefficients

    @classmethod
    def from_exact(cls, p: Sequence[Fraction]) -> "_Factored":
        k, q = _split_boundary_root(p)
        return cls(k, np.array([float(c) for c in q]))

    def __call__(self, r: np.ndarray) -> np.ndarray:
        return backend.truncated_profile(self.q, self.power, np.asarray(r, dtype=float))


@dataclass(frozen=True, eq=False)
class WendlandKernel:
    """Wendland function ``phi_{d,tau}`` on ``[0, 1]``, scaled to support radius ``scale``.

    Attributes
    ----------
    d, tau : int
        Space dimension and smoothness parameter; ``Phi`` is ``C^{2 tau}``.
    coeffs : tuple of Fraction
        Exact ascending coefficients of ``phi`` on ``[0, 1]`` with ``phi(0) = 1``.
    scale : float
        Support radius ``sigma``; the kernel is ``phi(|x - y| / sigma)``.
    """

    d: int
    tau: int
    coeffs: Poly
    scale: float = 1.0
    _phi: _Factored = field(init=False, repr=False)
    _g1: _Factored = field(init=False, repr=False)
    _g1p: _Factored = field(init=False, repr=False)

    def __post_init__(self):
        if not self.scale > 0 or not np.isfinite(self.scale):
            raise ValueError(f"scale must be positive and finite, got {self.scale}")
        dphi = _deriv(self.coeffs)
        if dphi[0] != 0:
            raise ValueError("phi'(0) must vanish for a radial C^2 kernel")
        # g1(r) = phi'(r) / r is a polynomial because phi'(0) = 0
        g1 = _trim(dphi[1:]) if len(dphi) > 1 else (Fraction(0),)
        object.__setattr__(self, "_phi", _Factored.from_exact(self.coeffs))
        object.__setattr__(self, "_g1", _Factored.from_exact(g1))
        object.__setattr__(self, "_g1p", _Factored.from_exact(_deriv(g1)))

    @property
    def nu(self) -> int:
        return self.d // 2 + self.tau + 1

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def with_scale(self, scale: float) -> "WendlandKernel":
        return WendlandKernel(self.d, self.tau, self.coeffs, float(scale))

    def factored(self) -> tuple[int, Poly]:
        """Exact factorisation ``phi(r) = (1 - r)**k * q(r)``."""
        return _split_boundary_root(self.coeffs)

    # -- radial profiles -------------------------------------------------
    def phi(self, r) -> np.ndarray:
        """Unscaled profile ``phi(r)``, zero for ``r >= 1``."""
        return self._phi(np.abs(np.asarray(r, dtype=float)))

    def __call__(self, z) -> np.ndarray:
        """``Phi_sigma(z)`` for displacement(s) ``z`` of shape ``(..., d)``."""
        s = np.linalg.norm(np.asarray(z, dtype=float), axis=-1)
        return self._phi(s / self.scale)

    def derivative(self, alpha: Sequence[int], z) -> np.ndarray:
        """``D^alpha`` of ``z -> Phi_sigma(z)`` for ``|alpha| <= 2``.

        ``z`` has shape ``(..., d)``; the result has shape ``z.shape[:-1]``.
        """
        alpha = _check_alpha(alpha, self.d)
        z = np.asarray(z, dtype=float)
        if z.shape[-1] != self.d:
            raise ValueError(f"expected trailing dimension {self.d}, got {z.shape}")
        order = sum(alpha)
        sig = self.scale
        s = np.linalg.norm(z, axis=-1)
        r = s / sig
        if order == 0:
            return self._phi(r)
        idx = [i for i, a in enumerate(alpha) for _ in range(a)]
        g1 = self._g1(r) / sig**2
        if order == 1:
            return z[..., idx[0]] * g1
        i, j = idx
        # d_i d_j Phi = delta_ij g1 / sigma^2 + z_i z_j g1'(r) / (sigma^3 s)
        with np.errstate(divide="ignore", invalid="ignore"):
            cross = np.where(s > 0, z[..., i] * z[..., j] * self._g1p(r) / (sig**3 * s), 0.0)
        return (g1 if i == j else 0.0) + cross

    def gram(self, x, y=None) -> np.ndarray:
        """Matrix ``{Phi(x_i - y_j)}`` for point arrays of shape ``(n, d)``."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = x if y is None else np.atleast_2d(np.asarray(y, dtype=float))
        return self(x[:, None, :] - y[None, :, :])


def _check_alpha(alpha, d: int) -> tuple[int, ...]:
    alpha = tuple(int(a) for a in np.atleast_1d(alpha))
    if len(alpha) != d:
        raise ValueError(f"multi-index {alpha} has wrong length for d={d}")
    if any(a < 0 for a in alpha):
        raise ValueError(f"negative multi-index {alpha}")
    if sum(alpha) > 2:
        raise ValueError(f"derivatives of order {sum(alpha)} > 2 are not supported")
    return alpha


def generate_wendland(d: int, tau: int, scale: float = 1.0) -> WendlandKernel:
    """Construct ``phi_{d,tau}`` exactly.

    Applies ``(I psi)(r) = int_r^inf t psi(t) dt`` ``tau`` times to the truncated
    power ``max(1 - r, 0)**nu`` with ``nu = floor(d/2) + tau + 1`` and rescales so
    that ``phi(0) = 1``.

    Examples
    --------
    >>> k = generate_wendland(1, 2)
    >>> k.factored()[0], [int(c * 8) for c in k.factored()[1]]
    (5, [8, 40, 64])
    """
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer, got {d}")
    if int(tau) != tau or tau < 1:
        raise ValueError(f"tau must be a positive integer, got {tau}")
    d, tau = int(d), int(tau)
    p = _one_minus_r_pow(d // 2 + tau + 1)
    for _ in range(tau):
        p = _radial_integral(p)
    p0 = p[0]
    return WendlandKernel(d, tau, tuple(c / p0 for c in p), float(scale))


def kernel_eval(k: WendlandKernel, x, y) -> float:
    """``Phi_sigma(x - y)`` for a single pair of points."""
    z = np.atleast_1d(np.asarray(x, dtype=float)) - np.atleast_1d(np.asarray(y, dtype=float))
    return float(k(z))


def kernel_derivative(k: WendlandKernel, alpha, x, y) -> float:
    """``D^alpha_x Phi_sigma(x - y)`` for a single pair of points."""
    z = np.atleast_1d(np.asarray(x, dtype=float)) - np.atleast_1d(np.asarray(y, dtype=float))
    return float(k.derivative(alpha, z))
