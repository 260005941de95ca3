"""Zakai equations ``du = L_0 u dt + sum_k L_k u dW_k`` in divergence form.

    L_0 f = 1/2 sum_ij d_i d_j (a_ij f) + sum_i d_i (b_i f)
    L_k f = beta_k f + sum_i d_i (gamma_ik f)

Coefficients are vectorised callables of points ``x`` with shape ``(P, d)``.
Derivatives of the coefficients are supplied analytically; a ``None``
derivative means the coefficient is constant. Smoothness, boundedness and
degenerate ellipticity of the coefficients are preconditions of the scheme;
``ZakaiModel.sample_checks`` only spot-checks them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

__all__ = [
    "Jet",
    "ZakaiModel",
    "apply_L0",
    "apply_Lk",
    "operator_coefficients",
    "tanh_drift_model",
    "closed_form_solution",
    "exact_solution",
    "get_model",
    "MODELS",
]

Array = np.ndarray
CoefFn = Callable[[Array], Array]


class Jet(NamedTuple):
    """Value ``(P, ...)``, gradient ``(P, ..., d)`` and Hessian ``(P, ..., d, d)`` of a function."""

    value: Array
    grad: Array
    hess: Optional[Array] = None


def _zeros(shape_fn):
    return lambda x: np.zeros(shape_fn(np.asarray(x).shape[0]))


@dataclass(frozen=True)
class ZakaiModel:
    """Coefficients of a Zakai equation with time-independent coefficients.

    Shapes for ``P`` query points: ``a -> (P, d, d)``, ``da -> (P, d, d, d)``
    with ``da[p, k, i, j] = d_k a_ij``, ``d2a -> (P, d, d, d, d)`` with
    ``d2a[p, k, l, i, j] = d_k d_l a_ij``, ``b -> (P, d)``, ``db -> (P, d, d)``
    with ``db[p, k, i] = d_k b_i``, ``beta -> (P, m)``, ``gamma -> (P, d, m)``,
    ``dgamma -> (P, d, d, m)`` with ``dgamma[p, k, i, l] = d_k gamma_il`` and
    ``u0 -> (P,)``.
    """

    d: int
    m: int
    a: CoefFn
    b: CoefFn
    beta: CoefFn
    gamma: CoefFn
    u0: CoefFn
    da: Optional[CoefFn] = None
    d2a: Optional[CoefFn] = None
    db: Optional[CoefFn] = None
    dgamma: Optional[CoefFn] = None
    name: str = "custom"

    def _d(self, fn, shape_fn):
        return fn if fn is not None else _zeros(shape_fn)

    def coefficients(self, x) -> dict:
        x = _points(x, self.d)
        d, m = self.d, self.m
        return {
            "a": np.asarray(self.a(x), dtype=float).reshape(-1, d, d),
            "da": np.asarray(self._d(self.da, lambda P: (P, d, d, d))(x), dtype=float),
            "d2a": np.asarray(self._d(self.d2a, lambda P: (P, d, d, d, d))(x), dtype=float),
            "b": np.asarray(self.b(x), dtype=float).reshape(-1, d),
            "db": np.asarray(self._d(self.db, lambda P: (P, d, d))(x), dtype=float),
            "beta": np.asarray(self.beta(x), dtype=float).reshape(-1, m),
            "gamma": np.asarray(self.gamma(x), dtype=float).reshape(-1, d, m),
            "dgamma": np.asarray(self._d(self.dgamma, lambda P: (P, d, d, m))(x), dtype=float),
        }

    def sample_checks(self, n_points: int = 100, box: float = 3.0, seed: int = 0, tol: float = 1e-10) -> dict:
        """Spot-check the coefficient preconditions at random points.

        Checks symmetry of ``a``, ``a - gamma gamma^T >= 0`` and agreement of the
        supplied derivatives with central differences (relative ``5e-5``, step
        ``1e-5``). Returns a dict of booleans; ``False`` marks a violation.
        """
        rng = np.random.default_rng(seed)
        x = rng.uniform(-box, box, size=(n_points, self.d))
        xi = rng.normal(size=(n_points, self.d))
        c = self.coefficients(x)
        a, g = c["a"], c["gamma"]
        sym = bool(np.allclose(a, a.transpose(0, 2, 1), rtol=0, atol=tol))
        q = a - g @ g.transpose(0, 2, 1)
        form = np.einsum("pi,pij,pj->p", xi, q, xi)
        ell = bool(np.all(form >= -tol * np.sum(xi**2, axis=1)))

        h = 1e-5
        ok = True
        for k in range(self.d):
            e = np.zeros(self.d)
            e[k] = h
            cp, cm = self.coefficients(x + e), self.coefficients(x - e)
            for name, dname in (("a", "da"), ("b", "db"), ("gamma", "dgamma"), ("da", "d2a")):
                fd = (cp[name] - cm[name]) / (2 * h)
                ok &= bool(np.allclose(c[dname][:, k], fd, rtol=5e-5, atol=5e-5 * (1 + np.abs(fd).max())))
        return {"symmetric": sym, "degenerate_elliptic": ell, "derivatives": ok}


def _points(x, d: int) -> Array:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return x.reshape(1, 1)
    if x.ndim == 1:
        return x.reshape(-1, 1) if d == 1 else x.reshape(1, d)
    return x


def operator_coefficients(model: ZakaiModel, k: int, x) -> tuple[Array, Array, Array]:
    """Non-divergence coefficients ``(S2, S1, S0)`` of ``L_k`` at points ``x``.

    ``L_k f = sum_ij S2_ij d_i d_j f + sum_i S1_i d_i f + S0 f``, shapes
    ``(P, d, d)``, ``(P, d)`` and ``(P,)``. ``k = 0`` is the drift operator.
    """
    if not 0 <= k <= model.m:
        raise ValueError(f"operator index {k} out of range 0..{model.m}")
    c = model.coefficients(x)
    P, d = c["a"].shape[0], model.d
    if k == 0:
        da, d2a, db = c["da"], c["d2a"], c["db"]
        S2 = 0.5 * c["a"]
        # 1/2 (sum_i d_i a_ij + sum_i d_i a_ji) + b_j
        div_rows = np.einsum("piij->pj", da)
        div_cols = np.einsum("pjij->pi", da)
        S1 = 0.5 * (div_rows + div_cols) + c["b"]
        S0 = 0.5 * np.einsum("pijij->p", d2a) + np.einsum("pii->p", db)
        return S2, S1, S0
    kk = k - 1
    S2 = np.zeros((P, d, d))
    S1 = c["gamma"][:, :, kk]
    S0 = c["beta"][:, kk] + np.einsum("pii->p", c["dgamma"][..., kk])
    return S2, S1, S0


def _apply(coefs, jet: Jet) -> Array:
    S2, S1, S0 = coefs
    val = np.asarray(jet.value, dtype=float)
    P = S0.shape[0]
    extra = val.shape[1:]
    bshape = (P,) + (1,) * len(extra)
    out = S0.reshape(bshape) * val
    g = np.asarray(jet.grad, dtype=float)
    out = out + np.einsum("pi,p...i->p...", S1, g)
    if np.any(S2):
        if jet.hess is None:
            raise ValueError("a second-order operator needs the Hessian of f")
        out = out + np.einsum("pij,p...ij->p...", S2, np.asarray(jet.hess, dtype=float))
    return out


def _jet_at(f, x) -> Jet:
    jet = f(x) if callable(f) else f
    if not isinstance(jet, Jet):
        jet = Jet(*jet)
    return jet


def apply_L0(model: ZakaiModel, f, x) -> Array:
    """``L_0 f`` at points ``x``; ``f`` is a ``Jet`` or a callable returning one."""
    x = _points(x, model.d)
    return _apply(operator_coefficients(model, 0, x), _jet_at(f, x))


def apply_Lk(model: ZakaiModel, k: int, f, x) -> Array:
    """``L_k f`` at points ``x`` for ``1 <= k <= m``."""
    if not 1 <= k <= model.m:
        raise ValueError(f"noise index {k} out of range 1..{model.m}")
    x = _points(x, model.d)
    return _apply(operator_coefficients(model, k, x), _jet_at(f, x))


_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _u0(x):
    x = np.asarray(x, dtype=float).reshape(-1)
    return _INV_SQRT_2PI * np.cosh(x) * np.exp(-0.5 * x**2)


def tanh_drift_model() -> ZakaiModel:
    """``du = (u''/2 - (tanh(x) u)') dt + u dW`` with ``u0 = cosh(x) exp(-x^2/2) / sqrt(2 pi)``.

    The drift enters the divergence template with ``b = -tanh``.
    """
    one = lambda x: np.ones((np.asarray(x).shape[0], 1, 1))
    return ZakaiModel(
        d=1,
        m=1,
        a=one,
        b=lambda x: -np.tanh(x).reshape(-1, 1),
        db=lambda x: (-1.0 / np.cosh(x) ** 2).reshape(-1, 1, 1),
        beta=lambda x: np.ones((np.asarray(x).shape[0], 1)),
        gamma=lambda x: np.zeros((np.asarray(x).shape[0], 1, 1)),
        u0=_u0,
        name="tanh-drift",
    )


def closed_form_solution(t, x, W_t):
    """Reference closed form ``cosh(x) exp(W_t - 3t/2 - x^2/(2(1+t))) / sqrt(2 pi)``.

    This is the benchmark formula the RMSE tables are measured against. It
    matches ``u0`` at ``t = 0`` but is not an exact solution of the tanh-drift
    equation: its Ito residual is ``-t/(2(1+t)) u dt``. ``exact_solution`` is the
    true solution. Arguments broadcast.
    """
    t, x, W_t = (np.asarray(v, dtype=float) for v in (t, x, W_t))
    return _INV_SQRT_2PI * np.cosh(x) * np.exp(W_t - 1.5 * t - x**2 / (2.0 * (1.0 + t)))


def exact_solution(t, x, W_t):
    """True solution ``cosh(x) exp(W_t - t - x^2/(2(1+t))) / sqrt(2 pi (1+t))``."""
    t, x, W_t = (np.asarray(v, dtype=float) for v in (t, x, W_t))
    return (
        _INV_SQRT_2PI
        / np.sqrt(1.0 + t)
        * np.cosh(x)
        * np.exp(W_t - t - x**2 / (2.0 * (1.0 + t)))
    )


REFERENCES = {"published": closed_form_solution, "exact": exact_solution}

MODELS = {"tanh-drift": tanh_drift_model}


def get_model(name: str) -> ZakaiModel:
    try:
        return MODELS[name]()
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from {sorted(MODELS)}") from None
