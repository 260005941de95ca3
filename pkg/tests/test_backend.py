import importlib
import os

import numpy as np
import pytest

from zakai_rbf import _fallback, backend

core = pytest.importorskip("zakai_rbf._core")


@pytest.mark.skipif(os.environ.get("ZAKAI_RBF_BACKEND") == "python", reason="fallback forced")
def test_compiled_core_is_selected():
    assert backend.NAME == "cython"


def test_env_var_forces_fallback(monkeypatch):
    monkeypatch.setenv("ZAKAI_RBF_BACKEND", "python")
    mod = importlib.reload(backend)
    try:
        assert mod.NAME == "python" and mod.fd_march is _fallback.fd_march
    finally:
        monkeypatch.undo()
        importlib.reload(backend)


def test_truncated_profile_parity(rng):
    q = rng.normal(size=6)
    r = rng.uniform(-0.1, 1.3, size=(7, 9))
    np.testing.assert_allclose(core.truncated_profile(q, 9, r), _fallback.truncated_profile(q, 9, r), rtol=1e-14, atol=1e-300)
    assert core.truncated_profile(q, 3, np.array(2.0)).shape == ()


def test_tridiag_parity(rng):
    n = 12
    lo, di, up = rng.normal(size=n), 4 + rng.random(n), rng.normal(size=n)
    lo[0] = up[-1] = 0
    cp, dn = backend.tridiag_factor(lo, di, up)
    rhs = rng.normal(size=(5, n))
    a = core.tridiag_solve(lo, cp, dn, rhs)
    b = _fallback.tridiag_solve(lo, cp, dn, rhs)
    np.testing.assert_allclose(a, b, rtol=1e-13)
    dense = np.diag(di) + np.diag(lo[1:], -1) + np.diag(up[:-1], 1)
    np.testing.assert_allclose(dense @ a.T, rhs.T, atol=1e-12)


def test_tridiag_factor_zero_pivot():
    with pytest.raises(ZeroDivisionError):
        backend.tridiag_factor([0, 1], [0, 1], [1, 0])


@pytest.mark.parametrize("with_eval", [True, False])
def test_collocation_march_parity(rng, with_eval):
    S, n, m, N, M = 4, 30, 2, 7, 5
    P = rng.normal(scale=0.3, size=(m + 1, N, N))
    E = rng.normal(scale=0.3, size=(m + 1, M, N)) if with_eval else None
    u0 = rng.normal(size=(S, N))
    v0 = rng.normal(size=(S, M)) if with_eval else None
    dw = rng.normal(scale=0.1, size=(S, n, m))
    ga, ea = core.collocation_march(P, E, u0, v0, 0.01, dw)
    gb, eb = _fallback.collocation_march(P, E, u0, v0, 0.01, dw)
    np.testing.assert_allclose(ga, gb, rtol=1e-12, atol=1e-13)
    if with_eval:
        np.testing.assert_allclose(ea, eb, rtol=1e-12, atol=1e-13)
    else:
        assert ea is None and eb is None


def test_fd_march_parity(rng):
    n = 10
    lo, di, up = -rng.random(n), 3 + rng.random(n), -rng.random(n)
    lo[0] = up[-1] = 0
    cp, dn = backend.tridiag_factor(lo, di, up)
    u0 = rng.normal(size=(3, n))
    dw = rng.normal(scale=0.1, size=(3, 25))
    np.testing.assert_allclose(core.fd_march(lo, cp, dn, u0, dw), _fallback.fd_march(lo, cp, dn, u0, dw), rtol=1e-13)
