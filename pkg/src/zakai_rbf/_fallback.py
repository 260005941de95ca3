"""Pure NumPy implementations of the hot loops.

Every function here has a twin with the same signature in ``_core.pyx``.
"""
import numpy as np


def truncated_profile(q, power, r):
    """``(1 - r)**power * q(r)`` for ``0 <= r < 1`` and 0 elsewhere; ``q`` ascending."""
    r = np.asarray(r, dtype=float)
    inside = r < 1.0
    rr = np.where(inside, r, 0.0)
    acc = np.full(rr.shape, q[-1], dtype=float)
    for c in q[-2::-1]:
        acc = acc * rr + c
    return np.where(inside, acc * (1.0 - rr) ** power, 0.0)


def tridiag_solve(lower, cprime, denom, rhs):
    """Solve factored tridiagonal systems for each row of ``rhs`` (shape ``(S, N)``).

    ``lower[i]`` multiplies ``x[i-1]`` in row ``i`` (``lower[0]`` unused);
    ``cprime`` and ``denom`` come from ``tridiag_factor``.
    """
    rhs = np.asarray(rhs, dtype=float)
    n = rhs.shape[-1]
    y = np.empty_like(rhs)
    y[..., 0] = rhs[..., 0] / denom[0]
    for i in range(1, n):
        y[..., i] = (rhs[..., i] - lower[i] * y[..., i - 1]) / denom[i]
    for i in range(n - 2, -1, -1):
        y[..., i] -= cprime[i] * y[..., i + 1]
    return y


def collocation_march(props, evals, u0, v0, dt, dw):
    """Advance a batch of samples with the explicit collocation recursion.

    props : (m+1, N, N) propagators, index 0 is the drift.
    evals : (m+1, M, N) off-grid propagators, or None.
    u0 : (S, N); v0 : (S, M) or None; dw : (S, n, m).
    Returns grid trajectories (S, n+1, N) and eval trajectories (S, n+1, M) or None.
    """
    S, n, m = dw.shape
    N = u0.shape[1]
    grid = np.empty((S, n + 1, N))
    grid[:, 0] = u0
    have_eval = evals is not None
    if have_eval:
        M = evals.shape[1]
        ev = np.empty((S, n + 1, M))
        ev[:, 0] = v0
    # stack propagators so one GEMM per step yields every L_k image
    pstack = props.transpose(2, 0, 1).reshape(N, (m + 1) * N)
    if have_eval:
        estack = evals.transpose(2, 0, 1).reshape(N, (m + 1) * M)
    weights = np.empty((S, m + 1))
    weights[:, 0] = dt
    for i in range(n):
        u = grid[:, i]
        weights[:, 1:] = dw[:, i]
        lu = (u @ pstack).reshape(S, m + 1, N)
        grid[:, i + 1] = u + np.einsum("sk,skn->sn", weights, lu)
        if have_eval:
            le = (u @ estack).reshape(S, m + 1, M)
            ev[:, i + 1] = ev[:, i] + np.einsum("sk,skn->sn", weights, le)
    return grid, (ev if have_eval else None)


def fd_march(lower, cprime, denom, u0, dw):
    """Implicit finite difference steps ``M u_{i+1} = u_i (1 + dW_{i+1})`` for a batch."""
    S, n = dw.shape
    out = np.empty((S, n + 1, u0.shape[1]))
    out[:, 0] = u0
    for i in range(n):
        out[:, i + 1] = tridiag_solve(lower, cprime, denom, out[:, i] * (1.0 + dw[:, i, None]))
    return out
