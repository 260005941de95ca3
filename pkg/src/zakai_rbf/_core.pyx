# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops; signatures mirror ``_fallback``."""
import numpy as np
cimport numpy as cnp
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()


def truncated_profile(q, int power, r):
    cdef double[::1] qc = np.ascontiguousarray(q, dtype=np.float64)
    arr = np.asarray(r, dtype=np.float64)
    flat = np.ascontiguousarray(arr.ravel())
    cdef double[::1] rv = flat
    out = np.empty(flat.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, j, n = rv.shape[0], nq = qc.shape[0]
    cdef double x, acc, w, base
    cdef int p
    for i in range(n):
        x = rv[i]
        if x < 1.0:
            acc = qc[nq - 1]
            for j in range(nq - 2, -1, -1):
                acc = acc * x + qc[j]
            # integer power by squaring
            w = 1.0
            base = 1.0 - x
            p = power
            while p > 0:
                if p & 1:
                    w *= base
                base *= base
                p >>= 1
            ov[i] = acc * w
        else:
            ov[i] = 0.0
    return out.reshape(arr.shape)


cdef inline void _tridiag_row(const double* lower, const double* cprime,
                              const double* denom, double* y, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    y[0] = y[0] / denom[0]
    for i in range(1, n):
        y[i] = (y[i] - lower[i] * y[i - 1]) / denom[i]
    for i in range(n - 2, -1, -1):
        y[i] -= cprime[i] * y[i + 1]


def tridiag_solve(lower, cprime, denom, rhs):
    cdef double[::1] lo = np.ascontiguousarray(lower, dtype=np.float64)
    cdef double[::1] cp = np.ascontiguousarray(cprime, dtype=np.float64)
    cdef double[::1] dn = np.ascontiguousarray(denom, dtype=np.float64)
    arr = np.asarray(rhs, dtype=np.float64)
    shape = arr.shape
    out = np.ascontiguousarray(arr.reshape(-1, shape[len(shape) - 1])).copy()
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t s, rows = ov.shape[0], n = ov.shape[1]
    if lo.shape[0] < n or cp.shape[0] < n or dn.shape[0] < n:
        raise ValueError("band arrays are shorter than the right-hand side")
    if n > 0:
        with nogil:
            for s in range(rows):
                _tridiag_row(&lo[0], &cp[0], &dn[0], &ov[s, 0], n)
    return out.reshape(shape)


cdef void _apply_stack(double* stack, int width, int N, int S, double* u, int ldu,
                       double* out) noexcept nogil:
    # row-major out (S x width) = u (S x N, row stride ldu) @ stack (N x width)
    cdef char trans = b"N"
    cdef double one = 1.0, zero = 0.0
    dgemm(&trans, &trans, &width, &S, &N, &one, stack, &width, u, &ldu, &zero, out, &width)


def collocation_march(props, evals, u0, v0, double dt, dw):
    cdef double[:, :, ::1] dW = np.ascontiguousarray(dw, dtype=np.float64)
    cdef Py_ssize_t S = dW.shape[0], n = dW.shape[1], m = dW.shape[2]
    props = np.asarray(props, dtype=np.float64)
    cdef Py_ssize_t N = props.shape[1], M = 0
    cdef bint have_eval = evals is not None
    # column block k of the stack holds P_k^T, so u @ stack gives every L_k image at once
    cdef double[:, ::1] pst = np.ascontiguousarray(props.transpose(2, 0, 1).reshape(N, (m + 1) * N))
    cdef double[:, ::1] est
    cdef double[:, :, ::1] ev
    grid_arr = np.empty((S, n + 1, N))
    grid_arr[:, 0] = u0
    cdef double[:, :, ::1] g = grid_arr
    cdef double[:, ::1] lu = np.empty((S, (m + 1) * N))
    cdef double[:, ::1] le
    ev_arr = None
    if have_eval:
        evals = np.asarray(evals, dtype=np.float64)
        M = evals.shape[1]
        est = np.ascontiguousarray(evals.transpose(2, 0, 1).reshape(N, (m + 1) * M))
        le = np.empty((S, (m + 1) * M))
        ev_arr = np.empty((S, n + 1, M))
        ev_arr[:, 0] = v0
        ev = ev_arr
    if S == 0 or n == 0 or N == 0:
        return grid_arr, ev_arr
    cdef Py_ssize_t s, i, k, a
    cdef double w, acc
    cdef int ld = <int>((n + 1) * N)
    with nogil:
        for i in range(n):
            _apply_stack(&pst[0, 0], <int>((m + 1) * N), <int>N, <int>S, &g[0, i, 0], ld, &lu[0, 0])
            if have_eval:
                _apply_stack(&est[0, 0], <int>((m + 1) * M), <int>N, <int>S, &g[0, i, 0], ld, &le[0, 0])
            for s in range(S):
                for a in range(N):
                    acc = g[s, i, a] + dt * lu[s, a]
                    for k in range(1, m + 1):
                        acc = acc + dW[s, i, k - 1] * lu[s, k * N + a]
                    g[s, i + 1, a] = acc
                for a in range(M):
                    acc = ev[s, i, a] + dt * le[s, a]
                    for k in range(1, m + 1):
                        acc = acc + dW[s, i, k - 1] * le[s, k * M + a]
                    ev[s, i + 1, a] = acc
    return grid_arr, ev_arr


def fd_march(lower, cprime, denom, u0, dw):
    cdef double[::1] lo = np.ascontiguousarray(lower, dtype=np.float64)
    cdef double[::1] cp = np.ascontiguousarray(cprime, dtype=np.float64)
    cdef double[::1] dn = np.ascontiguousarray(denom, dtype=np.float64)
    cdef double[:, ::1] dW = np.ascontiguousarray(dw, dtype=np.float64)
    cdef Py_ssize_t S = dW.shape[0], n = dW.shape[1]
    cdef Py_ssize_t N = lo.shape[0]
    if N == 0 or cp.shape[0] < N or dn.shape[0] < N:
        raise ValueError("inconsistent band arrays")
    out = np.empty((S, n + 1, N))
    out[:, 0] = u0
    cdef double[:, :, ::1] o = out
    cdef Py_ssize_t s, i, a
    cdef double f
    with nogil:
        for s in range(S):
            for i in range(n):
                f = 1.0 + dW[s, i]
                for a in range(N):
                    o[s, i + 1, a] = o[s, i, a] * f
                _tridiag_row(&lo[0], &cp[0], &dn[0], &o[s, i + 1, 0], N)
    return out
