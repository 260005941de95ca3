"""Select the compiled core when it is importable, else the NumPy fallback.

Set ``ZAKAI_RBF_BACKEND=python`` to force the fallback.
"""
import os

import numpy as np

from . import _fallback

NAME = "python"
_impl = _fallback
if os.environ.get("ZAKAI_RBF_BACKEND", "").lower() not in ("python", "numpy"):
    try:
        from . import _core as _impl  # noqa: F811

        NAME = "cython"
    except ImportError:  # extension not built
        _impl = _fallback

truncated_profile = _impl.truncated_profile
tridiag_solve = _impl.tridiag_solve
collocation_march = _impl.collocation_march
fd_march = _impl.fd_march


def tridiag_factor(lower, diag, upper):
    """Thomas-algorithm factorisation of a tridiagonal matrix.

    Returns ``(cprime, denom)`` for ``tridiag_solve``. Raises ``ZeroDivisionError``
    on a zero pivot.
    """
    n = len(diag)
    cprime = [0.0] * n
    denom = [0.0] * n
    denom[0] = float(diag[0])
    if denom[0] == 0.0:
        raise ZeroDivisionError("zero pivot in row 0")
    for i in range(n):
        if i > 0:
            denom[i] = float(diag[i]) - float(lower[i]) * cprime[i - 1]
            if denom[i] == 0.0:
                raise ZeroDivisionError(f"zero pivot in row {i}")
        if i < n - 1:
            cprime[i] = float(upper[i]) / denom[i]
    return np.array(cprime), np.array(denom)
