"""Per-path stepping loops, JIT-compiled when numba is available.

The loops are written in plain scalar Python so the same source runs
uncompiled if numba is missing; semantics are identical either way.
"""

from __future__ import annotations

import math

# Log-scale magnitude at which a path is declared exploded.  Silent clamping
# would corrupt statistics, so the caller aborts the path instead.
LOG_OVERFLOW_LIMIT = 700.0


def _log_euler_loop(
    u, v, drift1, b1, K1, e1, a1, dW1, drift2, b2, K2, e2, a2, dW2, h, jln1, jln2
):
    """Euler step of the log-state; returns -1 on success, else the first
    grid index whose state left the representable range."""
    n = h.shape[0]
    for k in range(n):
        eu = math.exp(u[k])
        ev = math.exp(v[k])
        du = (drift1[k] - b1[k] * eu / (K1[k] + ev) - e1[k] * eu) * h[k]
        dv = (drift2[k] - b2[k] * ev / (K2[k] + eu) - e2[k] * ev) * h[k]
        un = u[k] + du + a1[k] * dW1[k] + jln1[k + 1]
        vn = v[k] + dv + a2[k] * dW2[k] + jln2[k + 1]
        if abs(un) > LOG_OVERFLOW_LIMIT or abs(vn) > LOG_OVERFLOW_LIMIT:
            return k + 1
        u[k + 1] = un
        v[k + 1] = vn
    return -1


def _direct_euler_loop(
    x, y, drift1, b1, K1, e1, a1, dW1, drift2, b2, K2, e2, a2, dW2, h, jfac1, jfac2
):
    """Euler step of the raw state with multiplicative jump factors; returns
    -1 on success, else the first grid index where positivity failed."""
    n = h.shape[0]
    for k in range(n):
        xk = x[k]
        yk = y[k]
        dx = xk * (
            (drift1[k] - b1[k] * xk / (K1[k] + yk) - e1[k] * xk) * h[k]
            + a1[k] * dW1[k]
        )
        dy = yk * (
            (drift2[k] - b2[k] * yk / (K2[k] + xk) - e2[k] * yk) * h[k]
            + a2[k] * dW2[k]
        )
        xn = (xk + dx) * jfac1[k + 1]
        yn = (yk + dy) * jfac2[k + 1]
        if xn <= 0.0 or yn <= 0.0:
            return k + 1
        x[k + 1] = xn
        y[k + 1] = yn
    return -1


log_euler_loop_py = _log_euler_loop
direct_euler_loop_py = _direct_euler_loop

try:  # pragma: no cover - exercised implicitly by every simulation test
    from numba import njit

    log_euler_loop = njit(cache=True, nogil=True)(_log_euler_loop)
    direct_euler_loop = njit(cache=True, nogil=True)(_direct_euler_loop)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    log_euler_loop = log_euler_loop_py
    direct_euler_loop = direct_euler_loop_py
    HAVE_NUMBA = False
