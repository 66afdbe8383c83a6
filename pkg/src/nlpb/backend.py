"""Kernel backend selection: numba-jitted inner loops with a pure-numpy fallback.

The two kernels below dominate the runtime of the quadrature-heavy checks
(resolution-of-identity accumulation and moment sums). Everything else in the
package is LAPACK/BLAS-bound dense linear algebra where numba buys nothing.

Set ``NLPB_BACKEND=numpy`` to force the fallback path, ``NLPB_BACKEND=numba``
to require the jitted path (ImportError if numba is missing). Unset, numba is
used when importable. ``benchmarks/bench_kernels.py`` compares both paths.
"""

import os

import numpy as np

_ENV_FLAG = "NLPB_BACKEND"


def _requested_backend() -> str:
    value = os.environ.get(_ENV_FLAG, "").strip().lower()
    if value not in ("", "numba", "numpy"):
        raise RuntimeError(
            f"{_ENV_FLAG} must be 'numba' or 'numpy', got {value!r}"
        )
    return value


def polar_outer_sum_numpy(coeff_rows: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Sum of weighted outer products sum_p w_p |u_p><u_p| over grid rows u_p."""
    u = np.ascontiguousarray(coeff_rows, dtype=np.complex128)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    return np.einsum("p,pn,pm->nm", w, u, u.conj(), optimize=True)


def weighted_power_sums_numpy(nodes: np.ndarray, weights: np.ndarray, kmax: int) -> np.ndarray:
    """Even-moment sums s_k = sum_j w_j * r_j**(2k) for k = 0..kmax."""
    r2 = np.asarray(nodes, dtype=np.float64) ** 2
    w = np.asarray(weights, dtype=np.float64)
    out = np.empty(kmax + 1)
    acc = np.array(w)
    out[0] = acc.sum()
    for k in range(1, kmax + 1):
        acc = acc * r2
        out[k] = acc.sum()
    return out


_FORCED = _requested_backend()

if _FORCED in ("", "numba"):
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        if _FORCED == "numba":
            raise
        _HAVE_NUMBA = False
else:
    _HAVE_NUMBA = False

if _HAVE_NUMBA:

    @njit(cache=True)
    def _polar_outer_sum_jit(u, w):  # pragma: no cover - exercised via wrapper
        rows, n = u.shape
        out = np.zeros((n, n), dtype=np.complex128)
        for p in range(rows):
            wp = w[p]
            for i in range(n):
                lhs = wp * u[p, i]
                for j in range(n):
                    out[i, j] += lhs * np.conj(u[p, j])
        return out

    @njit(cache=True)
    def _weighted_power_sums_jit(r, w, kmax):  # pragma: no cover
        m = r.shape[0]
        out = np.zeros(kmax + 1)
        for j in range(m):
            r2 = r[j] * r[j]
            term = w[j]
            out[0] += term
            for k in range(1, kmax + 1):
                term *= r2
                out[k] += term
        return out

    def polar_outer_sum_numba(coeff_rows: np.ndarray, weights: np.ndarray) -> np.ndarray:
        u = np.ascontiguousarray(coeff_rows, dtype=np.complex128)
        w = np.ascontiguousarray(weights, dtype=np.float64)
        return _polar_outer_sum_jit(u, w)

    def weighted_power_sums_numba(nodes: np.ndarray, weights: np.ndarray, kmax: int) -> np.ndarray:
        r = np.ascontiguousarray(nodes, dtype=np.float64)
        w = np.ascontiguousarray(weights, dtype=np.float64)
        return _weighted_power_sums_jit(r, w, int(kmax))

    ACTIVE = "numba"
    polar_outer_sum = polar_outer_sum_numba
    weighted_power_sums = weighted_power_sums_numba
else:
    ACTIVE = "numpy"
    polar_outer_sum_numba = None
    weighted_power_sums_numba = None
    polar_outer_sum = polar_outer_sum_numpy
    weighted_power_sums = weighted_power_sums_numpy
