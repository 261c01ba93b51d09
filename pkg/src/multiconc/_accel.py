"""Hot kernels for two-copy state vectors.

Every kernel has a numba implementation and a pure-numpy twin. The active
pair is chosen once at import time from the ``MULTICONC_BACKEND``
environment variable (``numba`` or ``numpy``); numba is the default when it
imports cleanly. Both variants stay importable so benchmarks and tests can
compare them directly.

Two-copy layout: a vector of length D**2 reshaped to ``dims + dims`` in
row-major order, i.e. all original subsystems first, then all copies, with
copy axis ``n + j`` paired with original axis ``j``.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_requested = os.environ.get("MULTICONC_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"MULTICONC_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

BACKEND = "numba" if (_requested == "numba" and numba is not None) else "numpy"


def pair_strides(dims: np.ndarray, j: int) -> tuple[int, int]:
    """Flat strides of original axis ``j`` and its copy axis in the two-copy layout."""
    dims = np.asarray(dims, dtype=np.int64)
    full = np.concatenate([dims, dims])
    strides = np.ones(full.size, dtype=np.int64)
    for k in range(full.size - 2, -1, -1):
        strides[k] = strides[k + 1] * full[k + 1]
    return int(strides[j]), int(strides[dims.size + j])


# ---------------------------------------------------------------- numpy path

def project_pair_numpy(vec: np.ndarray, dims: np.ndarray, j: int, sign: int) -> np.ndarray:
    """Apply (1 + sign*S_j)/2 to a two-copy vector, S_j swapping pair ``j``."""
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    t = vec.reshape(dims + dims)
    out = 0.5 * (t + sign * np.swapaxes(t, j, n + j))
    return out.reshape(-1)


def swap_copies_numpy(vec: np.ndarray, total_dim: int) -> np.ndarray:
    """Exchange the two full copies: |a>|b> -> |b>|a>."""
    return vec.reshape(total_dim, total_dim).T.reshape(-1).copy()


# ---------------------------------------------------------------- numba path

if numba is not None:

    @numba.njit(cache=True)
    def _project_pair_inplace(vec, d, s_orig, s_copy, sign):
        # flat index = o*d*s_orig + x*s_orig + m*d*s_copy + y*s_copy + r
        half_sym = 0.5 * (1.0 + sign)
        n_outer = vec.shape[0] // (d * s_orig)
        n_mid = s_orig // (d * s_copy)
        for o in range(n_outer):
            for m in range(n_mid):
                base = o * d * s_orig + m * d * s_copy
                for x in range(d):
                    diag = base + x * s_orig + x * s_copy
                    for r in range(s_copy):
                        vec[diag + r] = half_sym * vec[diag + r]
                    for y in range(x + 1, d):
                        i0 = base + x * s_orig + y * s_copy
                        k0 = base + y * s_orig + x * s_copy
                        for r in range(s_copy):
                            a = vec[i0 + r]
                            b = vec[k0 + r]
                            vec[i0 + r] = 0.5 * (a + sign * b)
                            vec[k0 + r] = 0.5 * (b + sign * a)

    @numba.njit(cache=True)
    def _swap_copies(vec, total_dim):
        out = np.empty_like(vec)
        for a in range(total_dim):
            for b in range(total_dim):
                out[b * total_dim + a] = vec[a * total_dim + b]
        return out

    def project_pair_numba(vec: np.ndarray, dims: np.ndarray, j: int, sign: int) -> np.ndarray:
        s_orig, s_copy = pair_strides(dims, j)
        out = np.array(vec, dtype=np.complex128, copy=True)
        _project_pair_inplace(out, int(dims[j]), s_orig, s_copy, float(sign))
        return out

    def swap_copies_numba(vec: np.ndarray, total_dim: int) -> np.ndarray:
        return _swap_copies(np.ascontiguousarray(vec, dtype=np.complex128), int(total_dim))

else:  # pragma: no cover
    project_pair_numba = None
    swap_copies_numba = None


if BACKEND == "numba":
    project_pair = project_pair_numba
    swap_copies = swap_copies_numba
else:
    project_pair = project_pair_numpy
    swap_copies = swap_copies_numpy
