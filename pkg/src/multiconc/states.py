"""Canonical and random state constructors."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .hilbert import DEFAULT_TWO_COPY_CAP, NORM_TOL, DensityMatrix, PureState, SubsystemDims, as_dims, tensor_product


def ghz(n: int, d: int = 2, cap: int = DEFAULT_TWO_COPY_CAP) -> PureState:
    """(sum_k |k>^{(x) n}) / sqrt(d)."""
    if n < 2 or d < 2:
        raise ValueError(f"ghz needs n >= 2 and d >= 2, got n={n}, d={d}")
    dims = SubsystemDims((d,) * n, cap=cap)
    amps = np.zeros(dims.total_dim, dtype=np.complex128)
    # |k k ... k> sits at k * (d**n - 1) / (d - 1)
    step = (d**n - 1) // (d - 1)
    amps[np.arange(d) * step] = 1.0 / np.sqrt(d)
    return PureState(dims, amps)


def w_state(n: int, cap: int = DEFAULT_TWO_COPY_CAP) -> PureState:
    """Equal superposition of the n single-excitation qubit basis states."""
    if n < 2:
        raise ValueError(f"w_state needs n >= 2, got {n}")
    dims = SubsystemDims((2,) * n, cap=cap)
    amps = np.zeros(dims.total_dim, dtype=np.complex128)
    amps[[1 << k for k in range(n)]] = 1.0 / np.sqrt(n)
    return PureState(dims, amps)


def product_state(locals_: Sequence[np.ndarray], cap: int = DEFAULT_TWO_COPY_CAP) -> PureState:
    vecs = [np.asarray(v, dtype=np.complex128).reshape(-1) for v in locals_]
    for v in vecs:
        if abs(np.linalg.norm(v) - 1.0) > NORM_TOL:
            raise ValueError(f"local state {v} is not normalized")
    return PureState(SubsystemDims(tuple(v.size for v in vecs), cap=cap), tensor_product(vecs))


def random_pure(dims, seed: int) -> PureState:
    """Haar-random pure state from a normalized complex Gaussian vector."""
    dims = as_dims(dims)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(dims.total_dim) + 1j * rng.standard_normal(dims.total_dim)
    return PureState(dims, z / np.linalg.norm(z))


def random_local(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def random_mixed(dims, seed: int, rank: int | None = None) -> DensityMatrix:
    """Normalized Wishart matrix G G^dagger / Tr(G G^dagger)."""
    dims = as_dims(dims)
    D = dims.total_dim
    rank = D if rank is None else rank
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((D, rank)) + 1j * rng.standard_normal((D, rank))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(dims, m / np.trace(m).real)


def depolarized(psi: PureState, visibility: float) -> DensityMatrix:
    """visibility * |psi><psi| + (1 - visibility) * 1/D."""
    p = float(visibility)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {visibility!r}")
    D = psi.dims.total_dim
    m = p * np.outer(psi.amplitudes, psi.amplitudes.conj()) + (1.0 - p) * np.eye(D) / D
    return DensityMatrix(psi.dims, m)
