"""Finite-shot simulation of the two-copy symmetric/antisymmetric measurement.

Each shot projects every measured (subsystem, copy) pair onto its symmetric
(+) or antisymmetric (-) subspace, so one shot yields a sign string over the
measured positions. From the counts we estimate

* p_plus, the all-'+' frequency, and the concurrence 2*sqrt(1 - p_plus);
* the mixedness 1 - Tr rho**2 as twice the odd-parity frequency (only when
  every subsystem is measured).
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _accel
from .concurrence import Measured, resolve_measured
from .hilbert import (
    EQ_TOL,
    DENSE_CAP,
    DensityMatrix,
    PureState,
    SignString,
    SubsystemDims,
    all_sign_strings,
    dense_global_projector,
    dense_sign_string_projector,
    purity,
    reduced_matrix,
)

DEFAULT_BATCH = 1 << 16
STDERR_FLOOR = 1e-12


@dataclass(frozen=True)
class OutcomeDistribution:
    dims: SubsystemDims
    measured: tuple[int, ...]
    probs: dict[SignString, float]

    def __post_init__(self):
        total = sum(self.probs.values())
        if abs(total - 1.0) > EQ_TOL:
            raise ValueError(f"outcome probabilities sum to {total!r}")

    @property
    def complete(self) -> bool:
        return len(self.measured) == self.dims.n

    def odd_parity_mass(self) -> float:
        return sum(p for s, p in self.probs.items() if s.parity == "odd")

    def p_plus(self) -> float:
        return self.probs[SignString.all_plus(len(self.measured))]


@dataclass(frozen=True)
class SampleSummary:
    counts: dict[SignString, int]
    shots: int
    seed: int
    measured: tuple[int, ...]
    n_subsystems: int
    p_plus_hat: float
    concurrence_hat: float
    concurrence_stderr: float
    odd_fraction: float
    mixedness_hat: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "shots": self.shots,
            "seed": self.seed,
            "measured": list(self.measured),
            "n_subsystems": self.n_subsystems,
            "counts": {str(s): c for s, c in self.counts.items()},
            "p_plus_hat": self.p_plus_hat,
            "concurrence_hat": self.concurrence_hat,
            "concurrence_stderr": None if math.isinf(self.concurrence_stderr) else self.concurrence_stderr,
            "odd_fraction": self.odd_fraction,
            "mixedness_hat": self.mixedness_hat,
        }


def _check_measured(measured, n: int) -> tuple[int, ...]:
    positions = resolve_measured(measured, n)
    if len(positions) < n - 1:
        raise ValueError(f"measuring {len(positions)} of {n} subsystems; at most one may be left out")
    return positions


def _pure_branch_probs(vec: np.ndarray, dims: SubsystemDims, positions) -> dict[tuple, float]:
    # depth-first: only len(positions) vectors are alive at once
    d_arr = np.asarray(dims.dims, dtype=np.int64)
    out: dict[tuple, float] = {}

    def rec(v, depth, prefix):
        if depth == len(positions):
            out[prefix] = float(np.vdot(v, v).real)
            return
        plus = _accel.project_pair(v, d_arr, positions[depth], 1)
        rec(plus, depth + 1, prefix + (1,))
        rec(v - plus, depth + 1, prefix + (-1,))

    rec(vec, 0, ())
    return out


def _projector_probs(state, positions) -> dict[tuple, float]:
    dims = state.dims
    if isinstance(state, PureState):
        return _pure_branch_probs(np.kron(state.amplitudes, state.amplitudes), dims, positions)
    # rho (x) rho = sum_kl w_k w_l |e_k e_l><e_k e_l|
    w, vecs = np.linalg.eigh(state.matrix)
    keep = w > 1e-14
    w, vecs = w[keep], vecs[:, keep]
    total: dict[tuple, float] = {}
    for a in range(w.size):
        for b in range(w.size):
            vec = np.kron(vecs[:, a], vecs[:, b])
            for key, p in _pure_branch_probs(vec, dims, positions).items():
                total[key] = total.get(key, 0.0) + w[a] * w[b] * p
    return total


def _subset_purity(state, subset: tuple[int, ...]) -> float:
    if len(subset) == 0:
        return 1.0
    if len(subset) == state.dims.n:
        if isinstance(state, PureState):
            return 1.0
        return purity(state.matrix)
    return purity(reduced_matrix(state, subset))


def _purity_probs(state, positions) -> dict[tuple, float]:
    # prod_{j in M} (1 + s_j S_j)/2 = 2**-|M| sum_{T subset M} (prod_{j in T} s_j) S_T
    # and Tr[S_T (rho (x) rho)] = Tr rho_T**2
    m = len(positions)
    purities = {}
    for size in range(m + 1):
        for subset in itertools.combinations(positions, size):
            purities[subset] = _subset_purity(state, subset)
    out = {}
    for signs in itertools.product((1, -1), repeat=m):
        sign_of = dict(zip(positions, signs))
        acc = 0.0
        for subset, pur in purities.items():
            acc += math.prod(sign_of[j] for j in subset) * pur
        out[signs] = acc / 2**m
    return out


def _dense_probs(state, positions) -> dict[tuple, float]:
    dims = state.dims
    dims.require_dense()
    rho = state.density_matrix().matrix if isinstance(state, PureState) else state.matrix
    # rho (x) rho in the two-copy layout is the plain Kronecker product
    rr = np.kron(rho, rho)
    out = {}
    for s in all_sign_strings(len(positions)):
        proj = dense_sign_string_projector(dims, s, positions)
        out[s.signs] = float(np.trace(proj @ rr).real)
    return out


_METHODS = {"projector": _projector_probs, "purity": _purity_probs, "dense": _dense_probs}


def outcome_distribution(
    state: PureState | DensityMatrix, measured: Measured = "all", method: str = "auto"
) -> OutcomeDistribution:
    """Exact distribution of sign strings over the measured pairs for state (x) state.

    ``method`` is ``projector`` (matrix-free projections, default for pure
    states), ``purity`` (expansion over subset purities, default for density
    matrices) or ``dense`` (explicit operators, oracle only).
    """
    n = state.dims.n
    positions = _check_measured(measured, n)
    if method == "auto":
        method = "projector" if isinstance(state, PureState) else "purity"
    if method not in _METHODS:
        raise ValueError(f"unknown method {method!r}")
    raw = _METHODS[method](state, positions)
    probs = {SignString(k): v for k, v in sorted(raw.items(), key=lambda kv: str(SignString(kv[0])))}
    return OutcomeDistribution(state.dims, positions, probs)


def _draw_batch(child: np.random.SeedSequence, size: int, pvals: np.ndarray) -> np.ndarray:
    return np.random.default_rng(child).multinomial(size, pvals)


def sample_shots(
    dist: OutcomeDistribution,
    shots: int,
    seed: int,
    workers: int = 1,
    batch_size: int = DEFAULT_BATCH,
) -> SampleSummary:
    """Multinomial shot simulation, reproducible for a given (dist, shots, seed).

    Shots are split into fixed-size batches; batch k draws from the k-th
    child of ``SeedSequence(seed)``, so ``workers`` never changes the result.
    """
    shots = int(shots)
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    labels = list(dist.probs)
    pvals = np.clip(np.array([dist.probs[s] for s in labels], dtype=np.float64), 0.0, None)
    pvals /= pvals.sum()

    n_batches = -(-shots // batch_size)
    sizes = [min(batch_size, shots - k * batch_size) for k in range(n_batches)]
    children = np.random.SeedSequence(int(seed)).spawn(n_batches)
    if workers > 1 and n_batches > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_draw_batch, children, sizes, [pvals] * n_batches))
    else:
        parts = [_draw_batch(c, s, pvals) for c, s in zip(children, sizes)]
    totals = np.sum(parts, axis=0)

    counts = {s: int(c) for s, c in zip(labels, totals)}
    n_plus = counts.get(SignString.all_plus(len(dist.measured)), 0)
    n_odd = sum(c for s, c in counts.items() if s.parity == "odd")
    p_hat = n_plus / shots
    c_hat = 2.0 * math.sqrt(max(0.0, 1.0 - p_hat))
    if p_hat >= 1.0:
        stderr = math.inf
    else:
        sigma_p = math.sqrt(p_hat * (1.0 - p_hat) / shots)
        stderr = sigma_p / math.sqrt(max(STDERR_FLOOR, 1.0 - p_hat))
    odd_fraction = n_odd / shots
    return SampleSummary(
        counts=counts,
        shots=shots,
        seed=int(seed),
        measured=dist.measured,
        n_subsystems=dist.dims.n,
        p_plus_hat=p_hat,
        concurrence_hat=c_hat,
        concurrence_stderr=stderr,
        odd_fraction=odd_fraction,
        mixedness_hat=2.0 * odd_fraction if dist.complete else None,
    )


def estimate_mixedness(summary: SampleSummary) -> float:
    """Twice the odd-parity frequency; needs every subsystem measured."""
    if len(summary.measured) != summary.n_subsystems:
        raise ValueError("mixedness needs all subsystems measured; odd-parity events are incomplete otherwise")
    return 2.0 * summary.odd_fraction


def mixedness_stderr(odd_prob: float, shots: int) -> float:
    return 2.0 * math.sqrt(odd_prob * (1.0 - odd_prob) / shots)


def mixedness_sides(rho: PureState | DensityMatrix) -> tuple[float, Optional[float]]:
    """(1 - Tr rho**2, 2 Tr(P_minus rho (x) rho)); the second is None past the caps."""
    if isinstance(rho, PureState):
        rho = rho.density_matrix()
    lhs = 1.0 - purity(rho)
    dims = rho.dims
    if dims.two_copy_dim <= DENSE_CAP:
        p_minus = dense_global_projector(dims, -1).matrix
        rhs = 2.0 * float(np.trace(p_minus @ np.kron(rho.matrix, rho.matrix)).real)
        return lhs, rhs
    w, vecs = np.linalg.eigh(rho.matrix)
    keep = w > 1e-14
    w, vecs = w[keep], vecs[:, keep]
    if w.size**2 * dims.two_copy_dim > dims.cap:
        return lhs, None
    rhs = 0.0
    for a in range(w.size):
        for b in range(w.size):
            v = np.kron(vecs[:, a], vecs[:, b])
            anti = 0.5 * (v - _accel.swap_copies(v, dims.total_dim))
            rhs += w[a] * w[b] * float(np.vdot(anti, anti).real)
    return lhs, 2.0 * rhs


def mixedness_exact(rho: PureState | DensityMatrix) -> float:
    """1 - Tr rho**2, cross-checked against the two-copy projector when affordable."""
    lhs, rhs = mixedness_sides(rho)
    if rhs is not None and abs(lhs - rhs) > EQ_TOL:
        raise ArithmeticError(f"mixedness sides disagree: {lhs!r} vs {rhs!r}")
    return lhs
