"""Multipartite concurrence of pure states by three equivalent routes.

* ``two_copy_A``: sqrt(<psi psi| A |psi psi>) with A = 4 * sum of the
  even-parity, not-all-symmetric products of local projectors.
* ``reduced_rho``: 2**(1 - N/2) * sqrt((2**N - 2) - sum_T Tr rho_T**2) over
  all nonempty proper subsets T.
* ``single_observable``: 2 * sqrt(1 - p_plus), where p_plus is the
  probability that every measured subsystem pair is found symmetric.

Routes 1 and 3 run matrix-free by default; ``dense=True`` switches to the
explicit D**2 x D**2 operators, which exist as oracles and respect
``hilbert.DENSE_CAP``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .hilbert import (
    PureState,
    SignString,
    SubsystemDims,
    TwoCopyOperator,
    all_sign_strings,
    apply_sign_string_projector,
    as_dims,
    dense_sign_string_projector,
    partial_trace,
    project_subsystems,
    purity,
    two_copy,
)

ROUTES = ("two_copy_A", "reduced_rho", "single_observable")

Measured = Union[str, Sequence[int], None]


@dataclass(frozen=True)
class ConcurrenceResult:
    value: float
    route: str
    dims: SubsystemDims
    p_plus: Optional[float] = None

    def __post_init__(self):
        if self.route not in ROUTES:
            raise ValueError(f"unknown route {self.route!r}")
        if not self.value >= 0.0:
            raise ValueError(f"concurrence must be non-negative, got {self.value!r}")
        if self.p_plus is not None:
            expected = 2.0 * math.sqrt(max(0.0, 1.0 - self.p_plus))
            if abs(expected - self.value) > 1e-12:
                raise ValueError("value inconsistent with p_plus")


def _require_multipartite(psi: PureState) -> None:
    if psi.n < 2:
        raise ValueError("concurrence needs at least two subsystems")


def resolve_measured(measured: Measured, n: int) -> tuple[int, ...]:
    """Map ``"all"``, ``"drop_last"`` or an explicit index list to sorted indices."""
    if measured is None or (isinstance(measured, str) and measured == "all"):
        return tuple(range(n))
    if isinstance(measured, str):
        if measured == "drop_last":
            return tuple(range(n - 1))
        raise ValueError(f"measured must be 'all', 'drop_last' or a list of indices, got {measured!r}")
    idx = tuple(sorted(int(m) for m in measured))
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate index in measured set {idx}")
    if any(m < 0 or m >= n for m in idx):
        raise ValueError(f"measured index out of range for N={n}: {idx}")
    return idx


def enumerate_even_sign_strings(n: int) -> list[SignString]:
    """Even-parity sign strings of length n, all-'+' excluded, lexicographic."""
    if n < 2:
        raise ValueError("need N >= 2")
    return [s for s in all_sign_strings(n) if s.parity == "even" and not s.is_all_plus]


def build_dense_A(dims) -> TwoCopyOperator:
    """A = 4 * sum over even sign strings of the product of local projectors."""
    dims = as_dims(dims)
    dims.require_dense()
    m = sum(dense_sign_string_projector(dims, s) for s in enumerate_even_sign_strings(dims.n))
    return TwoCopyOperator(dims, 4.0 * m, "A")


def build_dense_A_tilde(dims, measured: Measured = "all") -> TwoCopyOperator:
    """4 * (1 - prod_j P^j_+), the product running over ``measured``."""
    dims = as_dims(dims)
    dims.require_dense()
    positions = resolve_measured(measured, dims.n)
    sym = dense_sign_string_projector(dims, SignString.all_plus(len(positions)), positions)
    m = 4.0 * (np.eye(dims.two_copy_dim, dtype=np.complex128) - sym)
    return TwoCopyOperator(dims, m, "A_tilde")


def concurrence_two_copy(psi: PureState, dense: bool = False) -> ConcurrenceResult:
    _require_multipartite(psi)
    vec = two_copy(psi)
    if dense:
        expval = build_dense_A(psi.dims).expectation(vec)
    else:
        expval = 0.0
        for s in enumerate_even_sign_strings(psi.n):
            w = apply_sign_string_projector(vec, psi.dims, s)
            expval += float(np.vdot(w, w).real)
        expval *= 4.0
    return ConcurrenceResult(math.sqrt(max(0.0, expval)), "two_copy_A", psi.dims)


def reduced_purities(psi: PureState) -> dict[tuple[int, ...], float]:
    """Tr rho_T**2 for every nonempty proper subset T (subset and complement both listed)."""
    n = psi.n
    out = {}
    for size in range(1, n):
        for keep in itertools.combinations(range(n), size):
            out[keep] = purity(partial_trace(psi, keep))
    return out


def concurrence_reduced(psi: PureState) -> ConcurrenceResult:
    _require_multipartite(psi)
    n = psi.n
    total = sum(reduced_purities(psi).values())
    radicand = max(0.0, (2.0**n - 2.0) - total)
    return ConcurrenceResult(2.0 ** (1.0 - n / 2.0) * math.sqrt(radicand), "reduced_rho", psi.dims)


def p_plus_exact(psi: PureState, measured: Measured = "drop_last", dense: bool = False) -> float:
    """Probability that every measured pair (subsystem, copy) is found symmetric."""
    _require_multipartite(psi)
    positions = resolve_measured(measured, psi.n)
    if len(positions) < psi.n - 1:
        raise ValueError(
            f"measuring {len(positions)} of {psi.n} subsystems; at most one may be left out"
        )
    vec = two_copy(psi)
    if dense:
        a_tilde = build_dense_A_tilde(psi.dims, positions)
        p = 1.0 - a_tilde.expectation(vec) / 4.0
    else:
        w = project_subsystems(vec, psi.dims, positions, [1] * len(positions))
        p = float(np.vdot(w, w).real)
    return min(1.0, max(0.0, p))


def concurrence_single_observable(
    psi: PureState, measured: Measured = "drop_last", dense: bool = False
) -> ConcurrenceResult:
    p = p_plus_exact(psi, measured, dense=dense)
    return ConcurrenceResult(2.0 * math.sqrt(max(0.0, 1.0 - p)), "single_observable", psi.dims, p_plus=p)


def concurrence(psi: PureState, route: str = "single_observable", **kwargs) -> ConcurrenceResult:
    """Dispatch to one of the three routes by name."""
    funcs = {
        "two_copy_A": concurrence_two_copy,
        "reduced_rho": concurrence_reduced,
        "single_observable": concurrence_single_observable,
    }
    if route not in funcs:
        raise ValueError(f"unknown route {route!r}; choose from {ROUTES}")
    return funcs[route](psi, **kwargs)
