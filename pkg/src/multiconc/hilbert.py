"""Dense tensor algebra for multi-subsystem states and two-copy operators.

Conventions
-----------
* Subsystems are indexed from 0. Amplitudes are stored row-major with
  subsystem 0 most significant.
* A two-copy vector has length D**2 and axis order
  ``(x_0, ..., x_{N-1}, y_0, ..., y_{N-1})``: every original subsystem
  precedes every copy, and copy ``y_j`` pairs with ``x_j``.
* The local projectors are P_+ = (1 + S)/2 and P_- = (1 - S)/2, with S the
  swap of a subsystem and its copy.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from . import _accel

DEFAULT_TWO_COPY_CAP = 2**20
DENSE_CAP = 256

EQ_TOL = 1e-10
PSD_TOL = 1e-8
NORM_TOL = 1e-10


class DimensionCapError(ValueError):
    """A requested construction exceeds a memory safety cap."""


@dataclass(frozen=True)
class SubsystemDims:
    """Local dimensions d_0..d_{N-1} of a composite Hilbert space.

    ``cap`` bounds the two-copy dimension D**2 and travels with every
    derived object.
    """

    dims: tuple[int, ...]
    cap: int = DEFAULT_TWO_COPY_CAP

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) < 1:
            raise ValueError("need at least one subsystem")
        if any(d < 2 for d in dims):
            raise ValueError(f"every local dimension must be >= 2, got {dims}")
        if self.two_copy_dim > self.cap:
            raise DimensionCapError(
                f"two-copy dimension {self.two_copy_dim} exceeds cap {self.cap} for dims {dims}"
            )

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    @property
    def two_copy_dim(self) -> int:
        return self.total_dim**2

    def restrict(self, keep: Sequence[int]) -> "SubsystemDims":
        return SubsystemDims(tuple(self.dims[k] for k in keep), cap=self.cap)

    def require_dense(self) -> None:
        if self.two_copy_dim > DENSE_CAP:
            raise DimensionCapError(
                f"dense two-copy operator needs {self.two_copy_dim} rows, cap is {DENSE_CAP}"
            )

    def __iter__(self):
        return iter(self.dims)

    def __len__(self):
        return len(self.dims)


def as_dims(dims) -> SubsystemDims:
    if isinstance(dims, SubsystemDims):
        return dims
    return SubsystemDims(tuple(dims))


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over the product space."""

    dims: SubsystemDims
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = as_dims(self.dims)
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)
        if amps.size != dims.total_dim:
            raise ValueError(f"expected {dims.total_dim} amplitudes, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm = {norm!r})")

    @classmethod
    def unchecked(cls, dims, amplitudes) -> "PureState":
        """Build without the normalization check. For fault injection only."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "dims", as_dims(dims))
        object.__setattr__(obj, "amplitudes", np.asarray(amplitudes, dtype=np.complex128).reshape(-1))
        return obj

    @property
    def n(self) -> int:
        return self.dims.n

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims.dims)

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite D x D matrix."""

    dims: SubsystemDims
    matrix: np.ndarray

    def __post_init__(self):
        dims = as_dims(self.dims)
        m = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)
        D = dims.total_dim
        if m.shape != (D, D):
            raise ValueError(f"expected a {D}x{D} matrix, got shape {m.shape}")
        herm_dev = np.max(np.abs(m - m.conj().T))
        if herm_dev > EQ_TOL:
            raise ValueError(f"matrix is not Hermitian (max deviation {herm_dev:.3e})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > EQ_TOL:
            raise ValueError(f"trace is {tr!r}, expected 1")
        lo = np.linalg.eigvalsh(m)[0]
        if lo < -PSD_TOL:
            raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {lo:.3e})")

    @property
    def n(self) -> int:
        return self.dims.n


_SIGN_CHARS = {"+": 1, "-": -1, "−": -1}


@dataclass(frozen=True)
class SignString:
    """Per-pair outcome pattern: +1 symmetric, -1 antisymmetric."""

    signs: tuple[int, ...]

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if any(s not in (1, -1) for s in signs):
            raise ValueError(f"signs must be +1 or -1, got {signs}")
        object.__setattr__(self, "signs", signs)

    @classmethod
    def parse(cls, text: str) -> "SignString":
        try:
            return cls(tuple(_SIGN_CHARS[c] for c in text))
        except KeyError as exc:
            raise ValueError(f"invalid sign character in {text!r}") from exc

    @classmethod
    def all_plus(cls, n: int) -> "SignString":
        return cls((1,) * n)

    @property
    def n_minus(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    @property
    def parity(self) -> str:
        return "odd" if self.n_minus % 2 else "even"

    @property
    def is_all_plus(self) -> bool:
        return self.n_minus == 0

    def __len__(self):
        return len(self.signs)

    def __str__(self):
        return "".join("+" if s > 0 else "-" for s in self.signs)


def all_sign_strings(n: int) -> list[SignString]:
    """All 2**n patterns, lexicographic with '+' before '-'."""
    return [SignString(s) for s in itertools.product((1, -1), repeat=n)]


_PROJECTOR_LABELS = ("P_plus_global", "P_minus_global", "P_sign_string")


@dataclass(frozen=True, eq=False)
class TwoCopyOperator:
    dims: SubsystemDims
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        dims = as_dims(self.dims)
        object.__setattr__(self, "dims", dims)
        m = np.asarray(self.matrix, dtype=np.complex128)
        object.__setattr__(self, "matrix", m)
        n2 = dims.two_copy_dim
        if m.shape != (n2, n2):
            raise ValueError(f"expected a {n2}x{n2} operator, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > EQ_TOL:
            raise ValueError(f"operator {self.label!r} is not Hermitian")
        if self.is_projector and np.max(np.abs(m @ m - m)) > PSD_TOL:
            raise ValueError(f"operator {self.label!r} is labelled a projector but is not idempotent")

    @property
    def is_projector(self) -> bool:
        return self.label.startswith(_PROJECTOR_LABELS)

    def expectation(self, vec: np.ndarray) -> float:
        return float(np.vdot(vec, self.matrix @ vec).real)


# ------------------------------------------------------------------ basics

def tensor_product(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product of all vectors or all matrices, in order."""
    if len(factors) == 0:
        raise ValueError("tensor_product needs at least one factor")
    arrays = [np.asarray(f) for f in factors]
    kinds = {a.ndim for a in arrays}
    if len(kinds) != 1 or kinds.pop() not in (1, 2):
        raise ValueError("factors must be all vectors or all matrices")
    return reduce(np.kron, arrays)


def _check_keep(keep: Iterable[int], n: int) -> tuple[int, ...]:
    keep = tuple(sorted(int(k) for k in keep))
    if len(set(keep)) != len(keep):
        raise ValueError(f"duplicate subsystem index in {keep}")
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"subsystem index out of range in {keep} for N={n}")
    if len(keep) == 0 or len(keep) == n:
        raise ValueError("keep must be a nonempty proper subset of the subsystems")
    return keep


def reduced_matrix(state: PureState | DensityMatrix, keep: Iterable[int]) -> np.ndarray:
    """Raw reduced density matrix on ``keep`` (no validation of the result)."""
    dims = state.dims
    keep = _check_keep(keep, dims.n)
    rest = tuple(k for k in range(dims.n) if k not in keep)
    dk = int(np.prod([dims.dims[k] for k in keep]))
    dr = int(np.prod([dims.dims[k] for k in rest]))
    if isinstance(state, PureState):
        m = np.transpose(state.tensor(), keep + rest).reshape(dk, dr)
        return m @ m.conj().T
    n = dims.n
    t = state.matrix.reshape(dims.dims + dims.dims)
    t = np.transpose(t, keep + rest + tuple(n + k for k in keep) + tuple(n + k for k in rest))
    return np.einsum("ajbj->ab", t.reshape(dk, dr, dk, dr))


def partial_trace(state: PureState | DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every subsystem not in ``keep``; kept subsystems stay in order."""
    keep = _check_keep(keep, state.dims.n)
    return DensityMatrix(state.dims.restrict(keep), reduced_matrix(state, keep))


def purity(rho: DensityMatrix | np.ndarray) -> float:
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    val = float(np.sum(np.abs(m) ** 2))
    return min(1.0, max(0.0, val))


# ------------------------------------------------------ swaps and projectors

def _sign_value(sign) -> int:
    if isinstance(sign, str):
        if sign not in _SIGN_CHARS:
            raise ValueError(f"sign must be '+' or '-', got {sign!r}")
        return _SIGN_CHARS[sign]
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    return int(sign)


def swap_operator(d: int) -> np.ndarray:
    """Permutation S|a>|b> = |b>|a> on C^d (x) C^d."""
    if d < 2:
        raise ValueError("local dimension must be >= 2")
    s = np.zeros((d * d, d * d), dtype=np.complex128)
    for a in range(d):
        for b in range(d):
            s[b * d + a, a * d + b] = 1.0
    return s


def local_projector(d: int, sign) -> np.ndarray:
    """Projector onto the symmetric (+) or antisymmetric (-) subspace of C^d (x) C^d."""
    sgn = _sign_value(sign)
    return 0.5 * (np.eye(d * d, dtype=np.complex128) + sgn * swap_operator(d))


def two_copy(psi: PureState) -> np.ndarray:
    """|psi> (x) |psi> in the two-copy layout."""
    if psi.dims.two_copy_dim > psi.dims.cap:
        raise DimensionCapError("two-copy vector exceeds cap")
    return np.kron(psi.amplitudes, psi.amplitudes)


def project_subsystems(state2: np.ndarray, dims, positions: Sequence[int], signs: Sequence[int]) -> np.ndarray:
    """Apply P_{s} on each listed subsystem pair, identity elsewhere (matrix-free)."""
    dims = as_dims(dims)
    state2 = np.asarray(state2, dtype=np.complex128).reshape(-1)
    if state2.size != dims.two_copy_dim:
        raise ValueError(f"two-copy vector has length {state2.size}, expected {dims.two_copy_dim}")
    if len(positions) != len(signs):
        raise ValueError("positions and signs differ in length")
    d_arr = np.asarray(dims.dims, dtype=np.int64)
    out = state2
    for j, s in zip(positions, signs):
        if not 0 <= j < dims.n:
            raise ValueError(f"subsystem {j} out of range")
        out = _accel.project_pair(out, d_arr, int(j), int(s))
    if out is state2:
        out = state2.copy()
    return out


def apply_sign_string_projector(state2: np.ndarray, dims, s: SignString) -> np.ndarray:
    """(P^0_{s_0} (x) ... (x) P^{N-1}_{s_{N-1}}) applied to a two-copy vector."""
    dims = as_dims(dims)
    if len(s) != dims.n:
        raise ValueError(f"sign string has length {len(s)}, expected {dims.n}")
    return project_subsystems(state2, dims, range(dims.n), s.signs)


def swap_copies(state2: np.ndarray, dims) -> np.ndarray:
    """Exchange the two full copies of a two-copy vector."""
    dims = as_dims(dims)
    return _accel.swap_copies(np.asarray(state2, dtype=np.complex128), dims.total_dim)


# ------------------------------------------------------------ dense oracles

def _pairwise_to_blocked(op: np.ndarray, dims: SubsystemDims) -> np.ndarray:
    """Reorder an operator from (x0,y0,x1,y1,...) to (x0..,y0..) axis order."""
    n = dims.n
    pair_shape = [d for d in dims.dims for _ in (0, 1)]
    t = op.reshape(pair_shape + pair_shape)
    order = [2 * j for j in range(n)] + [2 * j + 1 for j in range(n)]
    t = np.transpose(t, order + [2 * n + k for k in order])
    return t.reshape(dims.two_copy_dim, dims.two_copy_dim)


def dense_local_product(dims, factors: dict[int, np.ndarray]) -> np.ndarray:
    """Dense two-copy operator acting with ``factors[j]`` on pair j, identity elsewhere."""
    dims = as_dims(dims)
    dims.require_dense()
    mats = [factors.get(j, np.eye(d * d, dtype=np.complex128)) for j, d in enumerate(dims.dims)]
    return _pairwise_to_blocked(tensor_product(mats), dims)


def dense_sign_string_projector(dims, s: SignString, positions: Sequence[int] | None = None) -> np.ndarray:
    dims = as_dims(dims)
    positions = range(dims.n) if positions is None else positions
    factors = {j: local_projector(dims.dims[j], sgn) for j, sgn in zip(positions, s.signs)}
    return dense_local_product(dims, factors)


def dense_global_swap(dims) -> np.ndarray:
    """S|a>|b> = |b>|a> for full-system basis labels a, b."""
    dims = as_dims(dims)
    dims.require_dense()
    return swap_operator(dims.total_dim)


def dense_global_projector(dims, sign) -> TwoCopyOperator:
    """Projector onto the globally symmetric (+) or antisymmetric (-) two-copy space."""
    dims = as_dims(dims)
    sgn = _sign_value(sign)
    m = 0.5 * (np.eye(dims.two_copy_dim, dtype=np.complex128) + sgn * dense_global_swap(dims))
    return TwoCopyOperator(dims, m, "P_plus_global" if sgn > 0 else "P_minus_global")
