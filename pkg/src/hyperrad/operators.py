"""Operator algebra on truncated composite Hilbert spaces.

Conventions used throughout the package:

* subsystem ordering is qubit(s) first, cavity last; the canonical space
  for the two-qubit system is ``[2, 2, n_max + 1]``
* qubit basis order is (ground, excited), Fock basis ascending
* composite indices follow Kronecker-product (row-major) ordering
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-10
PSD_EIG_FLOOR = -1e-8


class DimensionError(ValueError):
    """Invalid subsystem dimensions or a size mismatch."""


class SpaceMismatchError(ValueError):
    """Operands live on different composite spaces."""


class StateValidationError(ValueError):
    """A density matrix violates Hermiticity, trace or positivity."""


@dataclass(frozen=True)
class SpaceDescriptor:
    """Ordered subsystem dimensions of a composite Hilbert space."""

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.dims:
            raise DimensionError("space needs at least one subsystem")
        if any((not isinstance(d, (int, np.integer))) or d < 1 for d in self.dims):
            raise DimensionError(f"subsystem dimensions must be integers >= 1, got {self.dims}")
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_slots(self) -> int:
        return len(self.dims)

    @property
    def cavity_dim(self) -> int:
        """Dimension of the last slot, which holds the cavity by convention."""
        return self.dims[-1]

    @staticmethod
    def cavity(n_max: int) -> "SpaceDescriptor":
        if n_max < 1:
            raise DimensionError(f"n_max must be >= 1, got {n_max}")
        return SpaceDescriptor((n_max + 1,))

    @staticmethod
    def qubit_cavity(n_max: int) -> "SpaceDescriptor":
        return SpaceDescriptor((2,) + SpaceDescriptor.cavity(n_max).dims)

    @staticmethod
    def two_qubit_cavity(n_max: int) -> "SpaceDescriptor":
        return SpaceDescriptor((2, 2) + SpaceDescriptor.cavity(n_max).dims)


def _as_readonly(data: np.ndarray) -> np.ndarray:
    arr = np.array(data, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


class Operator:
    """Complex square matrix tagged with the space it acts on.

    Instances are immutable; arithmetic returns new operators. Only
    same-space operands compose.
    """

    __slots__ = ("space", "data")

    def __init__(self, space: SpaceDescriptor, data: np.ndarray):
        arr = _as_readonly(data)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"operator data must be square, got shape {arr.shape}")
        if arr.shape[0] != space.total_dim:
            raise DimensionError(
                f"operator size {arr.shape[0]} does not match space dimension {space.total_dim}"
            )
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Operator is immutable")

    def _check_space(self, other: "Operator") -> None:
        if self.space != other.space:
            raise SpaceMismatchError(f"space mismatch: {self.space.dims} vs {other.space.dims}")

    def dagger(self) -> "Operator":
        return Operator(self.space, self.data.conj().T)

    def is_hermitian(self, atol: float = HERMITICITY_ATOL) -> bool:
        return bool(np.max(np.abs(self.data - self.data.conj().T)) <= atol)

    @staticmethod
    def identity(space: SpaceDescriptor) -> "Operator":
        return Operator(space, np.eye(space.total_dim, dtype=complex))

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check_space(other)
        return Operator(self.space, self.data @ other.data)

    def __add__(self, other: "Operator") -> "Operator":
        self._check_space(other)
        return Operator(self.space, self.data + other.data)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_space(other)
        return Operator(self.space, self.data - other.data)

    def __neg__(self) -> "Operator":
        return Operator(self.space, -self.data)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.space, self.data * scalar)

    __rmul__ = __mul__

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Operator(dims={self.space.dims})"


class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite state on a space.

    Contracts are validated on construction: max elementwise asymmetry
    below 1e-10, trace within 1e-10 of one, smallest eigenvalue above
    -1e-8 (numerical positivity).
    """

    __slots__ = ("space", "data")

    def __init__(self, space: SpaceDescriptor, data: np.ndarray):
        arr = _as_readonly(data)
        if arr.shape != (space.total_dim, space.total_dim):
            raise DimensionError(
                f"state shape {arr.shape} does not match space dimension {space.total_dim}"
            )
        asym = float(np.max(np.abs(arr - arr.conj().T)))
        if asym > HERMITICITY_ATOL:
            raise StateValidationError(f"state not Hermitian: max |rho - rho^dag| = {asym:.3e}")
        tr = complex(np.trace(arr))
        if abs(tr - 1.0) > TRACE_ATOL:
            raise StateValidationError(f"state trace {tr} deviates from 1 beyond {TRACE_ATOL}")
        min_eig = float(np.linalg.eigvalsh(0.5 * (arr + arr.conj().T))[0])
        if min_eig < PSD_EIG_FLOOR:
            raise StateValidationError(f"state has negative eigenvalue {min_eig:.3e}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("DensityMatrix is immutable")

    @staticmethod
    def from_vector(space: SpaceDescriptor, psi: np.ndarray) -> "DensityMatrix":
        """Pure state |psi><psi| from a (normalized or not) state vector."""
        v = np.asarray(psi, dtype=complex).reshape(-1)
        if v.size != space.total_dim:
            raise DimensionError(f"vector length {v.size} != space dimension {space.total_dim}")
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise StateValidationError("zero vector cannot be normalized to a state")
        v = v / nrm
        return DensityMatrix(space, np.outer(v, v.conj()))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"DensityMatrix(dims={self.space.dims})"


def fock_annihilation(n_max: int) -> Operator:
    """Cavity annihilation operator a on the Fock space truncated at n_max.

    Matrix elements a[n-1, n] = sqrt(n); the commutator [a, a^dag] equals
    the identity except for the (n_max, n_max) entry, a truncation artifact.
    """
    if n_max < 1:
        raise DimensionError(f"n_max must be >= 1, got {n_max}")
    data = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1)
    return Operator(SpaceDescriptor.cavity(n_max), data.astype(complex))


def qubit_lowering() -> Operator:
    """Qubit lowering operator |g><e| in the (g, e) basis."""
    data = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    return Operator(SpaceDescriptor((2,)), data)


def tensor(ops: Sequence[Operator]) -> Operator:
    """Kronecker product of operators in list order."""
    if not ops:
        raise DimensionError("tensor of an empty operator list is undefined")
    data = ops[0].data
    dims: tuple[int, ...] = ops[0].space.dims
    for op in ops[1:]:
        data = np.kron(data, op.data)
        dims = dims + op.space.dims
    return Operator(SpaceDescriptor(dims), data)


def embed(op: Operator, slot: int, space: SpaceDescriptor) -> Operator:
    """Lift a single-slot operator into `space`, acting as identity elsewhere."""
    if slot < 0 or slot >= space.n_slots:
        raise DimensionError(f"slot {slot} out of range for {space.n_slots} subsystems")
    if op.space.total_dim != space.dims[slot]:
        raise DimensionError(
            f"operator dimension {op.space.total_dim} does not fit slot {slot} "
            f"of size {space.dims[slot]}"
        )
    factors = [Operator.identity(SpaceDescriptor((d,))) for d in space.dims]
    factors[slot] = Operator(SpaceDescriptor((space.dims[slot],)), op.data)
    out = tensor(factors)
    return Operator(space, out.data)


def cavity_annihilator(space: SpaceDescriptor) -> Operator:
    """Annihilation operator embedded on the cavity (last) slot of `space`."""
    n_max = space.cavity_dim - 1
    if space.n_slots == 1:
        return fock_annihilation(n_max)
    return embed(fock_annihilation(n_max), space.n_slots - 1, space)


def expect(op: Operator, rho: DensityMatrix) -> complex:
    """Expectation value Tr(op . rho)."""
    if op.space != rho.space:
        raise SpaceMismatchError(f"space mismatch: {op.space.dims} vs {rho.space.dims}")
    return complex(np.einsum("ij,ji->", op.data, rho.data))


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the kept slots (relative order preserved)."""
    keep_set = sorted(set(int(k) for k in keep))
    n = rho.space.n_slots
    if not keep_set:
        raise DimensionError("keep set must be non-empty")
    if keep_set[0] < 0 or keep_set[-1] >= n:
        raise DimensionError(f"keep slots {keep_set} out of range for {n} subsystems")
    dims = rho.space.dims
    arr = rho.data.reshape(dims + dims)
    # trace out the discarded slots from highest index down so axis numbers stay valid
    remaining = list(range(n))
    for slot in sorted(set(range(n)) - set(keep_set), reverse=True):
        ax = remaining.index(slot)
        arr = np.trace(arr, axis1=ax, axis2=ax + len(remaining))
        remaining.remove(slot)
    kept_dims = tuple(dims[k] for k in keep_set)
    d = int(np.prod(kept_dims))
    return DensityMatrix(SpaceDescriptor(kept_dims), arr.reshape(d, d))


def trace_distance(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """Trace distance (1/2)||rho1 - rho2||_1."""
    if rho1.space != rho2.space:
        raise SpaceMismatchError("trace distance requires matching spaces")
    eigs = np.linalg.eigvalsh(rho1.data - rho2.data)
    return float(0.5 * np.sum(np.abs(eigs)))
