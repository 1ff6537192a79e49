"""Dense linear algebra for composite finite-dimensional quantum systems."""

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
from scipy.linalg import eigh

from osotoc.exceptions import (
    DimensionCapError,
    DimensionMismatchError,
    InvalidStateError,
    NonHermitianError,
)
from osotoc.types import Axis, ComplexMatrix, RealArray, SubsystemDims

DEFAULT_MAX_DIMENSION = 4096
HERMITIAN_TOLERANCE = 1e-10
STATE_TOLERANCE = 1e-12
EIGENVALUE_FLOOR = -1e-10

_PAULI = {
    Axis.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    Axis.Y: np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    Axis.Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

OperatorT = TypeVar("OperatorT", bound="Operator")


def pauli(axis: Union[Axis, str]) -> ComplexMatrix:
    """Return a fresh copy of the Pauli matrix for an axis."""
    return _PAULI[Axis(axis)].copy()


def check_dimension(dims: Iterable[int], max_dim: int = DEFAULT_MAX_DIMENSION) -> int:
    """Return the product of subsystem dimensions, enforcing the cap."""
    total = math.prod(int(d) for d in dims)
    if total > max_dim:
        raise DimensionCapError(total, max_dim)
    return total


def _frozen_matrix(entries: object) -> ComplexMatrix:
    matrix = np.array(entries, dtype=np.complex128)
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense square operator on a tensor-product Hilbert space."""

    entries: ComplexMatrix
    subsystem_dims: SubsystemDims

    def __post_init__(self) -> None:
        """Validate shape, factorization and finiteness."""
        matrix = _frozen_matrix(self.entries)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(
                f"Operator entries must be square, got shape {matrix.shape}"
            )
        dims = tuple(int(d) for d in self.subsystem_dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError("subsystem_dims must be positive integers")
        if math.prod(dims) != matrix.shape[0]:
            raise DimensionMismatchError(
                f"subsystem_dims {dims} do not factor dimension {matrix.shape[0]}"
            )
        if not np.all(np.isfinite(matrix)):
            raise ValueError("Operator entries must be finite")
        object.__setattr__(self, "entries", matrix)
        object.__setattr__(self, "subsystem_dims", dims)

    @classmethod
    def _trusted(
        cls: type[OperatorT], entries: ComplexMatrix, dims: Sequence[int]
    ) -> OperatorT:
        """Build an instance from entries already known to be valid."""
        instance = object.__new__(cls)
        object.__setattr__(instance, "entries", _frozen_matrix(entries))
        object.__setattr__(instance, "subsystem_dims", tuple(int(d) for d in dims))
        return instance

    @classmethod
    def identity(cls, dims: Sequence[int]) -> "Operator":
        """Identity operator on the given subsystems."""
        dim = math.prod(dims)
        return Operator._trusted(np.eye(dim, dtype=np.complex128), dims)

    @property
    def dim(self) -> int:
        """Total Hilbert-space dimension."""
        return int(self.entries.shape[0])

    def dagger(self) -> "Operator":
        """Hermitian adjoint."""
        return Operator._trusted(self.entries.conj().T, self.subsystem_dims)

    def hermitian_defect(self) -> float:
        """Largest elementwise deviation from Hermiticity."""
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def is_hermitian(self, tol: float = HERMITIAN_TOLERANCE) -> bool:
        """Check Hermiticity to an elementwise tolerance."""
        return self.hermitian_defect() <= tol

    def commutator_norm(self, other: "Operator") -> float:
        """Max-norm of the commutator with another operator."""
        self._check_same_space(other)
        commutator = self.entries @ other.entries - other.entries @ self.entries
        return float(np.max(np.abs(commutator)))

    def _check_same_space(self, other: "Operator") -> None:
        if self.dim != other.dim:
            raise DimensionMismatchError(
                f"Operator dimensions differ: {self.dim} vs {other.dim}"
            )

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator._trusted(self.entries @ other.entries, self.subsystem_dims)

    def __add__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator._trusted(self.entries + other.entries, self.subsystem_dims)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator._trusted(self.entries - other.entries, self.subsystem_dims)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator._trusted(self.entries * scalar, self.subsystem_dims)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator._trusted(-self.entries, self.subsystem_dims)


@dataclass(frozen=True, eq=False)
class State(Operator):
    """Density matrix: Hermitian, unit trace, positive semidefinite."""

    def __post_init__(self) -> None:
        """Validate the density-matrix invariants."""
        super().__post_init__()
        if self.hermitian_defect() > STATE_TOLERANCE:
            raise InvalidStateError(
                f"State is not Hermitian (defect {self.hermitian_defect():.2e})"
            )
        trace = complex(np.trace(self.entries))
        if abs(trace - 1.0) > STATE_TOLERANCE:
            raise InvalidStateError(f"State trace is {trace}, expected 1")
        lowest = float(np.min(np.linalg.eigvalsh(self.entries)))
        if lowest < EIGENVALUE_FLOOR:
            raise InvalidStateError(f"State has negative eigenvalue {lowest:.3e}")

    @classmethod
    def maximally_mixed(cls, dims: Sequence[int]) -> "State":
        """The normalized identity on the given subsystems."""
        dim = math.prod(dims)
        return cls._trusted(np.eye(dim, dtype=np.complex128) / dim, dims)

    @classmethod
    def pure(cls, vector: Sequence[complex], dims: Sequence[int]) -> "State":
        """Projector onto a normalized state vector."""
        ket = np.asarray(vector, dtype=np.complex128)
        norm = float(np.linalg.norm(ket))
        if norm == 0.0:
            raise InvalidStateError("State vector must be non-zero")
        ket = ket / norm
        return cls(np.outer(ket, ket.conj()), tuple(dims))


@dataclass(frozen=True, eq=False)
class FockSpace:
    """Truncated bosonic mode with levels 0..n_max-1."""

    n_max: int
    omega: float

    def __post_init__(self) -> None:
        """Validate the cutoff."""
        if self.n_max < 2:
            raise ValueError("n_max must be at least 2")
        if self.omega < 0:
            raise ValueError("omega must be non-negative")

    @property
    def annihilation(self) -> ComplexMatrix:
        """Truncated lowering operator a."""
        return np.diag(np.sqrt(np.arange(1, self.n_max)), k=1).astype(np.complex128)

    @property
    def levels(self) -> RealArray:
        """Occupation numbers of the truncated basis."""
        return np.arange(self.n_max, dtype=np.float64)

    @property
    def hamiltonian(self) -> Operator:
        """ω a†a on the truncated space."""
        return Operator._trusted(
            np.diag(self.omega * self.levels).astype(np.complex128), (self.n_max,)
        )

    @property
    def quadrature(self) -> ComplexMatrix:
        """a + a† on the truncated space."""
        a = self.annihilation
        return a + a.conj().T


def kron(a: Operator, b: Operator, max_dim: int = DEFAULT_MAX_DIMENSION) -> Operator:
    """Tensor product with concatenated subsystem structure."""
    dims = a.subsystem_dims + b.subsystem_dims
    check_dimension(dims, max_dim)
    entries = np.kron(a.entries, b.entries)
    if isinstance(a, State) and isinstance(b, State):
        return State._trusted(entries, dims)
    return Operator._trusted(entries, dims)


def kron_all(
    operators: Sequence[Operator], max_dim: int = DEFAULT_MAX_DIMENSION
) -> Operator:
    """Left-folded tensor product of a non-empty operator sequence."""
    if not operators:
        raise ValueError("kron_all needs at least one operator")
    return reduce(lambda left, right: kron(left, right, max_dim), operators)


def embed(
    local: ComplexMatrix,
    position: int,
    dims: Sequence[int],
) -> ComplexMatrix:
    """Place a single-subsystem matrix at `position` among `dims`."""
    left = math.prod(dims[:position])
    right = math.prod(dims[position + 1 :])
    if local.shape != (dims[position], dims[position]):
        raise DimensionMismatchError(
            f"Local operator shape {local.shape} does not match subsystem "
            f"{position} of dimension {dims[position]}"
        )
    return np.kron(np.kron(np.eye(left), local), np.eye(right)).astype(np.complex128)


class SpectralPropagator:
    """Eigendecomposition of a Hermitian generator, reusable across times."""

    def __init__(self, generator: Operator, tol: float = HERMITIAN_TOLERANCE):
        defect = generator.hermitian_defect()
        if defect > tol:
            raise NonHermitianError(
                f"Generator is not Hermitian (defect {defect:.3e} > {tol:.1e})"
            )
        hermitian = 0.5 * (generator.entries + generator.entries.conj().T)
        energies, vectors = eigh(hermitian)
        self.subsystem_dims = generator.subsystem_dims
        self._energies: RealArray = np.asarray(energies, dtype=np.float64)
        self._vectors: ComplexMatrix = np.asarray(vectors, dtype=np.complex128)

    @property
    def energies(self) -> RealArray:
        """Ascending eigenvalues of the generator."""
        return self._energies

    @property
    def ground_vector(self) -> ComplexMatrix:
        """Eigenvector of the lowest eigenvalue."""
        return self._vectors[:, 0]

    def at(self, t: float) -> Operator:
        """Return e^{-iHt}."""
        phases = np.exp(-1j * self._energies * t)
        unitary = (self._vectors * phases) @ self._vectors.conj().T
        return Operator._trusted(unitary, self.subsystem_dims)


def matexp_unitary(generator: Operator, t: float) -> Operator:
    """Return e^{-iHt} for a Hermitian H via its eigendecomposition."""
    return SpectralPropagator(generator).at(t)


def partial_trace(rho: OperatorT, keep: Iterable[int]) -> OperatorT:
    """Trace out every subsystem not listed in `keep`."""
    dims = rho.subsystem_dims
    n = len(dims)
    kept = sorted(set(int(k) for k in keep))
    if not kept:
        raise ValueError("keep must name at least one subsystem")
    if kept[0] < 0 or kept[-1] >= n:
        raise ValueError(f"keep indices {kept} out of range for {n} subsystems")

    tensor = rho.entries.reshape(dims + dims)
    rows = list(range(n))
    cols = [n + i if i in kept else i for i in range(n)]
    out = kept + [n + i for i in kept]
    reduced = np.einsum(tensor, rows + cols, out)

    kept_dims = tuple(dims[i] for i in kept)
    size = math.prod(kept_dims)
    return type(rho)._trusted(reduced.reshape(size, size), kept_dims)


def thermal_state(mode: FockSpace, beta: float) -> State:
    """Truncated Gibbs state e^{-βωn}/Z of a single mode."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if mode.omega <= 0:
        raise ValueError("mode frequency must be positive")
    weights = np.exp(-beta * mode.omega * mode.levels)
    populations = weights / weights.sum()
    return State._trusted(np.diag(populations).astype(np.complex128), (mode.n_max,))


def trace_product(operators: Sequence[Operator], rho: Operator) -> complex:
    """Tr(ops[0]·ops[1]·…·ρ), left-folded with a single final trace."""
    for index, op in enumerate(operators):
        if op.dim != rho.dim:
            raise DimensionMismatchError(
                f"Operator {index} has dimension {op.dim}, state has {rho.dim}"
            )
    if not operators:
        return complex(np.trace(rho.entries))
    product = reduce(np.matmul, (op.entries for op in operators))
    return complex(np.einsum("ij,ji->", product, rho.entries))


def basis_projector(index: int, dims: Tuple[int, ...]) -> State:
    """Projector onto a computational basis vector."""
    dim = math.prod(dims)
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for dimension {dim}")
    entries = np.zeros((dim, dim), dtype=np.complex128)
    entries[index, index] = 1.0
    return State._trusted(entries, dims)


def ensure_state(rho: Operator, label: Optional[str] = None) -> State:
    """Validate an operator as a density matrix."""
    if isinstance(rho, State):
        return rho
    try:
        return State(rho.entries, rho.subsystem_dims)
    except InvalidStateError as e:
        name = label or "operator"
        raise InvalidStateError(f"{name} is not a density matrix: {e}") from e
