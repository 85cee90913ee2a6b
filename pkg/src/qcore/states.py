"""
Value types for registers of two-level systems
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Tuple, Union
import numpy as np
from scipy import linalg
from config.settings import (
    NORM_TOL, HERMITIAN_TOL, TRACE_TOL, PSD_TOL, REGISTER_ORDERING
)
from src.utils.errors import DimensionError, ValidationError

logger = logging.getLogger(__name__)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.flags.writeable = False
    return array


def subsystem_count(dim: int) -> int:
    """
    Number of two-level subsystems for a Hilbert-space dimension

    Raises:
        DimensionError: If dim is not a power of two
    """
    if dim < 1 or dim & (dim - 1):
        raise DimensionError(f"Dimension {dim} is not a power of two")
    return dim.bit_length() - 1


def _square(matrix: np.ndarray, what: str) -> np.ndarray:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"{what} must be a square matrix, got shape {matrix.shape}")
    subsystem_count(matrix.shape[0])
    return matrix


def _check_hermitian(matrix: np.ndarray, what: str):
    deviation = np.max(np.abs(matrix - matrix.conj().T)) if matrix.size else 0.0
    if deviation > HERMITIAN_TOL:
        raise ValidationError(f"{what} is not Hermitian (max deviation {deviation:.3e})")


@dataclass(frozen=True)
class RegisterLayout:
    """Qubits first, then network sites; subsystem 0 is the leftmost tensor factor"""
    n_qubits: int
    n_sites: int
    ordering: str = REGISTER_ORDERING

    def __post_init__(self):
        if self.n_qubits < 0 or self.n_sites < 0 or self.n_qubits + self.n_sites < 1:
            raise DimensionError(
                f"Invalid layout: {self.n_qubits} qubits, {self.n_sites} sites"
            )
        if self.ordering != REGISTER_ORDERING:
            raise ValidationError(f"Unsupported ordering convention: {self.ordering}")

    @property
    def n_subsystems(self) -> int:
        return self.n_qubits + self.n_sites

    @property
    def dim(self) -> int:
        return 2 ** self.n_subsystems

    @property
    def qubit_dim(self) -> int:
        return 2 ** self.n_qubits

    @property
    def site_dim(self) -> int:
        return 2 ** self.n_sites

    @property
    def qubit_indices(self) -> Tuple[int, ...]:
        return tuple(range(self.n_qubits))

    @property
    def site_indices(self) -> Tuple[int, ...]:
        return tuple(range(self.n_qubits, self.n_subsystems))

    def site(self, l: int) -> int:
        """Register index of network site l (0-based)"""
        if not 0 <= l < self.n_sites:
            raise DimensionError(f"Site {l} outside a {self.n_sites}-site network")
        return self.n_qubits + l

    def to_dict(self) -> dict:
        return {"n_qubits": self.n_qubits, "n_sites": self.n_sites, "ordering": self.ordering}

    @classmethod
    def from_dict(cls, data: dict) -> "RegisterLayout":
        return cls(int(data["n_qubits"]), int(data["n_sites"]),
                   data.get("ordering", REGISTER_ORDERING))


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Normalized amplitude vector over n two-level subsystems"""
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = _frozen(np.ravel(self.amplitudes))
        subsystem_count(amplitudes.size)
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"State norm is {norm!r}, expected 1")
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def from_vector(cls, vector, normalize: bool = True) -> "QuantumState":
        vector = np.asarray(vector, dtype=complex).ravel()
        if normalize:
            norm = np.linalg.norm(vector)
            if norm == 0:
                raise ValidationError("Cannot normalize the zero vector")
            vector = vector / norm
        return cls(vector)

    @classmethod
    def basis(cls, index: int, n: int) -> "QuantumState":
        """Computational basis state |index> on n subsystems (subsystem 0 most significant)"""
        if not 0 <= index < 2 ** n:
            raise DimensionError(f"Basis index {index} outside {n} subsystems")
        vector = np.zeros(2 ** n, dtype=complex)
        vector[index] = 1.0
        return cls(vector)

    @property
    def n(self) -> int:
        return subsystem_count(self.amplitudes.size)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.projector())


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator"""
    matrix: np.ndarray

    def __post_init__(self):
        matrix = _square(_frozen(self.matrix), "Density matrix")
        _check_hermitian(matrix, "Density matrix")
        trace = np.trace(matrix)
        if abs(trace - 1.0) > TRACE_TOL:
            raise ValidationError(f"Density matrix trace is {trace!r}, expected 1")
        lowest = linalg.eigvalsh(matrix)[0]
        if lowest < -PSD_TOL:
            raise ValidationError(f"Density matrix has negative eigenvalue {lowest:.3e}")
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityMatrix":
        return cls(np.eye(2 ** n, dtype=complex) / 2 ** n)

    @property
    def n(self) -> int:
        return subsystem_count(self.matrix.shape[0])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Hermitian operator in energy units of the chosen reference scale (hbar = 1)"""
    matrix: np.ndarray

    def __post_init__(self):
        matrix = _square(_frozen(self.matrix), "Hamiltonian")
        _check_hermitian(matrix, "Hamiltonian")
        object.__setattr__(self, "matrix", matrix)

    @property
    def n(self) -> int:
        return subsystem_count(self.matrix.shape[0])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eigensystem(self) -> Tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and eigenvectors, computed once per operator"""
        logger.debug(f"Diagonalizing {self.dim}x{self.dim} Hamiltonian")
        return linalg.eigh(self.matrix)

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        if self.dim != other.dim:
            raise DimensionError(f"Cannot add operators of dimension {self.dim} and {other.dim}")
        return HermitianOperator(self.matrix + other.matrix)


Operator = Union[np.ndarray, HermitianOperator, DensityMatrix]
