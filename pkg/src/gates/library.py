"""
Gate library: standard gates, rotations, and Grover operators
"""
import logging
from dataclasses import dataclass
from typing import Dict, Optional
import numpy as np
from config.settings import UNITARY_TOL
from src.qcore.linalg import kron, phase_aligned_deviation, unitary_deviation
from src.qcore.states import subsystem_count
from src.utils.errors import ConfigError, DimensionError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GateMatrix:
    """Unitary acting on m qubits"""
    matrix: np.ndarray
    name: Optional[str] = None

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionError(f"Gate must be square, got shape {matrix.shape}")
        subsystem_count(matrix.shape[0])
        deviation = unitary_deviation(matrix)
        if deviation > UNITARY_TOL:
            raise ValidationError(
                f"Gate {self.name or ''} is not unitary (max deviation {deviation:.3e})"
            )
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

    @property
    def m(self) -> int:
        return subsystem_count(self.matrix.shape[0])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(amplitudes, dtype=complex)

    def __matmul__(self, other: "GateMatrix") -> "GateMatrix":
        return GateMatrix(self.matrix @ other.matrix)


_S2 = 1 / np.sqrt(2)

# Gate tables (qubit 0 = leftmost factor; controls on qubit 0)
GATE_MATRICES: Dict[str, np.ndarray] = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]),
    "H": _S2 * np.array([[1, 1], [1, -1]]),
    "S": np.diag([1, 1j]),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]),
    "Tdg": np.diag([1, np.exp(-1j * np.pi / 4)]),
    "cNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
    "cY": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, -1j], [0, 0, 1j, 0]]),
    "cZ": np.diag([1, 1, 1, -1]),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]),
    "sSWAP": 0.5 * np.array([[2, 0, 0, 0],
                             [0, 1 + 1j, 1 - 1j, 0],
                             [0, 1 - 1j, 1 + 1j, 0],
                             [0, 0, 0, 2]]),
    "siSWAP": _S2 * np.array([[np.sqrt(2), 0, 0, 0],
                              [0, 1, 1j, 0],
                              [0, 1j, 1, 0],
                              [0, 0, 0, np.sqrt(2)]]),
    "Toffoli": np.block([[np.eye(6), np.zeros((6, 2))],
                         [np.zeros((2, 6)), np.array([[0, 1], [1, 0]])]]),
}

GATE_ALIASES = {
    "i": "I", "identity": "I", "id": "I",
    "x": "X", "pauli-x": "X", "not": "X",
    "y": "Y", "pauli-y": "Y",
    "z": "Z", "pauli-z": "Z",
    "h": "H", "hadamard": "H",
    "s": "S", "phase": "S",
    "t": "T", "pi/8": "T",
    "tdg": "Tdg", "t†": "Tdg", "tdag": "Tdg",
    "cnot": "cNOT", "cx": "cNOT",
    "cy": "cY",
    "cz": "cZ",
    "swap": "SWAP",
    "sswap": "sSWAP", "sqrt-swap": "sSWAP",
    "siswap": "siSWAP", "sqrt-iswap": "siSWAP",
    "toffoli": "Toffoli", "ccx": "Toffoli", "ccnot": "Toffoli",
}

ROTATION_AXES = ("x", "y", "z")


def canonical_name(name: str) -> str:
    """
    Resolve a gate name or alias, case-insensitively

    Raises:
        ConfigError: If the name is unknown
    """
    if name in GATE_MATRICES:
        return name
    key = str(name).strip().lower()
    if key in GATE_ALIASES:
        return GATE_ALIASES[key]
    raise ConfigError(f"Unknown gate '{name}'")


def standard_gate(name: str) -> GateMatrix:
    """
    Exact matrix of a named gate

    Args:
        name: Gate name or alias (X, Y, Z, H, S, T, T†, cNOT, cY, cZ, SWAP, sSWAP, siSWAP, Toffoli)

    Returns:
        GateMatrix
    """
    canonical = canonical_name(name)
    return GateMatrix(GATE_MATRICES[canonical], name=canonical)


def identity_gate(n_qubits: int) -> GateMatrix:
    if n_qubits < 1:
        raise DimensionError(f"Need at least one qubit, got {n_qubits}")
    return GateMatrix(np.eye(2 ** n_qubits), name="I" if n_qubits == 1 else f"I{n_qubits}")


def rotation(axis: str, angle: float) -> GateMatrix:
    """
    Single-qubit rotation

    R_x(a) = [[cos a/2, -i sin a/2], [-i sin a/2, cos a/2]],
    R_y(b) = [[cos b/2, -sin b/2], [sin b/2, cos b/2]], R_z(d) = diag(1, e^{i d}).
    """
    axis = str(axis).lower()
    if not np.isfinite(angle):
        raise ValidationError(f"Rotation angle must be finite, got {angle}")
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    if axis == "x":
        matrix = np.array([[c, -1j * s], [-1j * s, c]])
    elif axis == "y":
        matrix = np.array([[c, -s], [s, c]])
    elif axis == "z":
        matrix = np.diag([1, np.exp(1j * angle)])
    else:
        raise ConfigError(f"Unknown rotation axis '{axis}', expected one of {ROTATION_AXES}")
    return GateMatrix(matrix, name=f"R{axis}({angle:g})")


def hadamard_all(n_qubits: int) -> np.ndarray:
    h = GATE_MATRICES["H"]
    if n_qubits == 1:
        return np.array(h, dtype=complex)
    return kron(*([h] * n_qubits))


def grover_diffusion(n_qubits: int) -> GateMatrix:
    """H^N (I - 2|0..0><0..0|) H^N"""
    if n_qubits < 1:
        raise DimensionError(f"Need at least one qubit, got {n_qubits}")
    h = hadamard_all(n_qubits)
    reflection = np.eye(2 ** n_qubits, dtype=complex)
    reflection[0, 0] = -1
    return GateMatrix(h @ reflection @ h, name=f"D{n_qubits}")


def grover_oracle(n_qubits: int, marked_index: int) -> GateMatrix:
    """Diagonal unitary flipping the sign of the marked basis state"""
    if not 0 <= marked_index < 2 ** n_qubits:
        raise DimensionError(f"Marked index {marked_index} outside {n_qubits} qubits")
    diagonal = np.ones(2 ** n_qubits, dtype=complex)
    diagonal[marked_index] = -1
    return GateMatrix(np.diag(diagonal), name=f"oracle{marked_index}")


def gate_deviation(a, b) -> float:
    """Max elementwise deviation between two gates after removing global phase"""
    return phase_aligned_deviation(getattr(a, "matrix", a), getattr(b, "matrix", b))


def equal_up_to_phase(a, b, tol: float = 1e-10) -> bool:
    return gate_deviation(a, b) < tol


__all__ = [
    "GateMatrix", "GATE_MATRICES", "GATE_ALIASES", "canonical_name", "standard_gate",
    "identity_gate", "rotation", "hadamard_all", "grover_diffusion", "grover_oracle",
    "gate_deviation", "equal_up_to_phase",
]
