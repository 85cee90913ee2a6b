"""
Target operations: unitary gates and the amplitude-damping channel
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple
import numpy as np
from config.settings import MEASURE_OVERLAP, MEASURE_UHLMANN
from src.gates.circuits import compose_circuit, load_builtin_circuit
from src.gates.library import GateMatrix, identity_gate, standard_gate
from src.qcore.states import DensityMatrix
from src.utils.errors import ConfigError, DimensionError, ValidationError

logger = logging.getLogger(__name__)

KIND_UNITARY = "unitary"
KIND_DAMPING = "amplitude-damping"
CHANNEL_KINDS = (KIND_UNITARY, KIND_DAMPING)


def decay_probability(gamma: float, t: float) -> float:
    """p = 1 - exp(-gamma t), with p = 0 whenever gamma = 0"""
    if gamma < 0 or t < 0:
        raise ValidationError(f"gamma and t must be non-negative, got {gamma}, {t}")
    if gamma == 0:
        return 0.0
    return float(-np.expm1(-gamma * t))


def amplitude_damping_kraus(gamma: float, t: float) -> np.ndarray:
    """Kraus pair K0 = diag(1, sqrt(1-p)), K1 = sqrt(p)|0><1|, shape (2, 2, 2)"""
    p = decay_probability(gamma, t)
    k0 = np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(p)], [0, 0]], dtype=complex)
    return np.stack([k0, k1])


def damp_matrices(rhos: np.ndarray, gamma: float, t: float) -> np.ndarray:
    """Closed-form amplitude damping on a stack of (m, 2, 2) matrices"""
    p = decay_probability(gamma, t)
    rhos = np.asarray(rhos, dtype=complex)
    out = np.empty_like(rhos)
    out[..., 0, 0] = rhos[..., 0, 0] + p * rhos[..., 1, 1]
    out[..., 1, 1] = (1 - p) * rhos[..., 1, 1]
    out[..., 0, 1] = np.sqrt(1 - p) * rhos[..., 0, 1]
    out[..., 1, 0] = np.sqrt(1 - p) * rhos[..., 1, 0]
    return out


def amplitude_damping_output(rho_in: DensityMatrix, gamma: float, t: float) -> DensityMatrix:
    """
    Exact solution of the single-qubit amplitude-damping master equation

    Args:
        rho_in: One-qubit input, |1> the decaying excited state
        gamma: Decay strength
        t: Propagation time (t = inf gives full decay)

    Returns:
        Output density matrix
    """
    if rho_in.dim != 2:
        raise DimensionError(f"Amplitude damping acts on one qubit, got dimension {rho_in.dim}")
    return DensityMatrix(damp_matrices(rho_in.matrix, gamma, t))


@dataclass(frozen=True, eq=False)
class ChannelTarget:
    """
    What the network should do to the qubits: a unitary gate or amplitude damping

    `source` records how a unitary was named (gate or circuit) for persistence.
    """
    kind: str
    gate: Optional[GateMatrix] = None
    gamma: float = 0.0
    t: float = 0.0
    source: Optional[Dict] = None

    def __post_init__(self):
        if self.kind not in CHANNEL_KINDS:
            raise ConfigError(f"Unknown channel kind '{self.kind}', expected one of {CHANNEL_KINDS}")
        if self.kind == KIND_UNITARY and self.gate is None:
            raise ConfigError("Unitary target needs a gate")
        if self.gamma < 0 or self.t < 0:
            raise ValidationError(f"gamma and t must be non-negative, got {self.gamma}, {self.t}")

    @classmethod
    def unitary(cls, gate: GateMatrix, source: Optional[Dict] = None) -> "ChannelTarget":
        return cls(KIND_UNITARY, gate=gate, source=source or {"matrix": _matrix_record(gate.matrix)})

    @classmethod
    def from_gate(cls, name: str) -> "ChannelTarget":
        if str(name).lower() in ("identity2", "i2"):
            return cls(KIND_UNITARY, gate=identity_gate(2), source={"gate": "identity2"})
        return cls(KIND_UNITARY, gate=standard_gate(name), source={"gate": name})

    @classmethod
    def from_circuit(cls, name: str) -> "ChannelTarget":
        return cls(KIND_UNITARY, gate=compose_circuit(load_builtin_circuit(name)),
                   source={"circuit": name})

    @classmethod
    def amplitude_damping(cls, gamma: float, t: float) -> "ChannelTarget":
        return cls(KIND_DAMPING, gamma=float(gamma), t=float(t))

    @property
    def n_qubits(self) -> int:
        return self.gate.m if self.kind == KIND_UNITARY else 1

    @property
    def is_pure(self) -> bool:
        return self.kind == KIND_UNITARY

    @property
    def measure(self) -> str:
        return MEASURE_OVERLAP if self.is_pure else MEASURE_UHLMANN

    @property
    def label(self) -> str:
        if self.kind == KIND_DAMPING:
            return f"amplitude-damping(gamma={self.gamma:g}, t={self.t:g})"
        source = self.source or {}
        return source.get("gate") or source.get("circuit") or self.gate.name or "unitary"

    def ideal_vectors(self, inputs: np.ndarray) -> np.ndarray:
        """Ideal pure outputs U phi as rows, for unitary targets"""
        if not self.is_pure:
            raise ValidationError("Amplitude-damping targets have mixed ideal outputs")
        return np.atleast_2d(inputs) @ self.gate.matrix.T

    def ideal_matrices(self, inputs: np.ndarray) -> np.ndarray:
        """Ideal output density matrices as an (m, d, d) stack"""
        inputs = np.atleast_2d(np.asarray(inputs, dtype=complex))
        if self.is_pure:
            outs = self.ideal_vectors(inputs)
            return np.einsum("mi,mj->mij", outs, outs.conj())
        if inputs.shape[1] != 2:
            raise DimensionError("Amplitude damping acts on one qubit")
        rhos = np.einsum("mi,mj->mij", inputs, inputs.conj())
        return damp_matrices(rhos, self.gamma, self.t)

    def to_dict(self) -> Dict:
        if self.kind == KIND_DAMPING:
            return {"kind": KIND_DAMPING, "gamma": self.gamma, "t": self.t}
        return {"kind": KIND_UNITARY, **(self.source or {"matrix": _matrix_record(self.gate.matrix)})}

    @classmethod
    def from_dict(cls, data: Dict) -> "ChannelTarget":
        kind = data.get("kind", KIND_UNITARY)
        if kind == KIND_DAMPING:
            return cls.amplitude_damping(data.get("gamma", 0.0), data.get("t", 0.0))
        if kind != KIND_UNITARY:
            raise ConfigError(f"Unknown channel kind '{kind}'")
        if "gate" in data:
            return cls.from_gate(data["gate"])
        if "circuit" in data:
            return cls.from_circuit(data["circuit"])
        if "matrix" in data:
            record = data["matrix"]
            matrix = np.asarray(record["re"]) + 1j * np.asarray(record["im"])
            return cls.unitary(GateMatrix(matrix))
        raise ConfigError("Unitary target needs 'gate', 'circuit' or 'matrix'")


def _matrix_record(matrix: np.ndarray) -> Dict:
    return {"re": np.real(matrix).tolist(), "im": np.imag(matrix).tolist()}


def parse_target(spec) -> ChannelTarget:
    """Target from a ChannelTarget, GateMatrix, gate name, or target document"""
    if isinstance(spec, ChannelTarget):
        return spec
    if isinstance(spec, GateMatrix):
        return ChannelTarget.unitary(spec)
    if isinstance(spec, dict):
        return ChannelTarget.from_dict(spec)
    return ChannelTarget.from_gate(str(spec))


__all__ = [
    "ChannelTarget", "CHANNEL_KINDS", "KIND_UNITARY", "KIND_DAMPING", "decay_probability",
    "amplitude_damping_kraus", "damp_matrices", "amplitude_damping_output", "parse_target",
]
