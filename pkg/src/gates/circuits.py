"""
Circuit descriptions, composition, and the checked-in circuit assets
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union
import numpy as np
from config.settings import ASSETS_DIR
from src.gates.library import GateMatrix, canonical_name, rotation, standard_gate
from src.qcore.linalg import embed
from src.utils.errors import ConfigError, DimensionError

logger = logging.getLogger(__name__)

ROTATION_GATES = {"rx": "x", "ry": "y", "rz": "z"}

BUILTIN_CIRCUITS = ("grover2-prep", "grover2-diffusion", "toffoli", "grover3-diffusion")


@dataclass(frozen=True)
class PlacedGate:
    """A named gate (or rotation with an angle) on specific qubits"""
    gate: str
    targets: Tuple[int, ...]
    angle: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(set(self.targets)) != len(self.targets):
            raise DimensionError(f"Duplicate targets in {self.gate} placement: {self.targets}")
        if self.gate.lower() in ROTATION_GATES and self.angle is None:
            raise ConfigError(f"Rotation gate {self.gate} needs an angle")

    def matrix(self) -> GateMatrix:
        key = self.gate.lower()
        if key in ROTATION_GATES:
            return rotation(ROTATION_GATES[key], float(self.angle))
        return standard_gate(self.gate)

    def to_dict(self) -> Dict:
        record = {"gate": self.gate, "targets": list(self.targets)}
        if self.angle is not None:
            record["angle"] = self.angle
        return record

    @classmethod
    def from_dict(cls, record: Dict) -> "PlacedGate":
        try:
            return cls(record["gate"], tuple(record["targets"]), record.get("angle"))
        except KeyError as e:
            raise ConfigError(f"Gate record missing field {e}: {record}") from e


@dataclass(frozen=True)
class CircuitDescription:
    """Ordered gate list; the first listed gate acts first"""
    n_qubits: int
    gates: Tuple[PlacedGate, ...] = field(default_factory=tuple)
    name: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n_qubits < 1:
            raise DimensionError(f"Circuit needs at least one qubit, got {self.n_qubits}")
        for placed in self.gates:
            for t in placed.targets:
                if not 0 <= t < self.n_qubits:
                    raise DimensionError(
                        f"{placed.gate} targets qubit {t} in a {self.n_qubits}-qubit circuit"
                    )

    def __len__(self) -> int:
        return len(self.gates)

    def then(self, other: "CircuitDescription") -> "CircuitDescription":
        """This circuit followed by another on the same register"""
        if other.n_qubits != self.n_qubits:
            raise DimensionError(f"Cannot chain {self.n_qubits}- and {other.n_qubits}-qubit circuits")
        return CircuitDescription(self.n_qubits, self.gates + other.gates, self.name)

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "n_qubits": self.n_qubits,
            "gates": [placed.to_dict() for placed in self.gates],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "CircuitDescription":
        if "n_qubits" not in data or "gates" not in data:
            raise ConfigError("Circuit document needs 'n_qubits' and 'gates'")
        return cls(int(data["n_qubits"]),
                   tuple(PlacedGate.from_dict(r) for r in data["gates"]),
                   data.get("name"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "CircuitDescription":
        return cls.from_dict(json.loads(text))


def circuit(n_qubits: int, gates: Sequence[Union[PlacedGate, tuple]],
            name: Optional[str] = None) -> CircuitDescription:
    """Build a circuit from (gate, targets[, angle]) tuples"""
    placed = []
    for g in gates:
        if isinstance(g, PlacedGate):
            placed.append(g)
        else:
            placed.append(PlacedGate(g[0], tuple(g[1]), g[2] if len(g) > 2 else None))
    return CircuitDescription(n_qubits, tuple(placed), name)


def compose_circuit(c: CircuitDescription) -> GateMatrix:
    """
    Unitary of the whole circuit

    Args:
        c: Circuit description

    Returns:
        Product of embedded gates in application order
    """
    total = np.eye(2 ** c.n_qubits, dtype=complex)
    for placed in c.gates:
        gate = placed.matrix()
        if gate.m != len(placed.targets):
            raise DimensionError(
                f"{placed.gate} acts on {gate.m} qubit(s), placed on {len(placed.targets)}"
            )
        total = embed(gate.matrix, placed.targets, c.n_qubits) @ total
    return GateMatrix(total, name=c.name)


def load_circuit(path: Union[str, Path]) -> CircuitDescription:
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return CircuitDescription.from_dict(json.load(f))
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Could not read circuit {path}: {e}")
        raise ConfigError(f"Could not read circuit {path}: {e}") from e


def load_builtin_circuit(name: str) -> CircuitDescription:
    """
    Checked-in circuit asset by name

    Args:
        name: One of grover2-prep, grover2-diffusion, toffoli, grover3-diffusion

    Returns:
        CircuitDescription
    """
    if name not in BUILTIN_CIRCUITS:
        raise ConfigError(f"Unknown built-in circuit '{name}', expected one of {BUILTIN_CIRCUITS}")
    return load_circuit(ASSETS_DIR / f"{name}.json")


def grover_oracle_circuit(n_qubits: int, marked_index: int) -> CircuitDescription:
    """
    Oracle as gates: X on qubits whose marked bit is 0, a multi-controlled Z, X again

    The controlled Z is H cNOT H on two qubits and H Toffoli H on three.
    """
    if n_qubits not in (2, 3):
        raise DimensionError(f"Oracle circuits exist for 2 or 3 qubits, got {n_qubits}")
    if not 0 <= marked_index < 2 ** n_qubits:
        raise DimensionError(f"Marked index {marked_index} outside {n_qubits} qubits")

    bits = [(marked_index >> (n_qubits - 1 - q)) & 1 for q in range(n_qubits)]
    flips = [("X", (q,)) for q in range(n_qubits) if bits[q] == 0]
    last = n_qubits - 1
    controlled = "cNOT" if n_qubits == 2 else "Toffoli"
    core = [("H", (last,)), (controlled, tuple(range(n_qubits))), ("H", (last,))]
    return circuit(n_qubits, flips + core + flips, name=f"grover{n_qubits}-oracle{marked_index}")


def grover_prep_circuit(n_qubits: int) -> CircuitDescription:
    return circuit(n_qubits, [("H", (q,)) for q in range(n_qubits)], name=f"grover{n_qubits}-prep")


def gate_count(c: CircuitDescription) -> Dict[str, int]:
    counts: Dict[str, int] = {}
    for placed in c.gates:
        key = canonical_name(placed.gate) if placed.gate.lower() not in ROTATION_GATES else placed.gate
        counts[key] = counts.get(key, 0) + 1
    return counts


__all__ = [
    "PlacedGate", "CircuitDescription", "BUILTIN_CIRCUITS", "circuit", "compose_circuit",
    "load_circuit", "load_builtin_circuit", "grover_oracle_circuit", "grover_prep_circuit",
    "gate_count",
]
