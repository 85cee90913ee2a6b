"""
Circuit compression: a trained network evolution standing in for the Grover
diffusion block of the 2- and 3-qubit search circuits
"""
import logging
from dataclasses import dataclass
from typing import Iterable, Optional
import numpy as np
import pandas as pd
from config.settings import UNITARY_TOL
from src.experiments.config import ExperimentConfig
from src.experiments.gate_experiments import GateExperiment
from src.experiments.reports import FidelityReport
from src.gates.circuits import (
    compose_circuit, gate_count, grover_oracle_circuit, grover_prep_circuit, load_builtin_circuit,
)
from src.gates.library import gate_deviation, grover_diffusion
from src.model.protocol import QuantumNetworkProtocol, get_protocol
from src.qcore.states import QuantumState
from src.utils.errors import DimensionError, ValidationError

logger = logging.getLogger(__name__)

PROBABILITY_COLUMNS = ["marked", "basis_state", "probability", "ideal"]


def grover_input_state(n_qubits: int, marked: int) -> QuantumState:
    """Prepared uniform superposition with the oracle applied: the |psi> fed to the block"""
    if not 0 <= marked < 2 ** n_qubits:
        raise DimensionError(f"Marked index {marked} outside {n_qubits} qubits")
    circuit = grover_prep_circuit(n_qubits).then(grover_oracle_circuit(n_qubits, marked))
    zero = QuantumState.basis(0, n_qubits)
    return QuantumState(compose_circuit(circuit).apply(zero.amplitudes))


def ideal_probabilities(block: np.ndarray, psi: QuantumState) -> np.ndarray:
    """Computational-basis probabilities after the exact block"""
    out = np.asarray(block) @ psi.amplitudes
    return np.abs(out) ** 2


def protocol_probabilities(protocol: QuantumNetworkProtocol, psi: QuantumState) -> np.ndarray:
    """Diagonal of the reduced output state of the trained protocol"""
    return np.real(np.diag(protocol.apply(psi).matrix))


def basis_labels(n_qubits: int) -> list:
    return [format(i, f"0{n_qubits}b") for i in range(2 ** n_qubits)]


def probability_table(protocol: Optional[QuantumNetworkProtocol], block: np.ndarray,
                      n_qubits: int, marked: Iterable[int]) -> pd.DataFrame:
    """
    Output probabilities for every marked choice, trained next to ideal

    Args:
        protocol: Trained protocol (None gives the ideal block in both columns)
        block: Exact unitary of the compressed block
        n_qubits: Qubit count
        marked: Marked basis indices

    Returns:
        DataFrame with columns marked, basis_state, probability, ideal
    """
    labels = basis_labels(n_qubits)
    rows = []
    for m in marked:
        psi = grover_input_state(n_qubits, int(m))
        ideal = ideal_probabilities(block, psi)
        actual = ideal if protocol is None else protocol_probabilities(protocol, psi)
        for label, p, q in zip(labels, actual, ideal):
            rows.append({"marked": int(m), "basis_state": label,
                         "probability": float(p), "ideal": float(q)})
    return pd.DataFrame(rows, columns=PROBABILITY_COLUMNS)


def marked_probabilities(table: pd.DataFrame, n_qubits: int) -> dict:
    """marked index -> probability the run put on it"""
    labels = basis_labels(n_qubits)
    hits = table[table["basis_state"] == table["marked"].map(lambda m: labels[m])]
    return {int(m): float(p) for m, p in zip(hits["marked"], hits["probability"])}


@dataclass
class GroverResult:
    report: FidelityReport
    probabilities: pd.DataFrame


class Grover2Experiment(GateExperiment):
    """Train the 11-gate 2-qubit block, then run prepare -> oracle -> trained block"""

    def run(self, marked: Optional[Iterable[int]] = None) -> GroverResult:
        circuit = load_builtin_circuit("grover2-diffusion")
        block = compose_circuit(circuit).matrix
        if self.cfg.channel_target().n_qubits != 2:
            raise DimensionError("Two-qubit Grover needs a two-qubit target")

        report = super().run()
        marked = list(self.cfg.marked if marked is None else marked)
        table = probability_table(get_protocol(self.result.params), block, 2, marked)
        hits = marked_probabilities(table, 2)
        report.extra["marked_probabilities"] = {str(k): v for k, v in hits.items()}
        report.extra["gate_count"] = len(circuit)
        logger.info("Marked-state probabilities: "
                    + ", ".join(f"{basis_labels(2)[k]}: {v:.4f}" for k, v in hits.items()))
        return GroverResult(report, table)


class Grover3Experiment(GateExperiment):
    """Train the 29-gate 3-qubit diffusion circuit as one network evolution"""

    def run(self) -> FidelityReport:
        circuit = load_builtin_circuit("grover3-diffusion")
        deviation = gate_deviation(grover_diffusion(3), compose_circuit(circuit))
        if deviation > UNITARY_TOL:
            raise ValidationError(f"Composed diffusion circuit deviates by {deviation:.3e}")
        logger.info(f"Diffusion circuit: {len(circuit)} gates {gate_count(circuit)}")

        report = super().run()
        report.extra["circuit_deviation"] = deviation
        report.extra["gate_count"] = len(circuit)
        return report


def run_grover2(cfg: ExperimentConfig, marked: Optional[Iterable[int]] = None,
                **kwargs) -> GroverResult:
    return Grover2Experiment(cfg, **kwargs).run(marked)


def run_grover3(cfg: ExperimentConfig, **kwargs) -> FidelityReport:
    return Grover3Experiment(cfg, **kwargs).run()


__all__ = [
    "GroverResult", "Grover2Experiment", "Grover3Experiment", "run_grover2", "run_grover3",
    "grover_input_state", "ideal_probabilities", "protocol_probabilities", "probability_table",
    "marked_probabilities", "basis_labels", "PROBABILITY_COLUMNS",
]
