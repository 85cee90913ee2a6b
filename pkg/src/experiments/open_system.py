"""
Non-unitary behaviour of one qubit on a one-site network: purity over time, and
learning the amplitude-damping channel
"""
import logging
from typing import Optional, Sequence
import numpy as np
import pandas as pd
from src.experiments.base_experiment import BaseExperiment
from src.experiments.config import ExperimentConfig
from src.experiments.gate_experiments import GateExperiment
from src.experiments.reports import FidelityReport
from src.gates.channels import KIND_DAMPING
from src.model.protocol import CouplingMatrix, HamiltonianBuilder, ProtocolParams, QuantumNetworkProtocol
from src.qcore.linalg import purity
from src.qcore.states import QuantumState, RegisterLayout
from src.utils.errors import DimensionError, ValidationError

logger = logging.getLogger(__name__)

PURITY_COLUMNS = ["t", "purity"]
RETURN_LEVEL = 0.999


def purity_returns(purities: Sequence[float], level: float = RETURN_LEVEL) -> int:
    """Interior local maxima of a purity series that reach above `level`"""
    p = np.asarray(purities, dtype=float)
    if p.size < 3:
        return 0
    inner = p[1:-1]
    peaks = (inner >= p[:-2]) & (inner >= p[2:]) & (inner > level)
    return int(np.count_nonzero(peaks))


class PurityTraceExperiment(BaseExperiment):
    """
    Qubit starts in |1>, the site in vacuum; J and P stay fixed while t sweeps the grid

    Purity of the reduced qubit state dips while the excitation is shared with the
    site and returns to 1 whenever it sits wholly on one of them.
    """

    def run(self, times: Optional[Sequence[float]] = None) -> pd.DataFrame:
        """
        Args:
            times: Time grid (linspace(0, cfg.time_max, cfg.time_points) by default)

        Returns:
            DataFrame with columns t, purity
        """
        if self.cfg.n_sites != 1:
            raise DimensionError(f"Purity trace runs on a one-site network, got {self.cfg.n_sites}")
        times = (np.linspace(0.0, self.cfg.time_max, self.cfg.time_points)
                 if times is None else np.asarray(times, dtype=float))
        if np.any(times < 0):
            raise ValidationError("Times must be non-negative")

        network = self.draw_network()
        layout = RegisterLayout(1, 1)
        J = CouplingMatrix([[self.cfg.coupling]])
        hamiltonian = HamiltonianBuilder(network, layout, self.cfg.sigma_convention).total(J.J)
        excited = QuantumState.basis(1, 1)

        purities = []
        for t in times:
            params = ProtocolParams(network, J, float(t), layout, self.cfg.sigma_convention)
            rho = QuantumNetworkProtocol(params, hamiltonian=hamiltonian).apply(excited)
            purities.append(purity(rho))

        frame = pd.DataFrame({"t": times, "purity": purities}, columns=PURITY_COLUMNS)
        logger.info(f"Purity trace: min {frame['purity'].min():.4f}, "
                    f"{purity_returns(frame['purity'])} return(s) above {RETURN_LEVEL}")
        return frame


class MarkovianExperiment(GateExperiment):
    """Train a one-site protocol to reproduce amplitude damping; Uhlmann fidelity"""

    def run(self) -> FidelityReport:
        target = self.cfg.channel_target()
        if target.kind != KIND_DAMPING:
            raise ValidationError(f"Markovian experiment needs an amplitude-damping target, got {target.label}")
        report = super().run()
        report.extra["gamma_t"] = target.gamma * target.t
        return report


def run_purity_trace(cfg: ExperimentConfig, times: Optional[Sequence[float]] = None,
                     **kwargs) -> pd.DataFrame:
    return PurityTraceExperiment(cfg, **kwargs).run(times)


def run_markovian_experiment(cfg: ExperimentConfig, **kwargs) -> FidelityReport:
    return MarkovianExperiment(cfg, **kwargs).run()


__all__ = [
    "PurityTraceExperiment", "MarkovianExperiment", "run_purity_trace",
    "run_markovian_experiment", "purity_returns", "PURITY_COLUMNS",
]
