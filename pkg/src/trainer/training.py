"""
Parameter selection: regime scan, hybrid genetic + Nelder-Mead training, direct-model search
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union
import numpy as np
import pandas as pd
from config.settings import SIGMA_DOUBLED, TRAINING_SET_SIZE
from src.gates.channels import ChannelTarget, parse_target
from src.model.direct import DirectTwoQubitSpec, direct_two_qubit_unitary
from src.model.network import NetworkSpec
from src.model.protocol import CouplingMatrix, ProtocolParams, QuantumNetworkProtocol
from src.qcore.states import RegisterLayout
from src.trainer.fitness import (
    MASK_FULL, ParameterSpace, TrainingContext, TrainingSet, average_measure, coupling_mask,
    unitary_fidelities,
)
from src.trainer.genetic import GAConfig, GAResult, Individual, run_genetic
from src.trainer.simplex import NMConfig, NMResult, nelder_mead
from src.utils.errors import DimensionError, ValidationError
from src.utils.rng import SeedStreams, resolve_seed

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ["generation", "best", "mean"]

# fitness treated as exact; nothing left for the simplex to refine
PERFECT_FITNESS = 1.0 - 1e-12


def history_frame(history: Sequence[Tuple[int, float, float]]) -> pd.DataFrame:
    return pd.DataFrame(list(history), columns=HISTORY_COLUMNS)


def coupling_scale_for(network: NetworkSpec) -> float:
    """Parameter scale: K0 for multi-site runs, E0 for single-site runs, else 1"""
    if network.n_sites > 1 and network.K0 > 0:
        return network.K0
    if network.E0 > 0:
        return network.E0
    return network.K0 or 1.0


@dataclass
class TrainingResult:
    """Trained protocol plus how it got there"""
    params: ProtocolParams
    fitness: float
    target: ChannelTarget
    space: ParameterSpace
    seed: int
    history: List[Tuple[int, float, float]] = field(default_factory=list)
    ga: Optional[GAResult] = None
    nm: Optional[NMResult] = None
    train: Optional[TrainingSet] = None
    vector: Optional[np.ndarray] = None

    @property
    def stop_reason(self) -> str:
        return self.ga.stop_reason if self.ga else "no-trainable-parameters"

    def history_frame(self) -> pd.DataFrame:
        return history_frame(self.history)

    def summary(self) -> Dict:
        return {
            "target": self.target.label,
            "fitness": self.fitness,
            "generations": self.ga.generations if self.ga else 0,
            "stop_reason": self.stop_reason,
            "nm_iterations": self.nm.iterations if self.nm else 0,
            "nm_exhausted": self.nm.exhausted if self.nm else False,
            "seed": self.seed,
        }


def build_space(target: ChannelTarget, network: NetworkSpec, tau: float, ga: GAConfig,
                mask="full", per_site_drive: bool = False,
                coupling_scale: Optional[float] = None) -> ParameterSpace:
    scale = coupling_scale or coupling_scale_for(network)
    drive_scale = 0.1 * abs(network.drive) if network.drive != 0 else scale
    tau_scale = 0.1 * tau if tau > 0 else 1.0
    return ParameterSpace(
        n_qubits=target.n_qubits,
        n_sites=network.n_sites,
        mask=coupling_mask(mask, target.n_qubits, network.n_sites),
        trainable=ga.trainable,
        per_site_drive=per_site_drive,
        coupling_scale=scale,
        drive_scale=drive_scale,
        tau_scale=tau_scale,
    )


def train_gate(target: Union[ChannelTarget, str],
               network: NetworkSpec,
               tau: float,
               ga: GAConfig,
               train: Optional[TrainingSet] = None,
               mask="full",
               sigma_convention: str = SIGMA_DOUBLED,
               per_site_drive: bool = False,
               nm: Optional[NMConfig] = None,
               coupling_scale: Optional[float] = None,
               initial_coupling: Optional[np.ndarray] = None,
               streams: Optional[SeedStreams] = None,
               show_progress: Optional[bool] = None) -> TrainingResult:
    """
    Train couplings (and optionally drive and time) so the network induces the target

    Args:
        target: Target operation or gate name
        network: Drawn network; its drive is the starting drive
        tau: Evolution time (starting value when tau is trainable)
        ga: Genetic algorithm settings, including the trainable set {J | J,P,tau}
        train: Training set (sampled from the "training" stream when omitted)
        mask: Coupling mask, "full", "j11" or a boolean array
        sigma_convention: Coupling convention
        per_site_drive: Train one drive per site instead of a uniform drive
        nm: Nelder-Mead settings
        coupling_scale: Scale of the initial J spread (K0 or E0 by default)
        initial_coupling: Starting J (zeros by default)
        streams: Seed streams (derived from ga.seed when omitted)
        show_progress: tqdm bar for the genetic search

    Returns:
        TrainingResult with the best params and the fitness history; the caller
        decides whether the achieved fitness is acceptable
    """
    target = parse_target(target)
    if tau < 0:
        raise ValidationError(f"Evolution time must be non-negative, got {tau}")
    streams = streams or SeedStreams(resolve_seed(ga.seed))
    if train is None:
        train = TrainingSet.sample(target, TRAINING_SET_SIZE, streams.generator("training"))

    space = build_space(target, network, tau, ga, mask, per_site_drive, coupling_scale)
    context = TrainingContext(target, network, tau, space, train, sigma_convention)

    J0 = (np.zeros((target.n_qubits, network.n_sites), dtype=complex)
          if initial_coupling is None else np.asarray(initial_coupling, dtype=complex))
    x0 = space.encode(J0, network, tau)
    logger.info(f"Training {target.label} on a {network.n_sites}-site network: "
                f"{space.size} parameter(s), {len(train)} training state(s)")

    if space.size == 0:
        fitness = context.evaluate(x0)
        return TrainingResult(context.params(x0), fitness, target, space, streams.seed,
                              [(0, fitness, fitness)], train=train, vector=x0)

    try:
        logger.info("Step 1/2: Genetic search...")
        ga_result = run_genetic(context, x0, ga, space.scales(), streams.generator("ga"),
                                show_progress)
        best = ga_result.best

        nm_result = None
        if best.fitness < PERFECT_FITNESS:
            logger.info("Step 2/2: Nelder-Mead refinement...")
            nm_config = nm or NMConfig()
            steps = None if nm_config.initial_step is not None else (
                space.scales() * max(ga_result.final_mutation, 1e-3))
            nm_result = nelder_mead(best, context, nm_config, steps)
            best = nm_result.individual
    except Exception as e:
        logger.error(f"Training {target.label} failed: {e}")
        raise

    params = context.params(best.params)
    logger.info(f"Trained {target.label}: average fidelity {best.fitness:.6f}")
    return TrainingResult(params, float(best.fitness), target, space, streams.seed,
                          ga_result.history, ga_result, nm_result, train, best.params)


@dataclass
class ScanResult:
    table: pd.DataFrame
    drive: complex
    tau: float
    fidelity: float


def scan_drive_and_time(target: Union[ChannelTarget, str],
                        network: NetworkSpec,
                        drives: Sequence[complex],
                        taus: Sequence[float],
                        train: Optional[TrainingSet] = None,
                        probes: int = 8,
                        mask="full",
                        sigma_convention: str = SIGMA_DOUBLED,
                        coupling_scale: Optional[float] = None,
                        streams: Optional[SeedStreams] = None) -> ScanResult:
    """
    Coarse grid over (P, tau) to find a regime where high fidelity is reachable

    Each cell scores the best of `probes` random coupling draws (plus J = 0), so the
    cells compare regimes rather than trained optima.

    Args:
        target: Target operation
        network: Network whose drive is replaced per cell
        drives: Candidate uniform drives
        taus: Candidate evolution times
        train: Training set (sampled from the "training" stream when omitted)
        probes: Random coupling draws per drive
        mask: Coupling mask
        sigma_convention: Coupling convention
        coupling_scale: Scale of the random couplings
        streams: Seed streams

    Returns:
        ScanResult with the full table (P_re, P_im, tau, fidelity) and the best cell
    """
    target = parse_target(target)
    if len(drives) == 0 or len(taus) == 0:
        raise ValidationError("Scan needs at least one drive and one time")
    streams = streams or SeedStreams(resolve_seed(network.seed))
    if train is None:
        train = TrainingSet.sample(target, TRAINING_SET_SIZE, streams.generator("training"))

    layout = RegisterLayout(target.n_qubits, network.n_sites)
    scale = coupling_scale or coupling_scale_for(network)
    allowed = coupling_mask(mask, target.n_qubits, network.n_sites)
    rng = streams.generator("scan")
    couplings = [np.zeros(allowed.shape, dtype=complex)]
    for _ in range(probes):
        draw = scale * (rng.standard_normal(allowed.shape) + 1j * rng.standard_normal(allowed.shape))
        couplings.append(np.where(allowed, draw, 0))

    space = ParameterSpace(target.n_qubits, network.n_sites, allowed)
    context = TrainingContext(target, network, 0.0, space, train, sigma_convention)

    rows = []
    for drive in drives:
        driven = network.with_drive(drive)
        builder = context.builder.with_network(driven)
        hamiltonians = [builder.total(J) for J in couplings]
        for tau in taus:
            best = 0.0
            for J, h in zip(couplings, hamiltonians):
                params = ProtocolParams(driven, CouplingMatrix(J), float(tau), layout,
                                        sigma_convention)
                score = float(np.mean(average_measure(QuantumNetworkProtocol(params, h), train)))
                best = max(best, score)
            rows.append({"P_re": float(np.real(drive)), "P_im": float(np.imag(drive)),
                         "tau": float(tau), "fidelity": best})

    table = pd.DataFrame(rows, columns=["P_re", "P_im", "tau", "fidelity"])
    top = table.loc[table["fidelity"].idxmax()]
    logger.info(f"Scan best cell: P={top['P_re']:g}{top['P_im']:+g}i, tau={top['tau']:g}, "
                f"fidelity {top['fidelity']:.4f}")
    return ScanResult(table, complex(top["P_re"], top["P_im"]), float(top["tau"]),
                      float(top["fidelity"]))


class DirectModelContext:
    """
    Objective over the direct two-qubit model parameters (E1, P1, P2, J, tau), E2 fixed

    Vector layout: [E1, Re P1, Im P1, Re P2, Im P2, J, tau]; tau decoded as |x|.
    """

    def __init__(self, target: ChannelTarget, E2: float, train: TrainingSet):
        if not target.is_pure or target.n_qubits != 2:
            raise DimensionError("Direct model targets must be two-qubit unitaries")
        self.target = target
        self.E2 = float(E2)
        self.train = train

    @staticmethod
    def encode(spec: DirectTwoQubitSpec) -> np.ndarray:
        return np.array([spec.E1, spec.P1.real, spec.P1.imag, spec.P2.real, spec.P2.imag,
                         spec.J, spec.tau], dtype=float)

    def decode(self, x: np.ndarray) -> DirectTwoQubitSpec:
        return DirectTwoQubitSpec(float(x[0]), self.E2, complex(x[1], x[2]), complex(x[3], x[4]),
                                  float(x[5]), float(abs(x[6])))

    def fidelities(self, x: np.ndarray, train: Optional[TrainingSet] = None) -> np.ndarray:
        train = train or self.train
        u = direct_two_qubit_unitary(self.decode(x))
        return unitary_fidelities(u, self.target.gate.matrix, train.inputs)

    def evaluate(self, x: np.ndarray) -> float:
        return float(np.mean(self.fidelities(x)))

    __call__ = evaluate


@dataclass
class DirectTrainingResult:
    spec: DirectTwoQubitSpec
    fitness: float
    target: ChannelTarget
    seed: int
    history: List[Tuple[int, float, float]] = field(default_factory=list)
    ga: Optional[GAResult] = None
    nm: Optional[NMResult] = None

    def history_frame(self) -> pd.DataFrame:
        return history_frame(self.history)


def train_direct_model(target: Union[ChannelTarget, str],
                       initial: DirectTwoQubitSpec,
                       ga: GAConfig,
                       train: Optional[TrainingSet] = None,
                       nm: Optional[NMConfig] = None,
                       streams: Optional[SeedStreams] = None,
                       show_progress: Optional[bool] = None) -> DirectTrainingResult:
    """
    Search the direct two-qubit model parameters for a target gate

    Args:
        target: Two-qubit unitary target
        initial: Starting parameters (E2 stays fixed as the energy unit)
        ga: Genetic algorithm settings
        train: Training set (sampled from the "training" stream when omitted)
        nm: Nelder-Mead settings
        streams: Seed streams
        show_progress: tqdm bar for the genetic search

    Returns:
        DirectTrainingResult
    """
    target = parse_target(target)
    streams = streams or SeedStreams(resolve_seed(ga.seed))
    if train is None:
        train = TrainingSet.sample(target, TRAINING_SET_SIZE, streams.generator("training"))
    context = DirectModelContext(target, initial.E2, train)

    x0 = context.encode(initial)
    scales = 0.1 * np.maximum(np.abs(x0), 1.0)
    logger.info(f"Searching direct-model parameters for {target.label}")

    ga_result = run_genetic(context, x0, ga, scales, streams.generator("ga"), show_progress)
    best = ga_result.best
    nm_result = None
    if best.fitness < PERFECT_FITNESS:
        nm_result = nelder_mead(best, context, nm or NMConfig(), scales * 0.1)
        best = nm_result.individual

    logger.info(f"Direct model for {target.label}: average fidelity {best.fitness:.6f}")
    return DirectTrainingResult(context.decode(best.params), float(best.fitness), target,
                                streams.seed, ga_result.history, ga_result, nm_result)


__all__ = [
    "TrainingResult", "ScanResult", "DirectTrainingResult", "DirectModelContext",
    "HISTORY_COLUMNS", "history_frame", "coupling_scale_for", "build_space", "train_gate",
    "scan_drive_and_time", "train_direct_model",
]
