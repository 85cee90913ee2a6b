"""
Training sets, parameter encoding, and the average-fidelity objective
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union
import numpy as np
from config.settings import SIGMA_DOUBLED
from src.gates.channels import ChannelTarget
from src.model.network import NetworkSpec
from src.model.protocol import (
    CouplingMatrix, HamiltonianBuilder, ProtocolParams, QuantumNetworkProtocol
)
from src.qcore.linalg import haar_random_vectors, uhlmann_fidelity_unchecked
from src.qcore.states import DensityMatrix, QuantumState, RegisterLayout
from src.utils.errors import ConfigError, DimensionError, ValidationError

logger = logging.getLogger(__name__)

MASK_FULL = "full"
MASK_J11 = "j11"
MASKS = (MASK_FULL, MASK_J11)

TRAIN_J = "J"
TRAIN_P = "P"
TRAIN_TAU = "tau"
TRAINABLE = (TRAIN_J, TRAIN_P, TRAIN_TAU)


@dataclass(frozen=True, eq=False)
class TrainingSet:
    """Input states as rows plus their ideal outputs"""
    inputs: np.ndarray
    ideal_vectors: Optional[np.ndarray]
    ideal_matrices: np.ndarray

    def __post_init__(self):
        inputs = np.atleast_2d(np.asarray(self.inputs, dtype=complex))
        if inputs.shape[0] == 0:
            raise ValidationError("Training set is empty")
        if self.ideal_matrices.shape != (inputs.shape[0], inputs.shape[1], inputs.shape[1]):
            raise DimensionError(
                f"Ideal outputs of shape {self.ideal_matrices.shape} do not match "
                f"{inputs.shape[0]} inputs of dimension {inputs.shape[1]}"
            )
        object.__setattr__(self, "inputs", inputs)

    @classmethod
    def for_target(cls, target: ChannelTarget, inputs: np.ndarray) -> "TrainingSet":
        inputs = np.atleast_2d(np.asarray(inputs, dtype=complex))
        if inputs.shape[1] != 2 ** target.n_qubits:
            raise DimensionError(
                f"Inputs of dimension {inputs.shape[1]} for a {target.n_qubits}-qubit target"
            )
        vectors = target.ideal_vectors(inputs) if target.is_pure else None
        return cls(inputs, vectors, target.ideal_matrices(inputs))

    @classmethod
    def sample(cls, target: ChannelTarget, n_states: int,
               rng: Union[np.random.Generator, int, None] = None) -> "TrainingSet":
        """Haar-random inputs and their ideal outputs"""
        if n_states < 1:
            raise ValidationError(f"Need at least one training state, got {n_states}")
        return cls.for_target(target, haar_random_vectors(target.n_qubits, n_states, rng))

    @classmethod
    def from_states(cls, target: ChannelTarget, states: Sequence[QuantumState]) -> "TrainingSet":
        if not states:
            raise ValidationError("Training set is empty")
        return cls.for_target(target, np.vstack([s.amplitudes for s in states]))

    @property
    def pure(self) -> bool:
        return self.ideal_vectors is not None

    @property
    def states(self) -> List[QuantumState]:
        return [QuantumState(row) for row in self.inputs]

    def ideal_outputs(self) -> list:
        if self.pure:
            return [QuantumState(row) for row in self.ideal_vectors]
        return [DensityMatrix(m) for m in self.ideal_matrices]

    def __len__(self) -> int:
        return self.inputs.shape[0]

    def subset(self, indices: Sequence[int]) -> "TrainingSet":
        indices = list(indices)
        vectors = None if self.ideal_vectors is None else self.ideal_vectors[indices]
        return TrainingSet(self.inputs[indices], vectors, self.ideal_matrices[indices])


def coupling_mask(kind: Union[str, np.ndarray], n_qubits: int, n_sites: int) -> np.ndarray:
    """
    Boolean mask of trainable J entries

    Args:
        kind: "full", "j11" (only qubit 1 - site 1), or an explicit boolean array
        n_qubits: Number of qubits
        n_sites: Number of sites

    Returns:
        Boolean array of shape (n_qubits, n_sites)
    """
    if isinstance(kind, np.ndarray) or isinstance(kind, (list, tuple)):
        mask = np.asarray(kind, dtype=bool)
        if mask.shape != (n_qubits, n_sites):
            raise DimensionError(f"Mask shape {mask.shape} != ({n_qubits}, {n_sites})")
        return mask
    if kind == MASK_FULL:
        return np.ones((n_qubits, n_sites), dtype=bool)
    if kind == MASK_J11:
        mask = np.zeros((n_qubits, n_sites), dtype=bool)
        mask[0, 0] = True
        return mask
    raise ConfigError(f"Unknown coupling mask '{kind}', expected one of {MASKS}")


def parse_trainable(trainable: Union[str, Sequence[str]]) -> Tuple[str, ...]:
    if isinstance(trainable, str):
        trainable = [part.strip() for part in trainable.split(",") if part.strip()]
    trainable = tuple(trainable)
    unknown = [t for t in trainable if t not in TRAINABLE]
    if unknown:
        raise ConfigError(f"Unknown trainable parameters {unknown}, expected a subset of {TRAINABLE}")
    if TRAIN_J not in trainable:
        raise ConfigError("J is always trainable")
    return tuple(t for t in TRAINABLE if t in trainable)


@dataclass(frozen=True, eq=False)
class ParameterSpace:
    """
    Real-vector encoding of the trainable parameters

    Layout: interleaved (Re, Im) pairs of the masked J entries, then interleaved
    (Re, Im) of the drive(s) when P is trainable, then tau. tau is decoded as |x|.
    """
    n_qubits: int
    n_sites: int
    mask: np.ndarray
    trainable: Tuple[str, ...] = (TRAIN_J,)
    per_site_drive: bool = False
    coupling_scale: float = 1.0
    drive_scale: float = 1.0
    tau_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "mask", np.asarray(self.mask, dtype=bool))
        object.__setattr__(self, "trainable", parse_trainable(self.trainable))
        if self.mask.shape != (self.n_qubits, self.n_sites):
            raise DimensionError(f"Mask shape {self.mask.shape} != ({self.n_qubits}, {self.n_sites})")

    @property
    def n_couplings(self) -> int:
        return int(self.mask.sum())

    @property
    def n_drives(self) -> int:
        if TRAIN_P not in self.trainable:
            return 0
        return self.n_sites if self.per_site_drive else 1

    @property
    def trains_tau(self) -> bool:
        return TRAIN_TAU in self.trainable

    @property
    def size(self) -> int:
        return 2 * self.n_couplings + 2 * self.n_drives + int(self.trains_tau)

    def scales(self) -> np.ndarray:
        """Per-entry scale for initial spread and mutation"""
        return np.concatenate([
            np.full(2 * self.n_couplings, self.coupling_scale),
            np.full(2 * self.n_drives, self.drive_scale),
            np.full(int(self.trains_tau), self.tau_scale),
        ])

    def encode(self, J: np.ndarray, network: NetworkSpec, tau: float) -> np.ndarray:
        J = np.asarray(J, dtype=complex)
        parts = [np.column_stack([J[self.mask].real, J[self.mask].imag]).ravel()]
        if self.n_drives:
            drives = np.asarray(network.drives if self.per_site_drive else [network.drive])
            parts.append(np.column_stack([drives.real, drives.imag]).ravel())
        if self.trains_tau:
            parts.append(np.array([tau], dtype=float))
        return np.concatenate(parts).astype(float)

    def decode_coupling(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        n = self.n_couplings
        J = np.zeros((self.n_qubits, self.n_sites), dtype=complex)
        J[self.mask] = x[0:2 * n:2] + 1j * x[1:2 * n:2]
        return J

    def decode_drives(self, x: np.ndarray) -> Optional[np.ndarray]:
        if not self.n_drives:
            return None
        start = 2 * self.n_couplings
        block = np.asarray(x[start:start + 2 * self.n_drives], dtype=float)
        drives = block[0::2] + 1j * block[1::2]
        return drives if self.per_site_drive else np.full(self.n_sites, drives[0])

    def decode_tau(self, x: np.ndarray, default: float) -> float:
        return float(abs(x[-1])) if self.trains_tau else float(default)

    def decode(self, x: np.ndarray, network: NetworkSpec, tau: float) -> Tuple[np.ndarray, NetworkSpec, float]:
        """(J, network with decoded drive, tau) for a parameter vector"""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.size,):
            raise DimensionError(f"Parameter vector of shape {x.shape}, expected ({self.size},)")
        drives = self.decode_drives(x)
        if drives is not None:
            network = (network.with_site_drives(drives) if self.per_site_drive
                       else network.with_drive(drives[0]))
        return self.decode_coupling(x), network, self.decode_tau(x, tau)


def average_measure(protocol: QuantumNetworkProtocol, train: TrainingSet) -> np.ndarray:
    """Per-state fidelities of the protocol on a training or test set"""
    if protocol.layout.qubit_dim != train.inputs.shape[1]:
        raise DimensionError(
            f"Protocol acts on dimension {protocol.layout.qubit_dim}, "
            f"states have dimension {train.inputs.shape[1]}"
        )
    if train.pure:
        return np.clip(protocol.pure_fidelities(train.inputs, train.ideal_vectors), 0.0, 1.0)
    actual = protocol.reduced_matrices(train.inputs)
    return np.array([uhlmann_fidelity_unchecked(ideal, rho)
                     for ideal, rho in zip(train.ideal_matrices, actual)])


def unitary_fidelities(u: np.ndarray, ideal: np.ndarray, inputs: np.ndarray) -> np.ndarray:
    """|<G phi|U phi>|^2 per input row, for a closed unitary against an ideal gate"""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=complex))
    actual = inputs @ np.asarray(u).T
    expected = inputs @ np.asarray(ideal).T
    return np.clip(np.abs(np.einsum("mi,mi->m", expected.conj(), actual)) ** 2, 0.0, 1.0)


class TrainingContext:
    """
    Everything the objective needs besides the parameter vector

    Args:
        target: Target operation
        network: Baseline network (drive replaced when P is trainable)
        tau: Evolution time used when tau is not trainable
        space: Parameter encoding
        train: Training set
        sigma_convention: Coupling convention
        builder: Prebuilt HamiltonianBuilder to share across contexts
    """

    def __init__(self,
                 target: ChannelTarget,
                 network: NetworkSpec,
                 tau: float,
                 space: ParameterSpace,
                 train: TrainingSet,
                 sigma_convention: str = SIGMA_DOUBLED,
                 builder: Optional[HamiltonianBuilder] = None):
        self.target = target
        self.network = network
        self.tau = float(tau)
        self.space = space
        self.train = train
        self.layout = RegisterLayout(space.n_qubits, space.n_sites)
        if target.n_qubits != space.n_qubits:
            raise DimensionError(
                f"Target acts on {target.n_qubits} qubits, parameter space has {space.n_qubits}"
            )
        self.builder = builder or HamiltonianBuilder(network, self.layout, sigma_convention)
        self.sigma_convention = self.builder.convention

    def with_network(self, network: NetworkSpec) -> "TrainingContext":
        return TrainingContext(self.target, network, self.tau, self.space, self.train,
                               self.sigma_convention, self.builder.with_network(network))

    def with_tau(self, tau: float) -> "TrainingContext":
        return TrainingContext(self.target, self.network, tau, self.space, self.train,
                               self.sigma_convention, self.builder)

    def with_train(self, train: TrainingSet) -> "TrainingContext":
        return TrainingContext(self.target, self.network, self.tau, self.space, train,
                               self.sigma_convention, self.builder)

    def protocol(self, x: np.ndarray) -> QuantumNetworkProtocol:
        J, network, tau = self.space.decode(x, self.network, self.tau)
        hamiltonian = self.builder.total(J, network.drives if self.space.n_drives else None)
        params = ProtocolParams(network, CouplingMatrix(J), tau, self.layout, self.sigma_convention)
        return QuantumNetworkProtocol(params, hamiltonian=hamiltonian)

    def params(self, x: np.ndarray) -> ProtocolParams:
        return self.protocol(x).params

    def fidelities(self, x: np.ndarray, train: Optional[TrainingSet] = None) -> np.ndarray:
        return average_measure(self.protocol(x), train or self.train)

    def evaluate(self, x: np.ndarray) -> float:
        return float(np.mean(self.fidelities(x)))

    __call__ = evaluate


def average_fidelity(params, context: TrainingContext,
                     train: Optional[TrainingSet] = None) -> float:
    """
    Mean fidelity over a training set

    Args:
        params: Individual or real parameter vector
        context: Target, network and encoding
        train: Training set (the context's own when omitted)

    Returns:
        Average fidelity in [0, 1]
    """
    x = getattr(params, "params", params)
    return float(np.mean(context.fidelities(np.asarray(x, dtype=float), train)))


__all__ = [
    "TrainingSet", "ParameterSpace", "TrainingContext", "coupling_mask", "parse_trainable",
    "average_measure", "average_fidelity", "unitary_fidelities", "MASK_FULL", "MASK_J11", "MASKS",
    "TRAIN_J", "TRAIN_P", "TRAIN_TAU", "TRAINABLE",
]
