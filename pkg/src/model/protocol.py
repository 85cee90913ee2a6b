"""
Qubit-network coupling and the input -> evolve -> trace-out protocol
"""
import logging
import threading
from collections import OrderedDict
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Optional, Tuple
import numpy as np
from config.settings import SIGMA_DOUBLED
from src.model.network import NetworkSpec, network_hamiltonian
from src.model.operators import LOWERING, RAISING, check_convention, sigma_plus
from src.qcore.linalg import embed, kron
from src.qcore.states import DensityMatrix, HermitianOperator, QuantumState, RegisterLayout
from src.utils.errors import DimensionError, ValidationError

logger = logging.getLogger(__name__)

PROTOCOL_CACHE_SIZE = 64


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    """Complex tunnelling amplitudes J[k, l] between qubit k and site l"""
    J: np.ndarray

    def __post_init__(self):
        J = np.array(self.J, dtype=complex)
        if J.ndim != 2:
            raise DimensionError(f"Coupling matrix must be 2-D, got shape {J.shape}")
        if not np.all(np.isfinite(J)):
            raise ValidationError("Coupling matrix has non-finite entries")
        J.flags.writeable = False
        object.__setattr__(self, "J", J)

    @classmethod
    def zeros(cls, n_qubits: int, n_sites: int) -> "CouplingMatrix":
        return cls(np.zeros((n_qubits, n_sites), dtype=complex))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.J.shape

    def to_dict(self) -> Dict:
        return {"re": self.J.real.tolist(), "im": self.J.imag.tolist()}

    @classmethod
    def from_dict(cls, data: Dict) -> "CouplingMatrix":
        return cls(np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float))


@dataclass(frozen=True, eq=False)
class ProtocolParams:
    """Everything needed to run the protocol once"""
    network: NetworkSpec
    coupling: CouplingMatrix
    tau: float
    layout: RegisterLayout
    sigma_convention: str = SIGMA_DOUBLED

    def __post_init__(self):
        check_convention(self.sigma_convention)
        if not np.isfinite(self.tau) or self.tau < 0:
            raise ValidationError(f"Evolution time must be non-negative, got {self.tau}")
        if self.layout.n_sites != self.network.n_sites:
            raise DimensionError(
                f"Layout has {self.layout.n_sites} sites, network has {self.network.n_sites}"
            )
        if self.coupling.shape != (self.layout.n_qubits, self.layout.n_sites):
            raise DimensionError(
                f"Coupling shape {self.coupling.shape} does not match "
                f"{self.layout.n_qubits} qubits x {self.layout.n_sites} sites"
            )

    def cache_key(self) -> Tuple:
        return (self.network, self.coupling.J.tobytes(), float(self.tau),
                self.layout, self.sigma_convention)


def coupling_operator_basis(layout: RegisterLayout,
                            convention: str = SIGMA_DOUBLED) -> Tuple[np.ndarray, np.ndarray]:
    """
    Hermitian basis for the coupling term

    J* sigma+_k a_l + J a_l^dag sigma-_k = Re(J) X_kl + Im(J) Y_kl, with
    X_kl = A + A^dag and Y_kl = i (A^dag - A) for A = sigma+_k a_l.

    Returns:
        Two arrays of shape (n_qubits, n_sites, dim, dim)
    """
    check_convention(convention)
    raising_lowering = kron(sigma_plus(convention), LOWERING)
    shape = (layout.n_qubits, layout.n_sites, layout.dim, layout.dim)
    x_basis = np.zeros(shape, dtype=complex)
    y_basis = np.zeros(shape, dtype=complex)
    for k in range(layout.n_qubits):
        for l in range(layout.n_sites):
            a = embed(raising_lowering, [k, layout.site(l)], layout)
            x_basis[k, l] = a + a.conj().T
            y_basis[k, l] = 1j * (a.conj().T - a)
    return x_basis, y_basis


def drive_operator_basis(layout: RegisterLayout) -> Tuple[np.ndarray, np.ndarray]:
    """
    P a^dag + P* a = Re(P) (a^dag + a) + Im(P) i (a^dag - a), per site

    Returns:
        Two arrays of shape (n_sites, dim, dim)
    """
    shape = (layout.n_sites, layout.dim, layout.dim)
    x_basis = np.zeros(shape, dtype=complex)
    y_basis = np.zeros(shape, dtype=complex)
    for l in range(layout.n_sites):
        x_basis[l] = embed(RAISING + LOWERING, [layout.site(l)], layout)
        y_basis[l] = embed(1j * (RAISING - LOWERING), [layout.site(l)], layout)
    return x_basis, y_basis


def coupling_hamiltonian(J: CouplingMatrix, layout: RegisterLayout,
                         convention: str = SIGMA_DOUBLED) -> HermitianOperator:
    """
    sum_kl (J*_kl sigma+_k a_l + J_kl a_l^dag sigma-_k)

    Args:
        J: Coupling matrix of shape (n_qubits, n_sites)
        layout: Register layout
        convention: sigma-plus convention ("doubled" = sigma_x + i sigma_y)

    Returns:
        HermitianOperator
    """
    if J.shape != (layout.n_qubits, layout.n_sites):
        raise DimensionError(f"Coupling shape {J.shape} does not match layout {layout}")
    x_basis, y_basis = coupling_operator_basis(layout, convention)
    h = (np.tensordot(J.J.real, x_basis, axes=([0, 1], [0, 1]))
         + np.tensordot(J.J.imag, y_basis, axes=([0, 1], [0, 1])))
    return HermitianOperator(h)


class HamiltonianBuilder:
    """
    Assembles total Hamiltonians for one network and layout

    The network term and the coupling basis are built once; each call then costs
    two tensor contractions, which is what the optimizers need.
    """

    def __init__(self, network: NetworkSpec, layout: RegisterLayout,
                 convention: str = SIGMA_DOUBLED):
        self.layout = layout
        self.convention = check_convention(convention)
        self.x_basis, self.y_basis = coupling_operator_basis(layout, convention)
        self.drive_x, self.drive_y = drive_operator_basis(layout)
        self._set_network(network)

    def _set_network(self, network: NetworkSpec):
        self.network = network
        undriven = network_hamiltonian(network.with_drive(0j), self.layout).matrix
        self.static_term = undriven
        self.network_term = undriven + self.drive_term(network.drives)

    def with_network(self, network: NetworkSpec) -> "HamiltonianBuilder":
        """Builder for another network on the same layout, sharing the operator bases"""
        builder = object.__new__(HamiltonianBuilder)
        builder.layout = self.layout
        builder.convention = self.convention
        builder.x_basis, builder.y_basis = self.x_basis, self.y_basis
        builder.drive_x, builder.drive_y = self.drive_x, self.drive_y
        builder._set_network(network)
        return builder

    def drive_term(self, drives) -> np.ndarray:
        drives = np.asarray(drives, dtype=complex)
        return (np.tensordot(drives.real, self.drive_x, axes=(0, 0))
                + np.tensordot(drives.imag, self.drive_y, axes=(0, 0)))

    def total(self, J: np.ndarray, drives=None) -> HermitianOperator:
        """
        Network plus coupling Hamiltonian

        Args:
            J: Coupling amplitudes, shape (n_qubits, n_sites)
            drives: Per-site drives replacing the network's own (optional)

        Returns:
            HermitianOperator
        """
        J = np.asarray(J, dtype=complex)
        coupling = (np.tensordot(J.real, self.x_basis, axes=([0, 1], [0, 1]))
                    + np.tensordot(J.imag, self.y_basis, axes=([0, 1], [0, 1])))
        base = self.network_term if drives is None else self.static_term + self.drive_term(drives)
        return HermitianOperator(base + coupling)

    def params(self, J: np.ndarray, tau: float) -> ProtocolParams:
        return ProtocolParams(self.network, CouplingMatrix(J), tau, self.layout, self.convention)

    def protocol(self, J: np.ndarray, tau: float) -> "QuantumNetworkProtocol":
        return QuantumNetworkProtocol(self.params(J, tau), hamiltonian=self.total(J))


class QuantumNetworkProtocol:
    """
    Qubits in |phi>, network in vacuum, evolve for tau, trace out the network

    Only the 2^n_qubits columns of U that act on |phi> (x) |vac> are ever formed.
    """

    def __init__(self, params: ProtocolParams,
                 hamiltonian: Optional[HermitianOperator] = None):
        """
        Args:
            params: Protocol parameters
            hamiltonian: Precomputed total Hamiltonian (built from params when omitted)
        """
        self.params = params
        self.layout = params.layout
        self._hamiltonian = hamiltonian

    @cached_property
    def hamiltonian(self) -> HermitianOperator:
        if self._hamiltonian is not None:
            return self._hamiltonian
        return (network_hamiltonian(self.params.network, self.layout)
                + coupling_hamiltonian(self.params.coupling, self.layout,
                                       self.params.sigma_convention))

    @cached_property
    def evolution_columns(self) -> np.ndarray:
        """U[:, q * 2^n_sites] for every qubit basis index q, shape (dim, 2^n_qubits)"""
        energies, vectors = self.hamiltonian.eigensystem
        columns = np.arange(self.layout.qubit_dim) * self.layout.site_dim
        phases = np.exp(-1j * energies * self.params.tau)
        return vectors @ (phases[:, None] * vectors[columns, :].conj().T)

    def kraus_operators(self) -> np.ndarray:
        """
        K_r = (I (x) <r|) U (I (x) |vac>) for every network basis state r

        Returns:
            Array of shape (2^n_sites, 2^n_qubits, 2^n_qubits)
        """
        dq, dr = self.layout.qubit_dim, self.layout.site_dim
        return self.evolution_columns.reshape(dq, dr, dq).transpose(1, 0, 2)

    def output_amplitudes(self, inputs: np.ndarray) -> np.ndarray:
        """
        Joint output amplitudes for a batch of qubit input vectors

        Args:
            inputs: (m, 2^n_qubits) array of input rows

        Returns:
            (m, 2^n_qubits, 2^n_sites) array
        """
        inputs = np.atleast_2d(np.asarray(inputs, dtype=complex))
        if inputs.shape[1] != self.layout.qubit_dim:
            raise DimensionError(
                f"Input dimension {inputs.shape[1]} != qubit dimension {self.layout.qubit_dim}"
            )
        joint = inputs @ self.evolution_columns.T
        return joint.reshape(len(inputs), self.layout.qubit_dim, self.layout.site_dim)

    def reduced_matrices(self, inputs: np.ndarray) -> np.ndarray:
        """Reduced qubit density matrices, shape (m, 2^n_qubits, 2^n_qubits)"""
        psi = self.output_amplitudes(inputs)
        return np.einsum("mqr,mpr->mqp", psi, psi.conj())

    def pure_fidelities(self, inputs: np.ndarray, ideals: np.ndarray) -> np.ndarray:
        """<ideal_m| rho_m |ideal_m> for every row, without forming rho"""
        psi = self.output_amplitudes(inputs)
        overlaps = np.einsum("mq,mqr->mr", np.asarray(ideals).conj(), psi)
        return np.sum(np.abs(overlaps) ** 2, axis=1)

    def apply(self, phi_in: QuantumState) -> DensityMatrix:
        if phi_in.dim != self.layout.qubit_dim:
            raise DimensionError(
                f"Input has dimension {phi_in.dim}, protocol acts on {self.layout.qubit_dim}"
            )
        return DensityMatrix(self.reduced_matrices(phi_in.amplitudes)[0])

    def apply_to_density(self, rho: DensityMatrix) -> DensityMatrix:
        """Channel output sum_r K_r rho K_r^dag for a mixed input"""
        if rho.dim != self.layout.qubit_dim:
            raise DimensionError(
                f"Input has dimension {rho.dim}, protocol acts on {self.layout.qubit_dim}"
            )
        kraus = self.kraus_operators()
        return DensityMatrix(np.einsum("rij,jk,rlk->il", kraus, rho.matrix, kraus.conj()))


_protocol_cache: "OrderedDict[Tuple, QuantumNetworkProtocol]" = OrderedDict()
_cache_lock = threading.Lock()


def get_protocol(params: ProtocolParams) -> QuantumNetworkProtocol:
    """Shared protocol object per params value, so repeated calls reuse one eigensystem"""
    key = params.cache_key()
    with _cache_lock:
        protocol = _protocol_cache.get(key)
        if protocol is not None:
            _protocol_cache.move_to_end(key)
            return protocol
    protocol = QuantumNetworkProtocol(params)
    # diagonalize outside the lock
    protocol.evolution_columns
    with _cache_lock:
        _protocol_cache[key] = protocol
        while len(_protocol_cache) > PROTOCOL_CACHE_SIZE:
            _protocol_cache.popitem(last=False)
    return protocol


def clear_protocol_cache():
    with _cache_lock:
        _protocol_cache.clear()


def apply_protocol(phi_in: QuantumState, params: ProtocolParams) -> DensityMatrix:
    """
    Run the protocol on a pure qubit input

    Args:
        phi_in: Qubit input state of dimension 2^n_qubits
        params: Network, coupling, evolution time and layout

    Returns:
        Reduced qubit density matrix
    """
    return get_protocol(params).apply(phi_in)


def apply_protocol_to_density(rho_in: DensityMatrix, params: ProtocolParams) -> DensityMatrix:
    """Channel induced by the protocol, applied to a mixed qubit input"""
    return get_protocol(params).apply_to_density(rho_in)


__all__ = [
    "CouplingMatrix", "ProtocolParams", "coupling_operator_basis", "drive_operator_basis",
    "coupling_hamiltonian",
    "HamiltonianBuilder", "QuantumNetworkProtocol", "get_protocol", "clear_protocol_cache",
    "apply_protocol", "apply_protocol_to_density",
]
