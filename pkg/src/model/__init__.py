from src.model.network import NetworkSpec, chain_adjacency, draw_network, network_hamiltonian, perturb_network
from src.model.protocol import (
    CouplingMatrix, HamiltonianBuilder, ProtocolParams, QuantumNetworkProtocol,
    apply_protocol, apply_protocol_to_density, coupling_hamiltonian,
)
from src.model.direct import DirectTwoQubitSpec, direct_two_qubit_unitary, one_site_hamiltonian
