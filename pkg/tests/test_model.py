"""
Tests for the network model, the qubit coupling and the protocol
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose
from config.settings import SIGMA_DOUBLED, SIGMA_LADDER
from src.model.direct import DirectTwoQubitSpec, direct_two_qubit_unitary, one_site_hamiltonian
from src.model.network import (
    NetworkSpec, chain_adjacency, draw_network, drive_matrix, network_hamiltonian,
    perturb_network, random_adjacency,
)
from src.model.operators import sigma_minus, sigma_plus
from src.model.protocol import (
    CouplingMatrix, HamiltonianBuilder, ProtocolParams, apply_protocol,
    apply_protocol_to_density, clear_protocol_cache, coupling_hamiltonian, get_protocol,
)
from src.qcore.linalg import haar_random_state, haar_random_vectors, purity, unitary_deviation
from src.qcore.states import DensityMatrix, QuantumState, RegisterLayout
from src.utils.errors import ConfigError, DimensionError, ValidationError


def params_for(network, J, tau, n_qubits=1, convention=SIGMA_DOUBLED):
    layout = RegisterLayout(n_qubits, network.n_sites)
    return ProtocolParams(network, CouplingMatrix(J), tau, layout, convention)


class TestOperators:
    def test_sigma_plus_conventions(self):
        assert_allclose(sigma_plus(SIGMA_DOUBLED), [[0, 0], [2, 0]])
        assert_allclose(sigma_plus(SIGMA_LADDER), [[0, 0], [1, 0]])
        assert_allclose(sigma_minus(SIGMA_LADDER), [[0, 1], [0, 0]])

    def test_unknown_convention(self):
        with pytest.raises(ConfigError):
            sigma_plus("spin")


class TestDrawNetwork:
    def test_same_seed_same_network(self):
        assert draw_network(4, 1.0, 1.0, seed=3) == draw_network(4, 1.0, 1.0, seed=3)

    def test_chain_draws_within_bounds(self):
        spec = draw_network(6, 2.0, 0.5, seed=11)
        assert spec.adjacency == chain_adjacency(6)
        assert len(spec.hoppings) == 5
        assert all(abs(e) <= 1.0 for e in spec.energies)
        assert all(abs(k) <= 0.25 for k in spec.hoppings)

    def test_zero_scales(self):
        spec = draw_network(3, 0.0, 0.0, seed=1)
        assert spec.energies == (0.0, 0.0, 0.0)
        assert spec.hoppings == (0.0, 0.0)

    def test_single_site_has_no_edges(self):
        spec = draw_network(1, 1.0, 1.0, seed=0)
        assert spec.adjacency == ()
        assert spec.hoppings == ()

    def test_invalid_inputs(self):
        with pytest.raises(DimensionError):
            draw_network(0, 1.0, 1.0)
        with pytest.raises(ValidationError):
            draw_network(2, -1.0, 1.0)
        with pytest.raises(DimensionError):
            draw_network(2, 1.0, 1.0, adjacency=[(0, 2)])
        with pytest.raises(DimensionError):
            draw_network(2, 1.0, 1.0, adjacency=[(1, 1)])

    def test_energy_outside_bounds_rejected(self):
        with pytest.raises(ValidationError):
            NetworkSpec(1, (0.7,), (), (), E0=1.0)

    def test_fixed_energy_mode(self):
        spec = draw_network(1, 1.0, 0.0, seed=7, energy_mode="fixed")
        assert spec.energies == (1.0,)
        assert draw_network(3, 2.0, 1.0, seed=1, energy_mode="fixed").energies == (2.0, 2.0, 2.0)
        assert NetworkSpec.from_json(spec.to_json()) == spec
        with pytest.raises(ConfigError):
            draw_network(1, 1.0, 0.0, energy_mode="gaussian")
        with pytest.raises(ValidationError):
            NetworkSpec(1, (0.3,), (), (), E0=1.0, energy_mode="fixed")

    def test_fixed_energy_survives_perturbation(self):
        spec = draw_network(2, 1.0, 1.0, seed=3, energy_mode="fixed")
        moved = perturb_network(spec, 0.2, rng=4)
        assert moved.energy_mode == "fixed"
        assert np.max(np.abs(np.subtract(moved.energies, 1.0))) <= 0.2

    def test_random_adjacency(self):
        assert random_adjacency(4, 1.0, seed=0) == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
        assert random_adjacency(4, 0.0, seed=0) == ()

    def test_json_round_trip(self):
        spec = draw_network(3, 1.0, 1.0, P=0.2 - 0.1j, seed=5)
        assert NetworkSpec.from_json(spec.to_json()) == spec

    def test_missing_field(self):
        with pytest.raises(ConfigError):
            NetworkSpec.from_dict({"n_sites": 1})


class TestPerturbNetwork:
    def test_moves_at_most_delta(self):
        spec = draw_network(5, 1.0, 1.0, seed=2)
        moved = perturb_network(spec, 0.1, rng=9)
        assert np.max(np.abs(np.subtract(moved.energies, spec.energies))) <= 0.1
        assert np.max(np.abs(np.subtract(moved.hoppings, spec.hoppings))) <= 0.1
        assert moved.perturbation == pytest.approx(0.1)

    def test_zero_delta_is_identity(self):
        spec = draw_network(3, 1.0, 1.0, seed=2)
        moved = perturb_network(spec, 0.0, rng=1)
        assert moved.energies == spec.energies
        assert moved.hoppings == spec.hoppings

    def test_negative_delta(self):
        with pytest.raises(ValidationError):
            perturb_network(draw_network(2, 1.0, 1.0, seed=0), -0.1)


class TestNetworkHamiltonian:
    def test_single_site_energy(self):
        spec = NetworkSpec(1, (0.3,), (), (), E0=1.0)
        assert_allclose(network_hamiltonian(spec).matrix, np.diag([0.0, 0.3]))

    def test_single_site_drive(self):
        P = 0.4 + 0.2j
        spec = NetworkSpec(1, (0.7,), (), (), drive=P, E0=2.0)
        assert_allclose(network_hamiltonian(spec).matrix, [[0, np.conj(P)], [P, 0.7]])
        assert_allclose(drive_matrix(P), [[0, np.conj(P)], [P, 0]])

    def test_hopping_exchanges_excitation(self):
        spec = NetworkSpec(2, (0.0, 0.0), (0.4,), ((0, 1),), K0=1.0)
        h = network_hamiltonian(spec).matrix
        # |01> <-> |10>
        assert h[1, 2] == pytest.approx(0.4)
        assert h[2, 1] == pytest.approx(0.4)
        assert h[0, 0] == 0 and h[3, 3] == 0

    def test_hermitian(self):
        spec = draw_network(4, 1.0, 1.0, P=0.3 + 0.5j, seed=4)
        h = network_hamiltonian(spec, RegisterLayout(2, 4)).matrix
        assert h.shape == (64, 64)
        assert_allclose(h, h.conj().T, atol=1e-12)

    def test_layout_mismatch(self):
        with pytest.raises(DimensionError):
            network_hamiltonian(draw_network(2, 1.0, 1.0, seed=0), RegisterLayout(1, 3))


class TestCoupling:
    def test_zero_coupling(self):
        layout = RegisterLayout(2, 3)
        h = coupling_hamiltonian(CouplingMatrix.zeros(2, 3), layout)
        assert not np.any(h.matrix)

    @pytest.mark.parametrize("convention, scale", [(SIGMA_DOUBLED, 2.0), (SIGMA_LADDER, 1.0)])
    def test_exchange_element(self, convention, scale):
        layout = RegisterLayout(1, 1)
        h = coupling_hamiltonian(CouplingMatrix([[0.3]]), layout, convention).matrix
        # |g,e> (index 1) <-> |e,g> (index 2)
        assert h[1, 2] == pytest.approx(scale * 0.3)
        assert h[2, 1] == pytest.approx(scale * 0.3)
        assert np.count_nonzero(np.abs(h) > 1e-14) == 2

    def test_complex_amplitude(self):
        J = 0.2 + 0.1j
        h = coupling_hamiltonian(CouplingMatrix([[J]]), RegisterLayout(1, 1), SIGMA_LADDER).matrix
        assert h[2, 1] == pytest.approx(np.conj(J))
        assert h[1, 2] == pytest.approx(J)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            coupling_hamiltonian(CouplingMatrix.zeros(1, 2), RegisterLayout(2, 2))

    def test_builder_matches_direct_sum(self, rng):
        network = draw_network(3, 1.0, 1.0, P=0.2j, seed=8)
        layout = RegisterLayout(2, 3)
        J = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
        builder = HamiltonianBuilder(network, layout)
        expected = (network_hamiltonian(network, layout).matrix
                    + coupling_hamiltonian(CouplingMatrix(J), layout).matrix)
        assert_allclose(builder.total(J).matrix, expected, atol=1e-12)

    def test_builder_drive_override(self):
        network = draw_network(2, 1.0, 1.0, seed=8)
        layout = RegisterLayout(1, 2)
        builder = HamiltonianBuilder(network, layout)
        J = np.zeros((1, 2))
        driven = network.with_site_drives([0.1, -0.2j])
        assert_allclose(builder.total(J, drives=driven.drives).matrix,
                        network_hamiltonian(driven, layout).matrix, atol=1e-12)


class TestProtocol:
    def test_uncoupled_undriven_is_identity(self, rng):
        network = draw_network(3, 1.0, 1.0, seed=1)
        params = params_for(network, np.zeros((2, 3)), 2.5, n_qubits=2)
        phi = haar_random_state(2, rng)
        rho = apply_protocol(phi, params)
        assert_allclose(rho.matrix, phi.projector(), atol=1e-10)

    def test_zero_time_is_identity(self, rng):
        network = draw_network(2, 1.0, 1.0, P=0.3, seed=1)
        params = params_for(network, [[0.4, -0.2]], 0.0)
        phi = haar_random_state(1, rng)
        assert_allclose(apply_protocol(phi, params).matrix, phi.projector(), atol=1e-10)

    def test_output_is_density_matrix(self, rng):
        network = draw_network(3, 1.0, 1.0, P=0.2 + 0.1j, seed=6)
        params = params_for(network, rng.standard_normal((1, 3)), 1.7)
        rho = apply_protocol(haar_random_state(1, rng), params)
        assert np.trace(rho.matrix) == pytest.approx(1.0)
        assert purity(rho) <= 1.0 + 1e-9

    def test_swap_into_site_loses_excitation(self):
        # ladder exchange with J = pi/2 moves |e,g> to |g,e> fully
        network = NetworkSpec(1, (0.0,), (), ())
        params = params_for(network, [[np.pi / 2]], 1.0, convention=SIGMA_LADDER)
        rho = apply_protocol(QuantumState.basis(1, 1), params)
        assert_allclose(rho.matrix, np.diag([1.0, 0.0]), atol=1e-10)

    def test_kraus_completeness(self, rng):
        network = draw_network(2, 1.0, 1.0, P=0.5, seed=3)
        protocol = get_protocol(params_for(network, rng.standard_normal((2, 2)), 1.3, n_qubits=2))
        kraus = protocol.kraus_operators()
        assert kraus.shape == (4, 4, 4)
        total = np.einsum("rji,rjk->ik", kraus.conj(), kraus)
        assert_allclose(total, np.eye(4), atol=1e-10)

    def test_channel_is_linear(self, rng):
        network = draw_network(2, 1.0, 1.0, P=0.2, seed=3)
        params = params_for(network, rng.standard_normal((1, 2)), 0.9)
        a, b = haar_random_state(1, rng), haar_random_state(1, rng)
        mixed = DensityMatrix(0.3 * a.projector() + 0.7 * b.projector())
        expected = 0.3 * apply_protocol(a, params).matrix + 0.7 * apply_protocol(b, params).matrix
        assert_allclose(apply_protocol_to_density(mixed, params).matrix, expected, atol=1e-10)

    def test_batch_matches_single(self, rng):
        network = draw_network(2, 1.0, 1.0, seed=3)
        protocol = get_protocol(params_for(network, rng.standard_normal((1, 2)), 0.9))
        states = [haar_random_state(1, rng) for _ in range(3)]
        batch = protocol.reduced_matrices(np.vstack([s.amplitudes for s in states]))
        for state, rho in zip(states, batch):
            assert_allclose(rho, protocol.apply(state).matrix, atol=1e-12)

    def test_input_dimension_checked(self):
        network = draw_network(1, 1.0, 1.0, seed=0)
        with pytest.raises(DimensionError):
            apply_protocol(QuantumState.basis(0, 2), params_for(network, [[0.1]], 1.0))

    def test_invalid_params(self):
        network = draw_network(2, 1.0, 1.0, seed=0)
        with pytest.raises(ValidationError):
            params_for(network, [[0.1, 0.1]], -1.0)
        with pytest.raises(DimensionError):
            params_for(network, [[0.1]], 1.0)

    def test_protocol_cache(self):
        params = params_for(draw_network(1, 1.0, 1.0, seed=0), [[0.1]], 1.0)
        first = get_protocol(params)
        assert get_protocol(params) is first
        clear_protocol_cache()
        assert get_protocol(params) is not first


class TestDirectModels:
    def test_zero_time_gives_identity(self):
        spec = DirectTwoQubitSpec(E1=0.3, E2=1.0, P1=0.1, P2=0.2j, J=0.5, tau=0.0)
        assert_allclose(direct_two_qubit_unitary(spec), np.eye(4), atol=1e-12)

    def test_undriven_uncoupled_is_diagonal(self):
        spec = DirectTwoQubitSpec(E1=0.5, E2=1.0, P1=0, P2=0, J=0.0, tau=2.0)
        expected = np.exp(-1j * 2.0 * np.array([0.0, 1.0, 0.5, 1.5]))
        assert_allclose(direct_two_qubit_unitary(spec), np.diag(expected), atol=1e-12)

    def test_random_specs_are_unitary(self, rng):
        for _ in range(5):
            E1, J, tau = rng.uniform(-2, 2, 3)
            spec = DirectTwoQubitSpec(E1, 1.0, complex(*rng.standard_normal(2)),
                                      complex(*rng.standard_normal(2)), J, abs(tau) * 5)
            assert unitary_deviation(direct_two_qubit_unitary(spec)) < 1e-10

    def test_energy_unit_must_be_nonzero(self):
        with pytest.raises(ValidationError):
            DirectTwoQubitSpec(E1=1.0, E2=0.0, P1=0, P2=0, J=0, tau=1.0)

    def test_spec_dict_round_trip(self):
        spec = DirectTwoQubitSpec(E1=0.3, E2=1.0, P1=0.1 + 0.2j, P2=-0.4j, J=0.5, tau=1.5)
        assert DirectTwoQubitSpec.from_dict(spec.to_dict()) == spec

    def test_one_site_elements(self):
        h = one_site_hamiltonian(0.5, 0.3 + 0.1j, 0.2 - 0.4j).matrix
        # register order |qubit, site>
        assert h[1, 1] == pytest.approx(0.5)
        assert h[3, 3] == pytest.approx(0.5)
        assert h[1, 0] == pytest.approx(0.3 + 0.1j)
        assert h[0, 1] == pytest.approx(0.3 - 0.1j)
        assert h[2, 1] == pytest.approx(0.2 + 0.4j)
        assert h[1, 2] == pytest.approx(0.2 - 0.4j)

    def test_one_site_layout_checked(self):
        with pytest.raises(DimensionError):
            one_site_hamiltonian(0.5, 0.0, 0.1, RegisterLayout(2, 1))


# Resonant site (E1 = 0): X_q X_s is conserved and the qubit leaves as cos(a) X + sin(a) Z
# when Omega tau = 3.5 pi and J tau = -5 pi, giving a within 0.01 rad of pi / 4
HADAMARD_DRIVE_TIME = 3.5 * np.pi * np.sqrt(24) / 7
HADAMARD_COUPLING_TIME = -5 * np.pi
HADAMARD = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


class TestResonantHadamard:
    def fidelities(self, network, J, tau, convention):
        inputs = haar_random_vectors(1, 200, 5)
        protocol = get_protocol(params_for(network, J, tau, convention=convention))
        return protocol.pure_fidelities(inputs, inputs @ HADAMARD.T)

    def test_one_site(self):
        tau = 1.5
        network = NetworkSpec(1, (0.0,), (), (), drive=HADAMARD_DRIVE_TIME / tau)
        values = self.fidelities(network, [[HADAMARD_COUPLING_TIME / tau]], tau, SIGMA_LADDER)
        assert values.min() > 0.999
        assert values.mean() > 0.9995

    def test_six_sites_with_first_coupling_only(self):
        tau = 0.15
        P = HADAMARD_DRIVE_TIME / tau
        network = NetworkSpec(6, (0.0,) * 6, (0.0,) * 5, chain_adjacency(6), drive=P)
        J = np.zeros((1, 6), dtype=complex)
        J[0, 0] = HADAMARD_COUPLING_TIME / (2 * tau)
        values = self.fidelities(network, J, tau, SIGMA_DOUBLED)
        assert values.min() > 0.999
        # trained J11 is of the drive's order, far outside a unit-scale starting spread
        assert 0.5 < abs(J[0, 0]) / P < 2
