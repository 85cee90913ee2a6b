"""
Tests for the gate library, circuits, channel targets and the cNOT identities
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose
from src.gates.channels import (
    ChannelTarget, amplitude_damping_kraus, amplitude_damping_output, decay_probability,
    parse_target,
)
from src.gates.circuits import (
    CircuitDescription, circuit, compose_circuit, gate_count, grover_oracle_circuit,
    grover_prep_circuit, load_builtin_circuit,
)
from src.gates.identities import compose_identity, identity_names, verify_identity
from src.gates.library import (
    GateMatrix, equal_up_to_phase, gate_deviation, grover_diffusion, grover_oracle,
    identity_gate, rotation, standard_gate,
)
from src.qcore.states import DensityMatrix, QuantumState
from src.utils.errors import ConfigError, DimensionError, ValidationError


def basis(index, n):
    return QuantumState.basis(index, n).amplitudes


class TestLibrary:
    def test_hadamard_on_zero(self):
        assert_allclose(standard_gate("H").apply(basis(0, 1)), np.array([1, 1]) / np.sqrt(2))

    def test_cnot_flips_target_when_control_set(self):
        assert_allclose(standard_gate("cNOT").apply(basis(0b10, 2)), basis(0b11, 2))
        assert_allclose(standard_gate("cNOT").apply(basis(0b01, 2)), basis(0b01, 2))

    def test_sqrt_swap_squares_to_swap(self):
        sswap = standard_gate("sSWAP")
        assert_allclose((sswap @ sswap).matrix, standard_gate("SWAP").matrix, atol=1e-12)

    def test_sqrt_iswap_squares_to_iswap(self):
        siswap = standard_gate("siSWAP").matrix
        iswap = np.array([[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]])
        assert_allclose(siswap @ siswap, iswap, atol=1e-12)

    def test_t_squares_to_s(self):
        t = standard_gate("T")
        assert_allclose((t @ t).matrix, standard_gate("S").matrix, atol=1e-12)
        assert_allclose((t @ standard_gate("T†")).matrix, np.eye(2), atol=1e-12)

    def test_toffoli_flips_only_with_both_controls(self):
        toffoli = standard_gate("Toffoli")
        assert_allclose(toffoli.apply(basis(0b110, 3)), basis(0b111, 3))
        assert_allclose(toffoli.apply(basis(0b100, 3)), basis(0b100, 3))

    @pytest.mark.parametrize("alias, canonical", [
        ("cx", "cNOT"), ("hadamard", "H"), ("sqrt-swap", "sSWAP"), ("identity", "I"), ("ccx", "Toffoli"),
    ])
    def test_aliases(self, alias, canonical):
        assert standard_gate(alias).name == canonical

    def test_unknown_name(self):
        with pytest.raises(ConfigError):
            standard_gate("FOO")

    def test_non_unitary_rejected(self):
        with pytest.raises(ValidationError):
            GateMatrix(np.array([[1, 1], [0, 1]]))

    def test_identity_gate(self):
        assert_allclose(identity_gate(2).matrix, np.eye(4))
        with pytest.raises(DimensionError):
            identity_gate(0)


class TestRotations:
    def test_rx_pi_is_x_up_to_phase(self):
        assert equal_up_to_phase(rotation("x", np.pi), standard_gate("X"))

    def test_ry_pi_is_y_up_to_phase(self):
        assert equal_up_to_phase(rotation("y", np.pi), standard_gate("Y"))

    def test_rz_pi_half_is_s(self):
        assert_allclose(rotation("z", np.pi / 2).matrix, standard_gate("S").matrix, atol=1e-12)

    def test_zero_angle(self):
        for axis in "xyz":
            assert_allclose(rotation(axis, 0.0).matrix, np.eye(2), atol=1e-12)

    def test_bad_axis_and_angle(self):
        with pytest.raises(ConfigError):
            rotation("w", 1.0)
        with pytest.raises(ValidationError):
            rotation("x", np.inf)

    def test_phase_insensitive_deviation(self):
        h = standard_gate("H").matrix
        assert gate_deviation(h, np.exp(0.7j) * h) < 1e-12
        assert gate_deviation(h, standard_gate("X").matrix) > 0.1


class TestCircuits:
    def test_empty_circuit_is_identity(self):
        assert_allclose(compose_circuit(CircuitDescription(2)).matrix, np.eye(4))

    def test_application_order(self):
        # X then H on |0> gives |->, H then X gives |+>
        minus = compose_circuit(circuit(1, [("X", [0]), ("H", [0])])).apply(basis(0, 1))
        assert_allclose(minus, np.array([1, -1]) / np.sqrt(2), atol=1e-12)

    def test_hh_is_identity(self):
        c = circuit(1, [("H", [0]), ("H", [0])])
        assert_allclose(compose_circuit(c).matrix, np.eye(2), atol=1e-12)

    def test_rotation_records(self):
        c = circuit(1, [("Rz", [0], np.pi / 2)])
        assert_allclose(compose_circuit(c).matrix, standard_gate("S").matrix, atol=1e-12)
        with pytest.raises(ConfigError):
            circuit(1, [("Rx", [0])])

    def test_invalid_placements(self):
        with pytest.raises(DimensionError):
            circuit(2, [("X", [2])])
        with pytest.raises(DimensionError):
            circuit(2, [("cNOT", [1, 1])])
        with pytest.raises(DimensionError):
            compose_circuit(circuit(2, [("cNOT", [0])]))

    def test_json_round_trip(self):
        c = circuit(2, [("H", [0]), ("cNOT", [0, 1]), ("Ry", [1], 0.3)], name="bell")
        again = CircuitDescription.from_json(c.to_json())
        assert again == c

    def test_malformed_document(self):
        with pytest.raises(ConfigError):
            CircuitDescription.from_dict({"gates": []})
        with pytest.raises(ConfigError):
            CircuitDescription.from_dict({"n_qubits": 1, "gates": [{"targets": [0]}]})

    def test_toffoli_asset(self):
        c = load_builtin_circuit("toffoli")
        assert len(c) == 15
        assert gate_count(c)["cNOT"] == 6
        assert gate_deviation(compose_circuit(c), standard_gate("Toffoli")) < 1e-10

    def test_grover3_diffusion_asset(self):
        c = load_builtin_circuit("grover3-diffusion")
        assert len(c) == 29
        assert gate_deviation(compose_circuit(c), grover_diffusion(3)) < 1e-10

    def test_grover2_diffusion_asset(self):
        c = load_builtin_circuit("grover2-diffusion")
        assert len(c) == 11
        assert gate_deviation(compose_circuit(c), grover_diffusion(2)) < 1e-10

    def test_grover2_prep_asset(self):
        prep = compose_circuit(load_builtin_circuit("grover2-prep"))
        assert_allclose(prep.apply(basis(0, 2)), np.full(4, 0.5), atol=1e-12)
        assert_allclose(prep.matrix, compose_circuit(grover_prep_circuit(2)).matrix, atol=1e-12)

    def test_unknown_asset(self):
        with pytest.raises(ConfigError):
            load_builtin_circuit("qft")


class TestGrover:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_diffusion_properties(self, n):
        d = grover_diffusion(n).matrix
        assert_allclose(d, d.conj().T, atol=1e-12)
        assert_allclose(d @ d, np.eye(2 ** n), atol=1e-12)
        uniform = np.full(2 ** n, 2 ** (-n / 2))
        assert_allclose(d @ uniform, -uniform, atol=1e-12)

    def test_oracle_marks_one_state(self):
        assert_allclose(np.diag(grover_oracle(2, 2).matrix), [1, 1, -1, 1])
        with pytest.raises(DimensionError):
            grover_oracle(2, 4)

    @pytest.mark.parametrize("n, marked", [(2, 0), (2, 1), (2, 2), (2, 3), (3, 0), (3, 5), (3, 7)])
    def test_oracle_circuit_matches_oracle(self, n, marked):
        composed = compose_circuit(grover_oracle_circuit(n, marked))
        assert gate_deviation(composed, grover_oracle(n, marked)) < 1e-10

    @pytest.mark.parametrize("marked", range(4))
    def test_two_qubit_search_finds_marked(self, marked):
        uniform = np.full(4, 0.5)
        out = grover_diffusion(2).apply(grover_oracle(2, marked).apply(uniform))
        assert abs(out[marked]) ** 2 == pytest.approx(1.0, abs=1e-12)


class TestDamping:
    def test_decay_probability(self):
        assert decay_probability(0.0, 5.0) == 0.0
        assert decay_probability(1.0, 0.0) == 0.0
        assert decay_probability(1.0, 1.0) == pytest.approx(1 - np.exp(-1.0))
        assert decay_probability(1.0, np.inf) == 1.0
        with pytest.raises(ValidationError):
            decay_probability(-1.0, 1.0)

    def test_zero_time_is_identity(self):
        rho = QuantumState(np.array([0.6, 0.8j])).to_density()
        assert_allclose(amplitude_damping_output(rho, 1.0, 0.0).matrix, rho.matrix, atol=1e-12)

    def test_infinite_time_reaches_ground(self):
        rho = QuantumState(np.array([0.6, 0.8j])).to_density()
        assert_allclose(amplitude_damping_output(rho, 1.0, np.inf).matrix, np.diag([1, 0]), atol=1e-12)

    def test_excited_state_decay(self):
        rho = amplitude_damping_output(QuantumState.basis(1, 1).to_density(), 1.0, 0.5)
        assert rho.matrix[1, 1].real == pytest.approx(np.exp(-0.5))
        assert rho.matrix[0, 0].real == pytest.approx(1 - np.exp(-0.5))

    def test_coherence_shrinks_by_sqrt(self):
        plus = QuantumState(np.array([1, 1]) / np.sqrt(2)).to_density()
        rho = amplitude_damping_output(plus, 2.0, 0.5)
        assert rho.matrix[0, 1].real == pytest.approx(0.5 * np.exp(-0.5))

    def test_kraus_matches_closed_form(self, rng):
        vector = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        rho = QuantumState.from_vector(vector).to_density()
        kraus = amplitude_damping_kraus(0.8, 1.3)
        via_kraus = sum(k @ rho.matrix @ k.conj().T for k in kraus)
        assert_allclose(amplitude_damping_output(rho, 0.8, 1.3).matrix, via_kraus, atol=1e-12)

    def test_needs_one_qubit(self):
        with pytest.raises(DimensionError):
            amplitude_damping_output(DensityMatrix.maximally_mixed(2), 1.0, 1.0)


class TestChannelTarget:
    def test_from_gate(self):
        target = ChannelTarget.from_gate("cNOT")
        assert target.n_qubits == 2
        assert target.is_pure
        assert target.label == "cNOT"

    def test_two_qubit_identity(self):
        target = ChannelTarget.from_gate("identity2")
        assert_allclose(target.gate.matrix, np.eye(4))

    def test_damping_target(self):
        target = ChannelTarget.amplitude_damping(1.0, 0.5)
        assert target.n_qubits == 1
        assert not target.is_pure
        with pytest.raises(ValidationError):
            target.ideal_vectors(np.eye(2))

    def test_ideal_matrices_match_gate(self):
        target = ChannelTarget.from_gate("X")
        rhos = target.ideal_matrices(np.eye(2))
        assert_allclose(rhos[0], np.diag([0, 1]))
        assert_allclose(rhos[1], np.diag([1, 0]))

    @pytest.mark.parametrize("target", [
        ChannelTarget.from_gate("H"),
        ChannelTarget.from_circuit("toffoli"),
        ChannelTarget.amplitude_damping(0.7, 1.2),
        ChannelTarget.unitary(rotation("y", 0.4)),
    ])
    def test_dict_round_trip(self, target):
        again = ChannelTarget.from_dict(target.to_dict())
        assert again.kind == target.kind
        assert again.to_dict() == target.to_dict()
        if target.is_pure:
            assert_allclose(again.gate.matrix, target.gate.matrix, atol=1e-12)

    def test_parse_target(self):
        assert parse_target("H").label == "H"
        assert parse_target({"kind": "amplitude-damping", "gamma": 1, "t": 2}).t == 2.0
        with pytest.raises(ConfigError):
            parse_target({"kind": "teleport"})
        with pytest.raises(ConfigError):
            parse_target({"kind": "unitary"})


class TestIdentities:
    def test_names(self):
        assert identity_names() == ["cy", "cz", "sswap", "siswap"]

    @pytest.mark.parametrize("name", ["cy", "cz", "sswap", "siswap"])
    def test_constructs_cnot(self, name):
        assert verify_identity(name) < 1e-10
        assert gate_deviation(compose_identity(name), standard_gate("cNOT")) < 1e-10

    def test_unknown_identity(self):
        with pytest.raises(ConfigError):
            compose_identity("swap")
