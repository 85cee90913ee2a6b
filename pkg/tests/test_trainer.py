"""
Tests for the fitness objective, the genetic search, Nelder-Mead and training
"""
import json
import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.optimize import rosen
from src.gates.channels import ChannelTarget
from src.model.direct import DirectTwoQubitSpec
from src.model.network import draw_network
from src.qcore.states import QuantumState
from src.trainer.fitness import (
    ParameterSpace, TrainingContext, TrainingSet, average_fidelity, coupling_mask,
    parse_trainable,
)
from src.trainer.genetic import (
    STOP_CAP, STOP_STAGNATION, STOP_TARGET, GAConfig, Individual, ga_step, run_genetic,
)
from src.trainer.persistence import (
    TrainedModel, load_history, load_model, save_history, save_model,
)
from src.trainer.simplex import NMConfig, nelder_mead
from src.trainer.training import scan_drive_and_time, train_direct_model, train_gate
from src.utils.errors import ConfigError, DimensionError, ValidationError
from src.utils.rng import SeedStreams


def negative_abs(x):
    return -float(np.mean(np.abs(x)))


@pytest.fixture
def identity_context():
    target = ChannelTarget.from_gate("I")
    network = draw_network(2, 1.0, 1.0, seed=4)
    space = ParameterSpace(1, 2, coupling_mask("full", 1, 2))
    train = TrainingSet.sample(target, 5, 3)
    return TrainingContext(target, network, 1.5, space, train)


class TestTrainingSet:
    def test_ideal_outputs_follow_gate(self):
        target = ChannelTarget.from_gate("X")
        train = TrainingSet.from_states(target, [QuantumState.basis(0, 1)])
        assert_allclose(train.ideal_vectors[0], [0, 1])
        assert train.pure

    def test_damping_set_is_mixed(self):
        train = TrainingSet.sample(ChannelTarget.amplitude_damping(1.0, 1.0), 4, 0)
        assert not train.pure
        assert train.ideal_matrices.shape == (4, 2, 2)

    def test_sample_is_reproducible(self):
        target = ChannelTarget.from_gate("H")
        a = TrainingSet.sample(target, 3, 11)
        b = TrainingSet.sample(target, 3, 11)
        assert np.array_equal(a.inputs, b.inputs)

    def test_empty_and_mismatched(self):
        target = ChannelTarget.from_gate("H")
        with pytest.raises(ValidationError):
            TrainingSet.sample(target, 0)
        with pytest.raises(DimensionError):
            TrainingSet.for_target(target, np.eye(4))


class TestParameterSpace:
    def test_masks(self):
        assert coupling_mask("full", 2, 3).all()
        j11 = coupling_mask("j11", 2, 3)
        assert j11[0, 0] and j11.sum() == 1
        with pytest.raises(ConfigError):
            coupling_mask("diagonal", 2, 3)
        with pytest.raises(DimensionError):
            coupling_mask(np.ones((1, 3)), 2, 3)

    def test_trainable_parsing(self):
        assert parse_trainable("tau,J") == ("J", "tau")
        with pytest.raises(ConfigError):
            parse_trainable("P")
        with pytest.raises(ConfigError):
            parse_trainable("J,E")

    def test_encode_decode(self):
        network = draw_network(2, 1.0, 1.0, P=0.3 - 0.2j, seed=1)
        space = ParameterSpace(1, 2, coupling_mask("full", 1, 2), trainable=("J", "P", "tau"))
        J = np.array([[0.1 + 0.2j, -0.3j]])
        x = space.encode(J, network, 2.0)
        assert x.shape == (space.size,) == (7,)
        decoded_J, decoded_network, tau = space.decode(x, network, 0.0)
        assert_allclose(decoded_J, J)
        assert decoded_network.drive == pytest.approx(0.3 - 0.2j)
        assert tau == 2.0

    def test_tau_decoded_as_magnitude(self):
        space = ParameterSpace(1, 1, np.ones((1, 1)), trainable=("J", "tau"))
        network = draw_network(1, 1.0, 0.0, seed=0)
        assert space.decode(np.array([0.0, 0.0, -1.5]), network, 0.0)[2] == 1.5

    def test_wrong_vector_size(self):
        space = ParameterSpace(1, 2, np.ones((1, 2)))
        with pytest.raises(DimensionError):
            space.decode(np.zeros(3), draw_network(2, 1.0, 1.0, seed=0), 1.0)


class TestAverageFidelity:
    def test_identity_target_uncoupled(self, identity_context):
        assert average_fidelity(np.zeros(4), identity_context) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_output_scores_zero(self):
        target = ChannelTarget.from_gate("X")
        network = draw_network(1, 0.0, 0.0, seed=0)
        space = ParameterSpace(1, 1, np.ones((1, 1)))
        train = TrainingSet.from_states(target, [QuantumState.basis(0, 1), QuantumState.basis(1, 1)])
        context = TrainingContext(target, network, 1.0, space, train)
        assert average_fidelity(np.zeros(2), context) == pytest.approx(0.0, abs=1e-12)

    def test_order_of_states_irrelevant(self, identity_context, rng):
        x = rng.standard_normal(4)
        reversed_train = identity_context.train.subset(range(len(identity_context.train) - 1, -1, -1))
        assert average_fidelity(x, identity_context, reversed_train) == pytest.approx(
            average_fidelity(x, identity_context), abs=1e-12)

    def test_accepts_individual(self, identity_context):
        individual = Individual(np.zeros(4))
        assert average_fidelity(individual, identity_context) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_nan_individual(self, identity_context):
        bad = np.array([0.1, np.nan, 0.0, 0.0])
        with pytest.raises(ValidationError):
            Individual(bad)
        with pytest.raises(ValidationError):
            average_fidelity(bad, identity_context)

    def test_in_unit_interval(self, identity_context, rng):
        for _ in range(5):
            value = average_fidelity(rng.standard_normal(4), identity_context)
            assert 0.0 <= value <= 1.0


class TestGeneticStep:
    def test_zero_mutation_gives_midpoint(self):
        ga = GAConfig(population_size=4, mutation_rate=0.0, seed=0)
        population = [Individual([v, v]) for v in (0.0, -1.0, -2.0, -3.0)]
        nxt = ga_step(population, ga, negative_abs, np.random.default_rng(0))
        assert len(nxt) == 4
        assert_allclose(nxt[0].params, [0.0, 0.0])
        for child in nxt[1:]:
            assert_allclose(child.params, [-0.5, -0.5])

    def test_elite_keeps_fitness(self):
        ga = GAConfig(population_size=3, seed=0)
        population = [Individual([1.0]), Individual([0.2]), Individual([3.0])]
        nxt = ga_step(population, ga, negative_abs, np.random.default_rng(0))
        assert nxt[0].fitness == pytest.approx(-0.2)
        assert not any(child.evaluated for child in nxt[1:])

    def test_reproducible(self):
        ga = GAConfig(population_size=5, seed=0)
        population = [Individual(row) for row in np.random.default_rng(2).standard_normal((5, 3))]
        a = ga_step(population, ga, negative_abs, np.random.default_rng(7))
        b = ga_step(population, ga, negative_abs, np.random.default_rng(7))
        for x, y in zip(a, b):
            assert np.array_equal(x.params, y.params)

    def test_population_size_checked(self):
        ga = GAConfig(population_size=4)
        with pytest.raises(ValidationError):
            ga_step([Individual([0.0])] * 3, ga, negative_abs)

    def test_invalid_config(self):
        with pytest.raises(ValidationError):
            GAConfig(population_size=1)
        with pytest.raises(ValidationError):
            GAConfig(mutation_rate=-0.1)
        with pytest.raises(ValidationError):
            Individual([np.nan])


class TestRunGenetic:
    def test_toy_objective_improves(self):
        ga = GAConfig(population_size=10, mutation_rate=0.3, max_generations=50,
                      fitness_target=1.0, seed=1)
        x0 = np.full(3, 2.0)
        result = run_genetic(negative_abs, x0, ga, rng=np.random.default_rng(1), show_progress=False)
        assert result.best.fitness > negative_abs(x0)
        assert np.mean(np.abs(result.best.params)) < 2.0

    def test_history_is_monotone(self):
        ga = GAConfig(population_size=8, max_generations=30, fitness_target=1.0, seed=3)
        result = run_genetic(negative_abs, np.ones(2), ga, rng=np.random.default_rng(3),
                             show_progress=False)
        best = [row[1] for row in result.history]
        assert all(b >= a for a, b in zip(best, best[1:]))
        assert result.history[0][0] == 0

    def test_stops_at_target(self):
        ga = GAConfig(population_size=4, fitness_target=0.0, seed=0)
        result = run_genetic(negative_abs, np.zeros(2), ga, show_progress=False)
        assert result.stop_reason == STOP_TARGET
        assert result.generations == 0

    def test_stops_at_cap(self):
        ga = GAConfig(population_size=4, max_generations=3, fitness_target=1.0, seed=0)
        result = run_genetic(negative_abs, np.ones(2), ga, show_progress=False)
        assert result.stop_reason == STOP_CAP
        assert result.generations == 3
        assert len(result.history) == 4

    def test_stagnation_halves_and_stops(self):
        # a flat objective never improves
        ga = GAConfig(population_size=4, max_generations=100, fitness_target=2.0,
                      stagnation_halving=2, stagnation_switch=6, seed=0)
        result = run_genetic(lambda x: 0.5, np.zeros(2), ga, show_progress=False)
        assert result.stop_reason == STOP_STAGNATION
        assert result.generations == 6
        assert result.final_mutation == pytest.approx(ga.mutation_rate / 8)


class TestNelderMead:
    def test_rosenbrock_minimum(self):
        config = NMConfig(max_iterations=10000, xatol=1e-10, fatol=1e-15)
        result = nelder_mead(np.array([-1.0, 1.0]), lambda x: 1.0 - rosen(x), config)
        assert_allclose(result.individual.params, [1.0, 1.0], atol=1e-5)
        assert result.fitness == pytest.approx(1.0, abs=1e-9)
        assert not result.exhausted

    def test_never_worse_than_start(self):
        result = nelder_mead(Individual(np.zeros(2), 1.0), lambda x: 1.0 - float(np.sum(x ** 2)))
        assert result.fitness >= 1.0
        assert result.start_fitness == 1.0

    def test_budget_exhausted(self):
        result = nelder_mead(np.array([-1.0, 1.0]), lambda x: 1.0 - rosen(x),
                             NMConfig(max_iterations=5))
        assert result.exhausted
        assert result.fitness >= result.start_fitness

    def test_empty_vector(self):
        result = nelder_mead(np.zeros(0), lambda x: 0.7)
        assert result.fitness == 0.7
        assert result.iterations == 0


class TestTrainGate:
    def test_identity_needs_no_search(self):
        target = ChannelTarget.from_gate("I")
        network = draw_network(2, 1.0, 1.0, seed=2)
        result = train_gate(target, network, 1.0, GAConfig(seed=5), streams=SeedStreams(5),
                            show_progress=False)
        assert result.fitness == pytest.approx(1.0, abs=1e-9)
        assert result.stop_reason == STOP_TARGET
        assert result.ga.generations == 0

    def test_short_hadamard_run(self):
        network = draw_network(2, 1.0, 1.0, seed=7)
        ga = GAConfig(population_size=6, max_generations=5, fitness_target=1.0, seed=7)
        result = train_gate("H", network, 2.0, ga, nm=NMConfig(max_iterations=20),
                            streams=SeedStreams(7), show_progress=False)
        frame = result.history_frame()
        assert list(frame.columns) == ["generation", "best", "mean"]
        assert frame["best"].is_monotonic_increasing
        assert result.fitness >= frame["best"].iloc[-1] - 1e-12
        assert 0.0 <= result.fitness <= 1.0

    def test_same_seed_same_result(self):
        network = draw_network(2, 1.0, 1.0, seed=7)
        ga = GAConfig(population_size=4, max_generations=3, fitness_target=1.0, seed=7)
        runs = [train_gate("X", network, 2.0, ga, nm=NMConfig(max_iterations=10),
                           streams=SeedStreams(7), show_progress=False) for _ in range(2)]
        assert runs[0].fitness == runs[1].fitness
        assert np.array_equal(runs[0].params.coupling.J, runs[1].params.coupling.J)

    def test_j11_mask_respected(self):
        network = draw_network(3, 1.0, 0.0, seed=1)
        ga = GAConfig(population_size=4, max_generations=3, fitness_target=1.0, seed=1)
        result = train_gate("X", network, 2.0, ga, mask="j11", nm=NMConfig(max_iterations=10),
                            streams=SeedStreams(1), show_progress=False)
        J = result.params.coupling.J
        assert np.all(J[0, 1:] == 0)
        assert result.space.size == 2

    def test_negative_time_rejected(self):
        with pytest.raises(ValidationError):
            train_gate("X", draw_network(1, 1.0, 0.0, seed=0), -1.0, GAConfig(seed=0))


class TestScan:
    def test_table_covers_grid(self):
        network = draw_network(2, 1.0, 1.0, seed=3)
        result = scan_drive_and_time("X", network, [0.0, 0.5], [1.0, 2.0, 3.0], probes=2,
                                     streams=SeedStreams(3))
        assert list(result.table.columns) == ["P_re", "P_im", "tau", "fidelity"]
        assert len(result.table) == 6
        assert result.fidelity == pytest.approx(result.table["fidelity"].max())
        assert result.table["fidelity"].between(0.0, 1.0).all()

    def test_empty_grid(self):
        with pytest.raises(ValidationError):
            scan_drive_and_time("X", draw_network(1, 1.0, 0.0, seed=0), [], [1.0])


class TestDirectModel:
    def test_identity_at_zero_time(self):
        start = DirectTwoQubitSpec(E1=0.0, E2=1.0, P1=0, P2=0, J=0.0, tau=0.0)
        result = train_direct_model("identity2", start, GAConfig(population_size=4, seed=0),
                                    streams=SeedStreams(0), show_progress=False)
        assert result.fitness == pytest.approx(1.0, abs=1e-9)
        assert result.ga.generations == 0

    def test_needs_two_qubit_unitary(self):
        start = DirectTwoQubitSpec(E1=0.0, E2=1.0, P1=0, P2=0, J=0.0, tau=1.0)
        with pytest.raises(DimensionError):
            train_direct_model("H", start, GAConfig(seed=0), streams=SeedStreams(0))


class TestPersistence:
    @pytest.fixture
    def trained(self):
        network = draw_network(2, 1.0, 1.0, P=0.1j, seed=2)
        ga = GAConfig(population_size=4, max_generations=2, fitness_target=1.0, seed=2)
        return train_gate("H", network, 1.0, ga, nm=NMConfig(max_iterations=5),
                          streams=SeedStreams(2), show_progress=False)

    def test_model_round_trip(self, trained, tmp_path):
        path = save_model(TrainedModel.from_result(trained), tmp_path / "h.model.json")
        model = load_model(path)
        assert model.fitness == trained.fitness
        assert model.target.label == "H"
        assert model.params.network == trained.params.network
        assert model.params.tau == trained.params.tau
        assert np.array_equal(model.params.coupling.J, trained.params.coupling.J)
        assert model.metadata["stop_reason"] == trained.stop_reason

    def test_history_round_trip(self, trained, tmp_path):
        path = save_history(trained.history_frame(), tmp_path / "h-history.csv")
        frame = load_history(path)
        assert list(frame.columns) == ["generation", "best", "mean"]
        assert len(frame) == len(trained.history)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_model(tmp_path / "nope.json")

    def test_corrupt_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_model(path)

    def test_wrong_schema_version(self, trained, tmp_path):
        document = TrainedModel.from_result(trained).to_dict()
        document["schema_version"] = 99
        path = tmp_path / "old.json"
        path.write_text(json.dumps(document))
        with pytest.raises(ConfigError):
            load_model(path)

    def test_missing_field(self, trained, tmp_path):
        document = TrainedModel.from_result(trained).to_dict()
        del document["J"]
        path = tmp_path / "partial.json"
        path.write_text(json.dumps(document))
        with pytest.raises(ConfigError):
            load_model(path)
