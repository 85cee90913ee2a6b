"""
Tests for the qnet command line
"""
import json
from pathlib import Path
import pytest
from src.cli.main import (
    EXIT_BELOW_THRESHOLD, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, load_train_config, main,
    parse_deltas,
)
from src.gates.library import GATE_MATRICES
from src.utils.errors import ConfigError

CONFIGS = Path(__file__).parent.parent / "configs"


@pytest.fixture
def trained_model(tmp_path):
    out = tmp_path / "train"
    code = main(["--no-progress", "train", str(CONFIGS / "identity.json"), "--seed", "1", "--out", str(out)])
    assert code == EXIT_OK
    return out / "identity-1.model.json"


def eval_document(out_dir: Path) -> dict:
    reports = [p for p in out_dir.glob("eval-*.json") if not p.name.endswith(".manifest.json")]
    assert len(reports) == 1
    return json.loads(reports[0].read_text())


class TestUsage:
    def test_help(self, capsys):
        assert main(["--help"]) == EXIT_OK
        assert "train" in capsys.readouterr().out

    def test_no_command(self):
        assert main([]) == EXIT_USAGE

    def test_missing_config(self, tmp_path):
        assert main(["train", str(tmp_path / "nope.json")]) == EXIT_USAGE

    def test_malformed_config(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"target": "H", "flux": 3}))
        assert main(["train", str(path)]) == EXIT_USAGE

    def test_unknown_experiment(self, capsys):
        assert main(["experiment", "fig99"]) == EXIT_USAGE
        assert "fig99" in capsys.readouterr().err

    def test_bad_override(self):
        assert main(["experiment", "fig3-x", "seed"]) == EXIT_USAGE

    def test_missing_model(self, tmp_path):
        assert main(["eval", str(tmp_path / "none.model.json")]) == EXIT_USAGE

    def test_deltas(self):
        assert parse_deltas("0,0.1, 0.5") == [0.0, 0.1, 0.5]
        with pytest.raises(ConfigError):
            parse_deltas("0,big")


class TestVerify:
    def test_identities_pass(self, capsys):
        assert main(["verify", "--identities"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "All checks passed" in out
        assert "FAIL" not in out

    def test_broken_gate_named(self, monkeypatch, capsys):
        monkeypatch.setitem(GATE_MATRICES, "sSWAP", GATE_MATRICES["SWAP"])
        assert main(["verify", "--identities"]) == EXIT_CHECK_FAILED
        out = capsys.readouterr().out
        assert "identity sswap" in out
        assert "FAILED: sswap" in out

    def test_table_structure(self, capsys):
        main(["verify", "--table", "--states", "10"])
        out = capsys.readouterr().out
        for gate in ("sSWAP", "cNOT", "cY", "cZ", "siSWAP", "SWAP"):
            assert f"table {gate}:" in out

    def test_table_needs_states(self):
        assert main(["verify", "--table", "--states", "0"]) == EXIT_USAGE


class TestTrainAndEval:
    def test_train_writes_model(self, trained_model, capsys):
        assert trained_model.exists()
        out_dir = trained_model.parent
        assert (out_dir / "identity-1-history.csv").exists()
        manifest = json.loads((out_dir / "identity-1.manifest.json").read_text())
        assert manifest["command"] == "train"
        assert manifest["seed"] == 1

    def test_train_config_defaults(self):
        cfg = load_train_config(str(CONFIGS / "identity.json"))
        assert cfg.kind == "gate"
        assert cfg.experiment == "identity"

    def test_eval_is_deterministic(self, trained_model, tmp_path):
        for name in ("a", "b"):
            code = main(["--no-progress", "eval", str(trained_model), "--states", "25",
                         "--seed", "3", "--out", str(tmp_path / name)])
            assert code == EXIT_OK
        first = eval_document(tmp_path / "a")
        second = eval_document(tmp_path / "b")
        assert first["fidelities"] == second["fidelities"]
        assert first["n_states"] == 25
        assert first["mean"] == pytest.approx(1.0, abs=1e-9)

    def test_eval_single_state(self, trained_model, tmp_path):
        assert main(["eval", str(trained_model), "--states", "1", "--seed", "0",
                     "--out", str(tmp_path)]) == EXIT_OK
        assert eval_document(tmp_path)["n_states"] == 1


class TestExperimentCommand:
    def test_purity_experiment(self, tmp_path, capsys):
        code = main(["--no-progress", "experiment", "fig4-purity", "time_max=5", "time_points=501",
                     "--seed", "2", "--out", str(tmp_path)])
        assert code == EXIT_OK
        assert (tmp_path / "fig4-purity-2.csv").exists()
        assert (tmp_path / "fig4-purity-2.manifest.json").exists()
        assert "fig4-purity: passed" in capsys.readouterr().out

    def test_below_threshold_exit(self, tmp_path):
        code = main(["--no-progress", "experiment", "fig3-x", "n_sites=1", "K0=0", "threshold=1.0",
                     "ga.population_size=4", "ga.max_generations=1", "nm.max_iterations=2",
                     "train_size=2", "test_size=10", "tau=0", "--seed", "5", "--out", str(tmp_path)])
        assert code == EXIT_BELOW_THRESHOLD
        assert (tmp_path / "fig3-x-5.json").exists()
