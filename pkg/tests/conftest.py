"""
Shared fixtures
"""
import numpy as np
import pytest
from src.model.protocol import clear_protocol_cache


@pytest.fixture(autouse=True)
def quiet_and_isolated(monkeypatch, tmp_path):
    """No progress bars, outputs under tmp_path, a fresh protocol cache"""
    monkeypatch.setattr("src.experiments.reports.SHOW_PROGRESS", False)
    monkeypatch.setattr("src.trainer.genetic.SHOW_PROGRESS", False)
    monkeypatch.setenv("QN_OUT_DIR", str(tmp_path / "outputs"))
    clear_protocol_cache()
    yield
    clear_protocol_cache()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_hermitian(dim, rng):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2


@pytest.fixture
def hermitian():
    return random_hermitian
