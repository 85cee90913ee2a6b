"""
Trained-model documents and fitness-history tables
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional
import pandas as pd
from config.settings import CONFIG_SCHEMA_VERSION
from src.gates.channels import ChannelTarget
from src.model.network import NetworkSpec
from src.model.protocol import CouplingMatrix, ProtocolParams
from src.qcore.states import RegisterLayout
from src.trainer.training import HISTORY_COLUMNS, TrainingResult
from src.utils.errors import ConfigError
from src.utils.files import PathLike, write_csv, write_json

logger = logging.getLogger(__name__)


@dataclass
class TrainedModel:
    """A persisted protocol: what it targets, how it was trained, and how well it did"""
    params: ProtocolParams
    target: ChannelTarget
    fitness: float
    seed: Optional[int] = None
    metadata: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            "schema_version": CONFIG_SCHEMA_VERSION,
            "target": self.target.to_dict(),
            "network": self.params.network.to_dict(),
            "layout": self.params.layout.to_dict(),
            "J": self.params.coupling.to_dict(),
            "tau": self.params.tau,
            "P": {"re": self.params.network.drive.real, "im": self.params.network.drive.imag},
            "sigma_convention": self.params.sigma_convention,
            "seed": self.seed,
            "fitness": self.fitness,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "TrainedModel":
        try:
            version = data.get("schema_version")
            if version != CONFIG_SCHEMA_VERSION:
                raise ConfigError(f"Unsupported model schema version {version}")
            network = NetworkSpec.from_dict(data["network"])
            params = ProtocolParams(
                network=network,
                coupling=CouplingMatrix.from_dict(data["J"]),
                tau=float(data["tau"]),
                layout=RegisterLayout.from_dict(data["layout"]),
                sigma_convention=data["sigma_convention"],
            )
            return cls(params, ChannelTarget.from_dict(data["target"]), float(data["fitness"]),
                       data.get("seed"), data.get("metadata", {}))
        except KeyError as e:
            raise ConfigError(f"Model document missing field {e}") from e

    @classmethod
    def from_result(cls, result: TrainingResult, metadata: Optional[Dict] = None) -> "TrainedModel":
        meta = {
            "mask": result.space.mask.astype(int).tolist(),
            "trainable": list(result.space.trainable),
            **result.summary(),
        }
        meta.update(metadata or {})
        return cls(result.params, result.target, result.fitness, result.seed, meta)


def save_model(model: TrainedModel, path: PathLike) -> Path:
    path = Path(path)
    write_json(path, model.to_dict())
    logger.info(f"Saved trained model to {path}")
    return path


def load_model(path: PathLike) -> TrainedModel:
    """
    Read a trained-model document

    Raises:
        ConfigError: If the file is missing, unreadable or malformed
    """
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Could not read model {path}: {e}")
        raise ConfigError(f"Could not read model {path}: {e}") from e
    return TrainedModel.from_dict(data)


def save_history(history, path: PathLike) -> Path:
    """Fitness history as CSV with columns generation, best, mean"""
    frame = history if isinstance(history, pd.DataFrame) else pd.DataFrame(
        list(history), columns=HISTORY_COLUMNS)
    path = Path(path)
    write_csv(path, frame)
    return path


def load_history(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path)


__all__ = ["TrainedModel", "save_model", "load_model", "save_history",
           "load_history"]
