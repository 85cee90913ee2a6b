"""
Experiment configuration documents: presets, JSON files and key=value overrides
"""
import copy
import json
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union
from config.presets import EXPERIMENT_KINDS, EXPERIMENT_PRESETS, KIND_PURITY, KIND_SUPP_TABLE
from config.settings import (
    CONFIG_SCHEMA_VERSION, DEFAULT_THRESHOLDS, HISTOGRAM_BINS, SIGMA_CONVENTIONS, SIGMA_DOUBLED,
    SUPP_TABLE_STATES, TEST_SET_SIZE, TRAINING_SET_SIZE,
)
from src.gates.channels import ChannelTarget, parse_target
from src.model.network import ENERGY_MODES, ENERGY_UNIFORM, NetworkSpec, chain_adjacency, draw_network
from src.trainer.fitness import coupling_mask, parse_trainable
from src.trainer.genetic import GAConfig
from src.trainer.simplex import NMConfig
from src.utils.errors import ConfigError
from src.utils.rng import SeedStreams

logger = logging.getLogger(__name__)

ADJACENCY_CHAIN = "chain"


def parse_complex(value) -> complex:
    """Number, numeric string, or {"re": .., "im": ..} record"""
    if isinstance(value, dict):
        try:
            return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Bad complex record {value}") from e
    try:
        return complex(str(value).replace(" ", "")) if isinstance(value, str) else complex(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Bad complex value {value!r}") from e


def complex_record(value: complex) -> Union[float, Dict]:
    value = complex(value)
    return value.real if value.imag == 0 else {"re": value.real, "im": value.imag}


@dataclass
class ExperimentConfig:
    """
    One named run: physics parameters, optimizer settings, evaluation sizes, seed

    Energies are dimensionless, in units of the reference scale
    (K0 for multi-site networks, E0 for one site).
    """
    experiment: str
    kind: str
    schema_version: int = CONFIG_SCHEMA_VERSION
    target: Any = None
    n_sites: int = 1
    E0: float = 1.0
    K0: float = 1.0
    energy_mode: str = ENERGY_UNIFORM
    P: complex = 0j
    tau: float = 1.0
    adjacency: Any = ADJACENCY_CHAIN
    mask: Any = "full"
    trainable: List[str] = field(default_factory=lambda: ["J"])
    per_site_drive: bool = False
    sigma_convention: str = SIGMA_DOUBLED
    ga: Dict = field(default_factory=dict)
    nm: Dict = field(default_factory=dict)
    train_size: int = TRAINING_SET_SIZE
    test_size: int = TEST_SET_SIZE
    histogram_bins: int = HISTOGRAM_BINS
    threshold: Optional[float] = None
    threshold_key: Optional[str] = None
    attempts: int = 1
    seed: Optional[int] = None
    network_seed: Optional[int] = None
    scan: Optional[Dict] = None
    coupling_scale: Optional[float] = None
    coupling: complex = 1.0 + 0j
    time_max: float = 20.0
    time_points: int = 2001
    marked: List[int] = field(default_factory=lambda: [0, 1, 2, 3])
    deltas: List[float] = field(default_factory=list)
    supp_states: int = SUPP_TABLE_STATES

    def __post_init__(self):
        self.P = parse_complex(self.P)
        self.coupling = parse_complex(self.coupling)
        self.trainable = list(parse_trainable(self.trainable))
        self.validate()

    def validate(self):
        """
        Raises:
            ConfigError: If any field is out of range or names something unknown
        """
        if self.schema_version != CONFIG_SCHEMA_VERSION:
            raise ConfigError(
                f"Unsupported schema_version {self.schema_version}, expected {CONFIG_SCHEMA_VERSION}"
            )
        if self.kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"Unknown experiment kind '{self.kind}', expected one of {EXPERIMENT_KINDS}")
        if self.test_size < 1 or self.train_size < 1:
            raise ConfigError("test_size and train_size must be at least 1")
        if self.attempts < 1:
            raise ConfigError(f"attempts must be at least 1, got {self.attempts}")
        if self.n_sites < 1:
            raise ConfigError(f"n_sites must be at least 1, got {self.n_sites}")
        if self.E0 < 0 or self.K0 < 0:
            raise ConfigError("E0 and K0 must be non-negative")
        if self.tau < 0:
            raise ConfigError(f"tau must be non-negative, got {self.tau}")
        if self.energy_mode not in ENERGY_MODES:
            raise ConfigError(f"Unknown energy_mode '{self.energy_mode}', expected one of {ENERGY_MODES}")
        if self.coupling_scale is not None and not self.coupling_scale > 0:
            raise ConfigError(f"coupling_scale must be positive, got {self.coupling_scale}")
        if self.sigma_convention not in SIGMA_CONVENTIONS:
            raise ConfigError(f"Unknown sigma convention '{self.sigma_convention}'")
        if self.threshold_key is not None and self.threshold_key not in DEFAULT_THRESHOLDS:
            raise ConfigError(f"Unknown threshold key '{self.threshold_key}'")
        if self.histogram_bins < 1:
            raise ConfigError("histogram_bins must be at least 1")
        if self.time_points < 1 or self.time_max < 0:
            raise ConfigError("time_points must be positive and time_max non-negative")
        if self.supp_states < 1:
            raise ConfigError("supp_states must be at least 1")

        # seed and trainable come from the top level
        allowed = {f.name for f in fields(GAConfig)} - {"seed", "trainable"}
        unknown = set(self.ga) - allowed
        if unknown:
            raise ConfigError(f"Unknown or reserved ga keys {sorted(unknown)}")
        unknown = set(self.nm) - {f.name for f in fields(NMConfig)}
        if unknown:
            raise ConfigError(f"Unknown nm keys {sorted(unknown)}")
        if self.scan is not None:
            unknown = set(self.scan) - {"drives", "taus", "probes"}
            if unknown or not self.scan.get("drives") or not self.scan.get("taus"):
                raise ConfigError("scan needs non-empty 'drives' and 'taus' (and optional 'probes')")

        if self.kind not in (KIND_PURITY, KIND_SUPP_TABLE):
            if self.target is None:
                raise ConfigError(f"Experiment '{self.experiment}' needs a target")
            target = self.channel_target()
            coupling_mask(self.mask, target.n_qubits, self.n_sites)

    # --- construction -------------------------------------------------

    @classmethod
    def from_dict(cls, data: Dict) -> "ExperimentConfig":
        """Strict constructor: unknown keys raise ConfigError"""
        if not isinstance(data, dict):
            raise ConfigError("Experiment config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"Unknown config keys {unknown}")
        missing = [name for name in ("experiment", "kind") if name not in data]
        if missing:
            raise ConfigError(f"Config missing required keys {missing}")
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigError(f"Malformed config: {e}") from e

    @classmethod
    def from_preset(cls, name: str, overrides: Optional[Dict] = None) -> "ExperimentConfig":
        if name not in EXPERIMENT_PRESETS:
            raise ConfigError(f"Unknown experiment '{name}', expected one of {sorted(EXPERIMENT_PRESETS)}")
        data = {"experiment": name, **copy.deepcopy(EXPERIMENT_PRESETS[name])}
        data.update(overrides or {})
        return cls.from_dict(data)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ExperimentConfig":
        return cls.from_dict(read_config_document(path))

    @classmethod
    def resolve(cls, name: Optional[str] = None,
                path: Optional[Union[str, Path]] = None,
                overrides: Sequence[str] = ()) -> "ExperimentConfig":
        """
        Preset, then config file, then key=value overrides, each layer on top of the last

        Args:
            name: Preset name (optional when the file names its own experiment)
            path: JSON config document
            overrides: "key=value" strings; values parse as JSON when possible

        Returns:
            Validated ExperimentConfig
        """
        data: Dict = {}
        if name is not None:
            if name not in EXPERIMENT_PRESETS:
                raise ConfigError(
                    f"Unknown experiment '{name}', expected one of {sorted(EXPERIMENT_PRESETS)}"
                )
            data = {"experiment": name, **copy.deepcopy(EXPERIMENT_PRESETS[name])}
        if path is not None:
            document = read_config_document(path)
            preset = document.get("preset")
            if preset is not None and name is None:
                return cls.resolve(preset, path, overrides)
            document.pop("preset", None)
            data = merge_config(data, document)
        for item in overrides:
            data = merge_config(data, parse_override(item))
        return cls.from_dict(data)

    # --- derived objects ----------------------------------------------

    def channel_target(self) -> ChannelTarget:
        return parse_target(self.target)

    def adjacency_edges(self):
        if self.adjacency == ADJACENCY_CHAIN:
            return chain_adjacency(self.n_sites)
        if isinstance(self.adjacency, (list, tuple)):
            return tuple(tuple(edge) for edge in self.adjacency)
        raise ConfigError(f"adjacency must be '{ADJACENCY_CHAIN}' or an edge list")

    def draw_network(self, streams: SeedStreams) -> NetworkSpec:
        seed = self.network_seed if self.network_seed is not None else streams.child_seed("network")
        return draw_network(self.n_sites, self.E0, self.K0, self.adjacency_edges(), self.P, seed,
                            self.energy_mode)

    def ga_config(self, seed: Optional[int] = None) -> GAConfig:
        return GAConfig(**self.ga, seed=seed, trainable=tuple(self.trainable))

    def nm_config(self) -> NMConfig:
        return NMConfig(**self.nm)

    def acceptance_threshold(self) -> Optional[float]:
        if self.threshold is not None:
            return float(self.threshold)
        if self.threshold_key is not None:
            return DEFAULT_THRESHOLDS[self.threshold_key]
        return None

    def to_dict(self) -> Dict:
        data = {f.name: copy.deepcopy(getattr(self, f.name)) for f in fields(self)}
        data["P"] = complex_record(self.P)
        data["coupling"] = complex_record(self.coupling)
        return data


def read_config_document(path: Union[str, Path]) -> Dict:
    """
    Raises:
        ConfigError: If the file is missing or not a JSON object
    """
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            document = json.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"Config file not found: {path}") from e
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Could not read config {path}: {e}") from e
    if not isinstance(document, dict):
        raise ConfigError(f"Config {path} must hold a JSON object")
    return document


def merge_config(base: Dict, update: Dict) -> Dict:
    """Shallow merge, except that the ga and nm sections merge key by key"""
    merged = copy.deepcopy(base)
    for key, value in update.items():
        if key in ("ga", "nm") and isinstance(value, dict):
            merged[key] = {**merged.get(key, {}), **value}
        else:
            merged[key] = value
    return merged


def parse_override(item: str) -> Dict:
    """
    "key=value" or "section.key=value" into a config fragment

    Raises:
        ConfigError: If the item has no '='
    """
    if "=" not in item:
        raise ConfigError(f"Override '{item}' is not of the form key=value")
    key, raw = item.split("=", 1)
    key = key.strip()
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    if "." in key:
        section, sub = key.split(".", 1)
        return {section: {sub: value}}
    return {key: value}


__all__ = [
    "ExperimentConfig", "parse_complex", "complex_record", "read_config_document",
    "merge_config", "parse_override", "ADJACENCY_CHAIN",
]
