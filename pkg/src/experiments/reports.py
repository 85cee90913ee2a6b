"""
Fidelity reports: batched evaluation on fresh Haar states, histograms, and report files
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Union
import numpy as np
import pandas as pd
from tqdm import tqdm
from config.settings import EVAL_BATCH_SIZE, HISTOGRAM_BINS, SHOW_PROGRESS
from src.gates.channels import ChannelTarget
from src.model.protocol import QuantumNetworkProtocol
from src.qcore.linalg import haar_random_vectors
from src.trainer.fitness import TrainingSet, average_measure, unitary_fidelities
from src.utils.errors import ValidationError
from src.utils.files import write_csv, write_json

logger = logging.getLogger(__name__)

HISTOGRAM_FLOOR = 0.9

# worst state may sit at most this many standard deviations below the mean
SPREAD_SIGMAS = 5.0
SPREAD_SLACK = 1e-12

BatchFidelity = Callable[[np.ndarray], np.ndarray]


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray

    def to_dict(self) -> Dict:
        return {"edges": self.edges.tolist(), "counts": self.counts.astype(int).tolist()}

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "bin_left": self.edges[:-1],
            "bin_right": self.edges[1:],
            "count": self.counts.astype(int),
        })


def histogram(values, n_bins: int = HISTOGRAM_BINS) -> Histogram:
    """
    Equal-width bins over [min(0.9, smallest value), 1]

    Args:
        values: Fidelities
        n_bins: Number of bins

    Returns:
        Histogram whose counts sum to the number of values
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValidationError("Cannot histogram an empty sample")
    if n_bins < 1:
        raise ValidationError(f"Need at least one bin, got {n_bins}")
    low = min(HISTOGRAM_FLOOR, float(values.min()))
    counts, edges = np.histogram(np.clip(values, low, 1.0), bins=n_bins, range=(low, 1.0))
    return Histogram(edges, counts)


@dataclass
class FidelityReport:
    """Per-state evaluation fidelities plus where they came from"""
    experiment: str
    values: np.ndarray
    n_bins: int = HISTOGRAM_BINS
    provenance: Dict = field(default_factory=dict)
    threshold: Optional[float] = None
    extra: Dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size == 0:
            raise ValidationError("Report has no fidelity samples")
        if np.any(self.values < 0) or np.any(self.values > 1):
            raise ValidationError("Fidelities must lie in [0, 1]")
        if not self.within_spread:
            logger.warning(f"{self.experiment}: min fidelity {self.min:.6f} is more than "
                           f"{SPREAD_SIGMAS:g} sigma below the mean {self.mean:.6f} "
                           f"(sigma {self.std:.3g})")

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def min(self) -> float:
        return float(np.min(self.values))

    @property
    def std(self) -> float:
        return float(np.std(self.values))

    @property
    def within_spread(self) -> bool:
        """Worst state no more than SPREAD_SIGMAS standard deviations below the mean"""
        return self.min >= self.mean - SPREAD_SIGMAS * self.std - SPREAD_SLACK

    @property
    def histogram(self) -> Histogram:
        return histogram(self.values, self.n_bins)

    @property
    def passed(self) -> Optional[bool]:
        return None if self.threshold is None else self.mean >= self.threshold

    def summary(self) -> Dict:
        return {
            "experiment": self.experiment,
            "n_states": int(self.values.size),
            "mean": self.mean,
            "min": self.min,
            "std": self.std,
            "within_spread": self.within_spread,
            "threshold": self.threshold,
            "passed": self.passed,
        }

    def to_dict(self) -> Dict:
        return {
            **self.summary(),
            "fidelities": self.values.tolist(),
            "histogram": self.histogram.to_dict(),
            "provenance": self.provenance,
            **self.extra,
        }


def batched_fidelities(fidelity_fn: BatchFidelity,
                       n_qubits: int,
                       n_states: int,
                       rng: np.random.Generator,
                       batch_size: int = EVAL_BATCH_SIZE,
                       desc: str = "Evaluating",
                       show_progress: Optional[bool] = None) -> np.ndarray:
    """
    Fidelities on n_states fresh Haar-random inputs, drawn and scored in batches

    Args:
        fidelity_fn: Maps an (m, 2^n) batch of input rows to m fidelities
        n_qubits: Qubit count
        n_states: Number of test states
        rng: Generator of the test-state stream
        batch_size: States per batch
        desc: Progress bar label
        show_progress: tqdm bar over batches

    Returns:
        Array of n_states fidelities
    """
    if n_states < 1:
        raise ValidationError(f"Need at least one test state, got {n_states}")
    show_progress = SHOW_PROGRESS if show_progress is None else show_progress
    sizes = [batch_size] * (n_states // batch_size)
    if n_states % batch_size:
        sizes.append(n_states % batch_size)

    values: List[np.ndarray] = []
    for size in tqdm(sizes, desc=desc, disable=not show_progress, leave=False):
        inputs = haar_random_vectors(n_qubits, size, rng)
        values.append(np.asarray(fidelity_fn(inputs), dtype=float))
    return np.clip(np.concatenate(values), 0.0, 1.0)


def evaluate_protocol(protocol: QuantumNetworkProtocol, target: ChannelTarget, n_states: int,
                      rng: np.random.Generator, **kwargs) -> np.ndarray:
    """Per-state fidelities of a trained protocol against its target"""
    def score(inputs):
        return average_measure(protocol, TrainingSet.for_target(target, inputs))

    return batched_fidelities(score, target.n_qubits, n_states, rng, **kwargs)


def evaluate_unitary(u: np.ndarray, target: ChannelTarget, n_states: int,
                     rng: np.random.Generator, **kwargs) -> np.ndarray:
    """Per-state fidelities of a closed unitary against a unitary target"""
    ideal = target.gate.matrix
    return batched_fidelities(lambda inputs: unitary_fidelities(u, ideal, inputs),
                              target.n_qubits, n_states, rng, **kwargs)


def report_stem(experiment: str, seed) -> str:
    return f"{experiment}-{seed}"


def embedded_manifest(manifest: Optional[Dict]) -> Optional[Dict]:
    """Manifest as embedded in reports: everything but the wall-clock timestamp"""
    if manifest is None:
        return None
    return {k: v for k, v in manifest.items() if k != "timestamp"}


def write_report(report: FidelityReport, out_dir: Union[str, Path], stem: str,
                 manifest: Optional[Dict] = None) -> List[Path]:
    """
    Write {stem}.json (report), {stem}.csv (histogram) and {stem}.manifest.json

    Returns:
        Paths written
    """
    out_dir = Path(out_dir)
    document = report.to_dict()
    if manifest is not None:
        document["manifest"] = embedded_manifest(manifest)
    paths = [
        write_json(out_dir / f"{stem}.json", document),
        write_csv(out_dir / f"{stem}.csv", report.histogram.to_frame()),
    ]
    if manifest is not None:
        paths.append(write_json(out_dir / f"{stem}.manifest.json", manifest))
    logger.info(f"Wrote report {stem}: mean fidelity {report.mean:.6f} over {report.values.size} states")
    return paths


def write_table(frame: pd.DataFrame, out_dir: Union[str, Path], stem: str,
                document: Optional[Dict] = None, manifest: Optional[Dict] = None) -> List[Path]:
    """
    Write a result table as {stem}.csv, with an optional {stem}.json summary

    Returns:
        Paths written
    """
    out_dir = Path(out_dir)
    paths = [write_csv(out_dir / f"{stem}.csv", frame)]
    if document is not None:
        document = dict(document)
        if manifest is not None:
            document["manifest"] = embedded_manifest(manifest)
        paths.append(write_json(out_dir / f"{stem}.json", document))
    if manifest is not None:
        paths.append(write_json(out_dir / f"{stem}.manifest.json", manifest))
    return paths


__all__ = [
    "Histogram", "histogram", "FidelityReport", "batched_fidelities", "evaluate_protocol",
    "evaluate_unitary", "report_stem", "embedded_manifest", "write_report", "write_table",
]
