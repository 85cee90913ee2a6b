"""
Robustness of a trained gate to random changes of the network parameters
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence
import numpy as np
import pandas as pd
from src.experiments.base_experiment import BaseExperiment
from src.experiments.config import ExperimentConfig
from src.experiments.reports import evaluate_protocol
from src.model.network import perturb_network
from src.model.protocol import ProtocolParams, get_protocol
from src.trainer.training import train_gate
from src.utils.errors import ValidationError

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["delta", "retrained_mean", "frozen_mean", "training_fitness"]
RETRAINED_TOLERANCE = 0.02


@dataclass
class RobustnessResult:
    table: pd.DataFrame
    baseline_mean: float
    provenance: Dict = field(default_factory=dict)

    @property
    def retrained_spread(self) -> float:
        """Largest distance of a retrained mean from the unperturbed baseline"""
        return float(np.max(np.abs(self.table["retrained_mean"] - self.baseline_mean)))

    @property
    def passed(self) -> bool:
        last = self.table.iloc[self.table["delta"].idxmax()]
        frozen_lower = last["delta"] == 0 or last["frozen_mean"] < last["retrained_mean"]
        return bool(self.retrained_spread <= RETRAINED_TOLERANCE and frozen_lower)

    def to_dict(self) -> Dict:
        return {
            "baseline_mean": self.baseline_mean,
            "retrained_spread": self.retrained_spread,
            "tolerance": RETRAINED_TOLERANCE,
            "passed": self.passed,
            "rows": self.table.to_dict(orient="records"),
            "provenance": self.provenance,
        }


class RobustnessExperiment(BaseExperiment):
    """
    Train once on the drawn network, then for each strength delta perturb E_l and
    K_ll' by delta * U[-1, 1], retrain J from scratch, and also score the baseline J
    unchanged on the perturbed network
    """

    def run(self, deltas: Optional[Sequence[float]] = None) -> RobustnessResult:
        deltas = [float(d) for d in (self.cfg.deltas if deltas is None else deltas)]
        if not deltas:
            raise ValidationError("Robustness sweep needs at least one delta")
        if any(d < 0 for d in deltas):
            raise ValidationError("Perturbation strengths must be non-negative")

        target = self.cfg.channel_target()
        train = self.training_set(target)

        logger.info("Step 1/2: Training baseline...")
        network = self.draw_network()
        baseline = self.train(target, network, train)
        baseline_mean = float(np.mean(self.evaluate(baseline)))
        base_network = baseline.params.network

        logger.info(f"Step 2/2: Sweeping {len(deltas)} perturbation strength(s)...")
        rows = []
        for delta in deltas:
            if delta == 0:
                rows.append({"delta": 0.0, "retrained_mean": baseline_mean,
                             "frozen_mean": baseline_mean, "training_fitness": baseline.fitness})
                continue
            perturbed = perturb_network(base_network, delta,
                                        self.streams.generator(f"perturbation-{delta:g}"))
            frozen = ProtocolParams(perturbed, baseline.params.coupling, baseline.params.tau,
                                    baseline.params.layout, baseline.params.sigma_convention)
            frozen_mean = float(np.mean(self._score(get_protocol(frozen), target)))

            retrained = train_gate(
                target, perturbed, baseline.params.tau, self.cfg.ga_config(self.seed),
                train=train, mask=self.cfg.mask, sigma_convention=self.cfg.sigma_convention,
                per_site_drive=self.cfg.per_site_drive, nm=self.cfg.nm_config(),
                coupling_scale=self.cfg.coupling_scale, streams=self.streams,
                show_progress=self.show_progress,
            )
            retrained_mean = float(np.mean(self._score(get_protocol(retrained.params), target)))
            logger.info(f"delta={delta:g}: retrained {retrained_mean:.5f}, frozen {frozen_mean:.5f}")
            rows.append({"delta": delta, "retrained_mean": retrained_mean,
                         "frozen_mean": frozen_mean, "training_fitness": retrained.fitness})

        table = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
        result = RobustnessResult(table, baseline_mean, self.provenance(baseline))
        if not result.passed:
            logger.warning(f"Robustness check failed: spread {result.retrained_spread:.4f}")
        return result

    def _score(self, protocol, target):
        # every delta is scored on the same test states
        return evaluate_protocol(protocol, target, self.cfg.test_size,
                                 self.streams.generator("test"), show_progress=self.show_progress)


def run_robustness_sweep(cfg: ExperimentConfig, deltas: Optional[Sequence[float]] = None,
                         **kwargs) -> RobustnessResult:
    return RobustnessExperiment(cfg, **kwargs).run(deltas)


__all__ = ["RobustnessExperiment", "RobustnessResult", "run_robustness_sweep", "SWEEP_COLUMNS"]
