"""
Gate-fidelity experiments: two-qubit gates on a 6-site network, single-qubit gates
on one site, and single-qubit gates on 6 sites with only J11 free
"""
import logging
import numpy as np
from src.experiments.base_experiment import BaseExperiment
from src.experiments.config import ExperimentConfig
from src.experiments.reports import FidelityReport
from src.trainer.fitness import coupling_mask
from src.utils.errors import ValidationError

logger = logging.getLogger(__name__)


class GateExperiment(BaseExperiment):
    """Draw a network, train the target gate, retest on fresh Haar states"""

    result = None

    def run(self) -> FidelityReport:
        """
        Returns:
            FidelityReport over cfg.test_size states; below-threshold runs are flagged,
            not raised
        """
        target = self.cfg.channel_target()
        logger.info(f"Starting {self.cfg.experiment}: {target.label} on {self.cfg.n_sites} site(s)")
        try:
            logger.info("Step 1/3: Drawing network...")
            network = self.draw_network()

            logger.info("Step 2/3: Training couplings...")
            result = self.train(target, network)

            logger.info(f"Step 3/3: Evaluating on {self.cfg.test_size} fresh states...")
            values = self.evaluate(result)
        except Exception as e:
            logger.error(f"Experiment {self.cfg.experiment} failed: {e}")
            raise

        report = self.report(values, result, training_fitness=result.fitness)
        self.result = result
        return report


class SixSiteSingleQubitExperiment(GateExperiment):
    """Single-qubit gate on a 6-site network where only J11 may be non-zero"""

    def run(self) -> FidelityReport:
        if self.cfg.n_sites != 6:
            raise ValidationError(f"Expected a 6-site network, got {self.cfg.n_sites}")
        report = super().run()
        J = self.result.params.coupling.J
        free = coupling_mask(self.cfg.mask, J.shape[0], J.shape[1])
        report.extra["mask_respected"] = bool(np.all(J[~free] == 0))
        return report


def run_gate_experiment(cfg: ExperimentConfig, **kwargs) -> FidelityReport:
    return GateExperiment(cfg, **kwargs).run()


def run_single_qubit_6site(cfg: ExperimentConfig, **kwargs) -> FidelityReport:
    return SixSiteSingleQubitExperiment(cfg, **kwargs).run()


__all__ = [
    "GateExperiment", "SixSiteSingleQubitExperiment", "run_gate_experiment",
    "run_single_qubit_6site",
]
