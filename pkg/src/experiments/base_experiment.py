"""
Base experiment: network draw, training and evaluation shared by every named run
"""
import logging
from typing import Dict, Optional
import numpy as np
from src.experiments.config import ExperimentConfig
from src.experiments.reports import FidelityReport, evaluate_protocol
from src.gates.channels import ChannelTarget
from src.model.network import NetworkSpec
from src.model.protocol import get_protocol
from src.trainer.fitness import TrainingSet
from src.trainer.training import TrainingResult, scan_drive_and_time, train_gate
from src.utils.rng import SeedStreams, resolve_seed

logger = logging.getLogger(__name__)


class BaseExperiment:
    """Base class for all experiments"""

    def __init__(self,
                 cfg: ExperimentConfig,
                 streams: Optional[SeedStreams] = None,
                 show_progress: Optional[bool] = None):
        """
        Initialize base experiment

        Args:
            cfg: Experiment configuration
            streams: Seed streams (derived from cfg.seed, or entropy, when omitted)
            show_progress: tqdm bars for training and evaluation
        """
        self.cfg = cfg
        self.streams = streams or SeedStreams(resolve_seed(cfg.seed))
        self.show_progress = show_progress

    @property
    def seed(self) -> int:
        return self.streams.seed

    def draw_network(self) -> NetworkSpec:
        network = self.cfg.draw_network(self.streams)
        logger.info(f"Drew {network.n_sites}-site network (E0={network.E0:g}, K0={network.K0:g}, "
                    f"P={network.drive:g})")
        return network

    def training_set(self, target: ChannelTarget) -> TrainingSet:
        return TrainingSet.sample(target, self.cfg.train_size, self.streams.generator("training"))

    def regime(self, target: ChannelTarget, network: NetworkSpec, train: TrainingSet):
        """(network, tau) to start training from; runs the (P, tau) scan when configured"""
        if not self.cfg.scan:
            return network, self.cfg.tau
        scan = scan_drive_and_time(
            target, network, self.cfg.scan["drives"], self.cfg.scan["taus"], train,
            probes=int(self.cfg.scan.get("probes", 8)), mask=self.cfg.mask,
            sigma_convention=self.cfg.sigma_convention, coupling_scale=self.cfg.coupling_scale,
            streams=self.streams,
        )
        return network.with_drive(scan.drive), scan.tau

    def train(self, target: ChannelTarget, network: NetworkSpec,
              train: Optional[TrainingSet] = None) -> TrainingResult:
        """
        Train the target, keeping the best of cfg.attempts independently seeded runs

        Args:
            target: Target operation
            network: Drawn network
            train: Training set (sampled from the "training" stream when omitted)

        Returns:
            Best TrainingResult
        """
        train = train or self.training_set(target)
        network, tau = self.regime(target, network, train)
        best = None
        for attempt in range(self.cfg.attempts):
            streams = self.streams if attempt == 0 else SeedStreams(
                self.streams.child_seed(f"attempt-{attempt}"))
            ga = self.cfg.ga_config(streams.seed)
            result = train_gate(
                target, network, tau, ga, train=train, mask=self.cfg.mask,
                sigma_convention=self.cfg.sigma_convention,
                per_site_drive=self.cfg.per_site_drive, nm=self.cfg.nm_config(),
                coupling_scale=self.cfg.coupling_scale, streams=streams,
                show_progress=self.show_progress,
            )
            logger.info(f"Attempt {attempt + 1}/{self.cfg.attempts}: training fidelity "
                        f"{result.fitness:.6f}")
            if best is None or result.fitness > best.fitness:
                best = result
        return best

    def evaluate(self, result: TrainingResult, label: str = "test") -> np.ndarray:
        """Fidelities of the trained protocol on cfg.test_size fresh Haar states"""
        protocol = get_protocol(result.params)
        return evaluate_protocol(protocol, result.target, self.cfg.test_size,
                                 self.streams.generator(label),
                                 desc=f"Evaluating {result.target.label}",
                                 show_progress=self.show_progress)

    def provenance(self, result: Optional[TrainingResult] = None, **extra) -> Dict:
        data = {
            "config": self.cfg.to_dict(),
            "seeds": self.streams.provenance(),
        }
        if result is not None:
            data["training"] = result.summary()
            data["measure"] = result.target.measure
            data["trained"] = {
                "J": result.params.coupling.to_dict(),
                "tau": result.params.tau,
                "network": result.params.network.to_dict(),
                "sigma_convention": result.params.sigma_convention,
            }
        data.update(extra)
        return data

    def report(self, values: np.ndarray, result: Optional[TrainingResult] = None,
               name: Optional[str] = None, **extra) -> FidelityReport:
        report = FidelityReport(
            experiment=name or self.cfg.experiment,
            values=values,
            n_bins=self.cfg.histogram_bins,
            provenance=self.provenance(result),
            threshold=self.cfg.acceptance_threshold(),
            extra=extra,
        )
        if report.passed is False:
            logger.warning(f"{report.experiment}: mean fidelity {report.mean:.6f} below "
                           f"threshold {report.threshold}")
        return report

    def run(self, **kwargs):
        """
        Run the experiment - to be implemented by subclasses

        Returns:
            Experiment results
        """
        raise NotImplementedError("Subclasses must implement run method")


__all__ = ["BaseExperiment"]
