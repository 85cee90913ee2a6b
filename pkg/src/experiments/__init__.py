from src.experiments.config import ExperimentConfig
from src.experiments.gate_experiments import GateExperiment, SixSiteSingleQubitExperiment, run_gate_experiment
from src.experiments.grover import Grover2Experiment, Grover3Experiment, run_grover2, run_grover3
from src.experiments.open_system import (
    MarkovianExperiment, PurityTraceExperiment, run_markovian_experiment, run_purity_trace,
)
from src.experiments.orchestrator import ExperimentOrchestrator, ExperimentOutcome
from src.experiments.reports import FidelityReport, histogram
from src.experiments.robustness import RobustnessExperiment, run_robustness_sweep
from src.experiments.supp_table import verify_supp_table
