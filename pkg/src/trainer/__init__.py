from src.trainer.fitness import ParameterSpace, TrainingContext, TrainingSet, average_fidelity
from src.trainer.genetic import GAConfig, Individual, ga_step, run_genetic
from src.trainer.simplex import NMConfig, nelder_mead
from src.trainer.training import (
    TrainingResult, scan_drive_and_time, train_direct_model, train_gate,
)
