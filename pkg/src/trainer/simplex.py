"""
Nelder-Mead refinement of a parameter vector
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Union
import numpy as np
from scipy.optimize import minimize
from config.settings import NM_FATOL, NM_MAX_ITERATIONS, NM_XATOL
from src.trainer.genetic import Individual
from src.utils.errors import ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NMConfig:
    max_iterations: int = NM_MAX_ITERATIONS
    xatol: float = NM_XATOL
    fatol: float = NM_FATOL
    initial_step: Optional[float] = None

    def to_dict(self) -> dict:
        return {"max_iterations": self.max_iterations, "xatol": self.xatol,
                "fatol": self.fatol, "initial_step": self.initial_step}


@dataclass
class NMResult:
    individual: Individual
    start_fitness: float
    iterations: int
    evaluations: int
    exhausted: bool

    @property
    def fitness(self) -> float:
        return self.individual.fitness


def _initial_simplex(x0: np.ndarray, step: Union[float, np.ndarray]) -> np.ndarray:
    step = np.broadcast_to(np.asarray(step, dtype=float), x0.shape)
    return np.vstack([x0, x0 + np.diag(step)])


def nelder_mead(start: Union[Individual, np.ndarray],
                objective: Callable[[np.ndarray], float],
                config: Optional[NMConfig] = None,
                scales: Optional[np.ndarray] = None) -> NMResult:
    """
    Maximize an objective with Nelder-Mead (by minimizing 1 - objective)

    Args:
        start: Starting individual or parameter vector
        objective: Function to maximize
        config: Iteration budget and tolerances
        scales: Per-entry initial simplex steps (overrides config.initial_step)

    Returns:
        NMResult; never worse than the start, `exhausted` set when the budget ran out
    """
    config = config or NMConfig()
    x0 = np.asarray(getattr(start, "params", start), dtype=float)
    if not np.all(np.isfinite(x0)):
        raise ValidationError("Nelder-Mead start has non-finite entries")
    start_fitness = getattr(start, "fitness", None)
    if start_fitness is None:
        start_fitness = float(objective(x0))

    if x0.size == 0:
        return NMResult(Individual(x0, start_fitness), start_fitness, 0, 0, False)

    options = {
        "maxiter": config.max_iterations,
        "maxfev": config.max_iterations * (x0.size + 1),
        "xatol": config.xatol,
        "fatol": config.fatol,
    }
    step = scales if scales is not None else config.initial_step
    if step is not None:
        options["initial_simplex"] = _initial_simplex(x0, step)

    result = minimize(lambda x: 1.0 - objective(x), x0, method="Nelder-Mead", options=options)
    exhausted = result.status in (1, 2)
    fitness = float(1.0 - result.fun)

    if fitness < start_fitness:
        logger.debug(f"Nelder-Mead ended below its start ({fitness:.3e} < {start_fitness:.3e})")
        best = Individual(x0, start_fitness)
    else:
        best = Individual(result.x, fitness)

    if exhausted:
        logger.warning(f"Nelder-Mead budget exhausted after {result.nit} iterations, "
                       f"returning best-so-far {best.fitness:.6f}")
    else:
        logger.info(f"Nelder-Mead converged in {result.nit} iterations: "
                    f"{start_fitness:.6f} -> {best.fitness:.6f}")
    return NMResult(best, start_fitness, int(result.nit), int(result.nfev), exhausted)


__all__ = ["NMConfig", "NMResult", "nelder_mead"]
