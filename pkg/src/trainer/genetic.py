"""
Genetic search with the cross-breeding rule and elitism
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence, Tuple
import numpy as np
from tqdm import tqdm
from config.settings import (
    GA_FITNESS_TARGET, GA_MAX_GENERATIONS, GA_MUTATION_RATE, GA_POPULATION_SIZE,
    GA_STAGNATION_HALVING, GA_STAGNATION_SWITCH, GA_WORKERS, SHOW_PROGRESS,
)
from src.trainer.fitness import TRAIN_J, parse_trainable
from src.utils.errors import ValidationError

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], float]

STOP_TARGET = "target"
STOP_CAP = "generation-cap"
STOP_STAGNATION = "stagnation"


@dataclass(frozen=True)
class GAConfig:
    """Genetic algorithm settings; mutation_rate is relative to the parameter scales"""
    population_size: int = GA_POPULATION_SIZE
    mutation_rate: float = GA_MUTATION_RATE
    max_generations: int = GA_MAX_GENERATIONS
    fitness_target: float = GA_FITNESS_TARGET
    seed: Optional[int] = None
    trainable: Tuple[str, ...] = (TRAIN_J,)
    stagnation_halving: int = GA_STAGNATION_HALVING
    stagnation_switch: int = GA_STAGNATION_SWITCH
    workers: int = GA_WORKERS

    def __post_init__(self):
        if self.population_size < 2:
            raise ValidationError(f"Population size must be at least 2, got {self.population_size}")
        if self.mutation_rate < 0:
            raise ValidationError(f"Mutation rate must be non-negative, got {self.mutation_rate}")
        if self.max_generations < 0:
            raise ValidationError(f"Generation cap must be non-negative, got {self.max_generations}")
        object.__setattr__(self, "trainable", parse_trainable(self.trainable))

    def to_dict(self) -> dict:
        return {
            "population_size": self.population_size,
            "mutation_rate": self.mutation_rate,
            "max_generations": self.max_generations,
            "fitness_target": self.fitness_target,
            "seed": self.seed,
            "trainable": list(self.trainable),
            "stagnation_halving": self.stagnation_halving,
            "stagnation_switch": self.stagnation_switch,
            "workers": self.workers,
        }


@dataclass(frozen=True, eq=False)
class Individual:
    """Real parameter vector and its cached fitness"""
    params: np.ndarray
    fitness: Optional[float] = None

    def __post_init__(self):
        params = np.array(self.params, dtype=float)
        if not np.all(np.isfinite(params)):
            raise ValidationError("Individual has non-finite parameters")
        params.flags.writeable = False
        object.__setattr__(self, "params", params)

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None


@dataclass
class GAResult:
    best: Individual
    history: List[Tuple[int, float, float]] = field(default_factory=list)
    generations: int = 0
    stop_reason: str = STOP_CAP
    final_mutation: float = 0.0


def evaluate_population(population: Sequence[Individual], objective: Objective,
                        workers: int = 1) -> List[Individual]:
    """
    Fill in missing fitness values; results come back in population order

    Args:
        population: Individuals, some possibly already evaluated
        objective: Fitness function of the parameter vector
        workers: Thread count (1 evaluates serially)

    Returns:
        Evaluated population
    """
    pending = [i for i, ind in enumerate(population) if not ind.evaluated]
    if not pending:
        return list(population)

    if workers > 1 and len(pending) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda i: objective(population[i].params), pending))
    else:
        values = [objective(population[i].params) for i in pending]

    evaluated = list(population)
    for i, value in zip(pending, values):
        evaluated[i] = replace(population[i], fitness=float(value))
    return evaluated


def ranked(population: Sequence[Individual]) -> List[Individual]:
    """Best first; ties keep population order so runs stay reproducible"""
    order = sorted(range(len(population)), key=lambda i: -population[i].fitness)
    return [population[i] for i in order]


def initial_population(x0: np.ndarray, scales: np.ndarray, size: int,
                       rng: np.random.Generator) -> List[Individual]:
    """x0 itself plus size - 1 Gaussian draws around it with per-entry scales"""
    x0 = np.asarray(x0, dtype=float)
    draws = x0 + np.asarray(scales) * rng.standard_normal((size - 1, x0.size))
    return [Individual(x0)] + [Individual(row) for row in draws]


def ga_step(population: Sequence[Individual],
            ga: GAConfig,
            objective: Objective,
            rng: Optional[np.random.Generator] = None,
            scales: Optional[np.ndarray] = None,
            mutation: Optional[float] = None) -> List[Individual]:
    """
    One generation: evaluate, pick the two fittest parents, breed

    Children are (p + q) / 2 + delta * scale * N(0, 1). The next generation is the
    best individual evaluated so far followed by population_size - 1 children.

    Args:
        population: Current generation
        ga: GA settings
        objective: Fitness function
        rng: Breeding generator (seeded from ga.seed when omitted)
        scales: Per-entry parameter scales (ones when omitted)
        mutation: Current mutation rate (ga.mutation_rate when omitted)

    Returns:
        Next generation; the elite keeps its cached fitness
    """
    if len(population) != ga.population_size:
        raise ValidationError(
            f"Population has {len(population)} individuals, expected {ga.population_size}"
        )
    rng = rng if rng is not None else np.random.default_rng(ga.seed)
    delta = ga.mutation_rate if mutation is None else mutation

    population = evaluate_population(population, objective, ga.workers)
    best = ranked(population)
    p, q = best[0], best[1]
    midpoint = (p.params + q.params) / 2
    scales = np.ones_like(midpoint) if scales is None else np.asarray(scales, dtype=float)

    noise = rng.standard_normal((ga.population_size - 1, midpoint.size))
    children = [Individual(midpoint + delta * scales * row) for row in noise]
    return [p] + children


def run_genetic(objective: Objective,
                x0: np.ndarray,
                ga: GAConfig,
                scales: Optional[np.ndarray] = None,
                rng: Optional[np.random.Generator] = None,
                show_progress: Optional[bool] = None) -> GAResult:
    """
    Evolve until the fitness target, the generation cap, or prolonged stagnation

    The mutation rate halves after every `stagnation_halving` generations without
    improvement of the best fitness.

    Args:
        objective: Fitness function to maximize
        x0: Starting parameter vector (kept verbatim in the first generation)
        ga: GA settings
        scales: Per-entry scales for the initial spread and mutation
        rng: Generator (seeded from ga.seed when omitted)
        show_progress: tqdm bar over generations

    Returns:
        GAResult with the best individual and the (generation, best, mean) history
    """
    x0 = np.asarray(x0, dtype=float)
    scales = np.ones_like(x0) if scales is None else np.asarray(scales, dtype=float)
    rng = rng if rng is not None else np.random.default_rng(ga.seed)
    show_progress = SHOW_PROGRESS if show_progress is None else show_progress

    population = evaluate_population(
        initial_population(x0, scales, ga.population_size, rng), objective, ga.workers
    )
    best = ranked(population)[0]
    history = [(0, best.fitness, float(np.mean([ind.fitness for ind in population])))]
    mutation = ga.mutation_rate
    stagnant = 0
    generation = 0
    stop_reason = STOP_CAP

    bar = tqdm(total=ga.max_generations, desc="GA", disable=not show_progress, leave=False)
    try:
        while True:
            if best.fitness >= ga.fitness_target:
                stop_reason = STOP_TARGET
                break
            if generation >= ga.max_generations:
                stop_reason = STOP_CAP
                break
            if stagnant >= ga.stagnation_switch:
                stop_reason = STOP_STAGNATION
                break

            population = ga_step(population, ga, objective, rng, scales, mutation)
            population = evaluate_population(population, objective, ga.workers)
            generation += 1

            leader = ranked(population)[0]
            if leader.fitness > best.fitness:
                best = leader
                stagnant = 0
            else:
                stagnant += 1
                if ga.stagnation_halving and stagnant % ga.stagnation_halving == 0:
                    mutation /= 2
                    logger.debug(f"Generation {generation}: stagnant, mutation -> {mutation:.3g}")

            history.append((generation, best.fitness,
                            float(np.mean([ind.fitness for ind in population]))))
            bar.update(1)
            bar.set_postfix(best=f"{best.fitness:.5f}")
    finally:
        bar.close()

    logger.info(f"GA stopped after {generation} generation(s) ({stop_reason}), "
                f"best fitness {best.fitness:.6f}")
    return GAResult(best, history, generation, stop_reason, mutation)


__all__ = [
    "GAConfig", "Individual", "GAResult", "evaluate_population", "ranked",
    "initial_population", "ga_step", "run_genetic", "STOP_TARGET", "STOP_CAP",
    "STOP_STAGNATION",
]
