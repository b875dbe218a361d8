"""Binary genetic search engine.

Minimizes a fitness function over fixed-length bit strings with tournament
selection, single-point crossover, per-bit flip mutation and elitism.

Reproducibility contract: one seeded generator drives every stochastic
choice, consumed in a fixed order regardless of how evaluation is
scheduled: the initial population is drawn as a single block, then per
offspring pair (in slot order) the draws are parent A tournament, parent B
tournament, crossover coin, cut point (only when the coin passes), child 1
mutation mask, child 2 mutation mask.  Fitness evaluation is batched and
pure, so identical configs give bit-identical runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .encoding import ChromosomeLayout, decode_components
from .signal_model import SinusoidalComponent, TimeSeries


@dataclass(frozen=True)
class GAConfig:
    """Evolution hyperparameters.

    mutation_prob_per_bit=None resolves to 1/chromosome_length at run time.
    Termination is the first of: best fitness at or below target_fitness,
    max_generations evaluated (the initial random population counts as
    generation 1), or stall_generations consecutive generations without
    improvement of the running best.
    """

    population_size: int = 100
    max_generations: int = 2000
    crossover_prob: float = 0.9
    mutation_prob_per_bit: float | None = None
    tournament_size: int = 3
    elite_count: int = 2
    target_fitness: float = 1e-9
    stall_generations: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError(f"population_size must be >= 2, got {self.population_size}")
        if self.max_generations < 1:
            raise ValueError(f"max_generations must be >= 1, got {self.max_generations}")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError(f"crossover_prob must be in [0, 1], got {self.crossover_prob}")
        if self.mutation_prob_per_bit is not None and not 0.0 <= self.mutation_prob_per_bit <= 1.0:
            raise ValueError(
                f"mutation_prob_per_bit must be in [0, 1], got {self.mutation_prob_per_bit}"
            )
        if self.tournament_size < 1:
            raise ValueError(f"tournament_size must be >= 1, got {self.tournament_size}")
        if not 0 <= self.elite_count < self.population_size:
            raise ValueError(
                f"elite_count must be in [0, population_size), got {self.elite_count}"
            )
        if self.target_fitness < 0:
            raise ValueError(f"target_fitness must be >= 0, got {self.target_fitness}")
        if self.stall_generations < 1:
            raise ValueError(f"stall_generations must be >= 1, got {self.stall_generations}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")


@dataclass(frozen=True)
class Individual:
    """A chromosome with its cached fitness; immutable after evaluation."""

    bits: np.ndarray = field(repr=False)
    fitness: float

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)


@dataclass(frozen=True)
class TraceEntry:
    generation: int
    best_fitness: float
    components: tuple[SinusoidalComponent, ...]


@dataclass(frozen=True)
class ConvergenceTrace:
    """Per-generation record of the best solution found so far.

    Tracks the running best, so best_fitness is non-increasing even with
    elitism disabled; with elite_count >= 1 it coincides with the current
    population's best.
    """

    entries: tuple[TraceEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def best_fitnesses(self) -> np.ndarray:
        return np.array([e.best_fitness for e in self.entries])


def init_population(n_bits: int, config: GAConfig, rng, evaluate) -> list[Individual]:
    """Uniform random population, fitness evaluated in one batch."""
    matrix = rng.integers(0, 2, size=(config.population_size, n_bits), dtype=np.uint8)
    fits = evaluate(matrix)
    return [Individual(matrix[i].copy(), float(fits[i])) for i in range(config.population_size)]


def tournament_select(population: list[Individual], config: GAConfig, rng) -> Individual:
    """Best of tournament_size uniform draws (with replacement).

    Ties go to the earliest population index.
    """
    picks = rng.integers(0, len(population), size=config.tournament_size)
    best = min(picks.tolist(), key=lambda i: (population[i].fitness, i))
    return population[best]


def crossover(a: np.ndarray, b: np.ndarray, config: GAConfig, rng) -> tuple[np.ndarray, np.ndarray]:
    """Single-point suffix swap with probability crossover_prob, else copies.

    Chromosomes of fewer than 2 bits have no interior cut and are always
    copied.  At every locus the children jointly preserve the parent bits.
    """
    if len(a) != len(b):
        raise ValueError(f"parent lengths differ: {len(a)} vs {len(b)}")
    crossing = rng.random() < config.crossover_prob
    if not crossing or len(a) < 2:
        return a.copy(), b.copy()
    cut = int(rng.integers(1, len(a)))
    child1 = np.concatenate([a[:cut], b[cut:]])
    child2 = np.concatenate([b[:cut], a[cut:]])
    return child1, child2


def mutate(bits: np.ndarray, config: GAConfig, rng) -> np.ndarray:
    """Flip each bit independently with probability mutation_prob_per_bit."""
    p = config.mutation_prob_per_bit
    if p is None:
        p = 1.0 / len(bits)
    mask = rng.random(len(bits)) < p
    return np.bitwise_xor(bits, mask.astype(np.uint8))


def _best_index(population: list[Individual]) -> int:
    return min(range(len(population)), key=lambda i: (population[i].fitness, i))


def step(population: list[Individual], config: GAConfig, rng, evaluate) -> list[Individual]:
    """One generation: copy the elites, refill with mutated crossover offspring."""
    n = len(population)
    order = sorted(range(n), key=lambda i: (population[i].fitness, i))
    elites = [population[i] for i in order[: config.elite_count]]

    needed = n - config.elite_count
    child_bits: list[np.ndarray] = []
    while len(child_bits) < needed:
        parent_a = tournament_select(population, config, rng)
        parent_b = tournament_select(population, config, rng)
        c1, c2 = crossover(parent_a.bits, parent_b.bits, config, rng)
        child_bits.append(mutate(c1, config, rng))
        child_bits.append(mutate(c2, config, rng))
    child_bits = child_bits[:needed]

    fits = evaluate(np.stack(child_bits))
    children = [Individual(bits, float(f)) for bits, f in zip(child_bits, fits)]
    return elites + children


def evolve(
    n_bits: int,
    config: GAConfig,
    evaluate,
    describe=None,
) -> tuple[Individual, ConvergenceTrace]:
    """Full evolution loop over bit strings of length n_bits.

    `evaluate` maps a (P, n_bits) uint8 matrix to a float64 fitness vector;
    `describe` (optional) decodes a chromosome into sinusoid components for
    the trace.  Returns the all-time best individual and the trace, one
    entry per evaluated generation.
    """
    if n_bits < 1:
        raise ValueError(f"n_bits must be >= 1, got {n_bits}")
    rng = np.random.default_rng(config.seed)
    population = init_population(n_bits, config, rng, evaluate)

    best = population[_best_index(population)]
    best_components = describe(best.bits) if describe else ()
    entries = [TraceEntry(1, best.fitness, best_components)]

    generation = 1
    stall = 0
    while (
        best.fitness > config.target_fitness
        and generation < config.max_generations
        and stall < config.stall_generations
    ):
        population = step(population, config, rng, evaluate)
        generation += 1
        candidate = population[_best_index(population)]
        if candidate.fitness < best.fitness:
            best = candidate
            best_components = describe(best.bits) if describe else ()
            stall = 0
        else:
            stall += 1
        entries.append(TraceEntry(generation, best.fitness, best_components))

    return best, ConvergenceTrace(tuple(entries))


def make_evaluator(
    data: TimeSeries,
    layout: ChromosomeLayout,
    windows: list[tuple[int, int]] | None = None,
    metric: str = "l1",
):
    """Batch fitness function for chromosomes of `layout` against `data`."""
    plan = kernels.make_plan(layout, len(data), windows)
    values = data.values
    dt = data.dt

    def evaluate(bits_matrix: np.ndarray) -> np.ndarray:
        return kernels.evaluate_population(bits_matrix, plan, values, dt, metric)

    return evaluate


def run(
    data: TimeSeries,
    layout: ChromosomeLayout,
    config: GAConfig,
    windows: list[tuple[int, int]] | None = None,
    metric: str = "l1",
) -> tuple[Individual, ConvergenceTrace]:
    """Evolve sinusoid chromosomes against a time series.

    Layouts without window fields take the fixed per-component `windows`.
    """
    evaluate = make_evaluator(data, layout, windows, metric)

    def describe(bits: np.ndarray) -> tuple[SinusoidalComponent, ...]:
        return decode_components(bits, layout, windows)

    return evolve(layout.total_bits, config, evaluate, describe)
