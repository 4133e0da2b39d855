"""Genetic algorithm over the parameter grid, maximizing final cob weight."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .genetics import TRAIT_HALF_RANGE
from .growth import (INTEGER_TRAITS, TRAIT_NAMES, GeneticTraits, GrowthConstants,
                     calibrate_E, final_cob_weight)


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 60
    generations: int = 100
    crossover_prob: float = 0.8
    mutation_prob: float = 0.05
    levels: int = 16
    elitism: int = 1
    seed: int = 0
    parameters: tuple[str, ...] = TRAIT_NAMES
    half_range: dict[str, float] = field(default_factory=lambda: dict(TRAIT_HALF_RANGE))
    reference: GeneticTraits = field(default_factory=GeneticTraits)

    def __post_init__(self):
        object.__setattr__(self, "parameters", tuple(self.parameters))
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        for name in ("crossover_prob", "mutation_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.levels < 2:
            raise ValueError("levels must be >= 2")
        if not 0 <= self.elitism < self.population_size:
            raise ValueError("elitism must lie in [0, population_size)")
        if not self.parameters or len(set(self.parameters)) != len(self.parameters):
            raise ValueError("parameters must be a non-empty list without duplicates")
        for name in self.parameters:
            if name not in TRAIT_NAMES:
                raise ValueError(f"unknown parameter {name!r}")
            if not 0.0 < self.half_range.get(name, -1.0) < 1.0:
                raise ValueError(f"half_range for {name} must lie in (0, 1)")
        # every grid point must be a valid trait vector
        for name in self.parameters:
            for v in (self.grid(name)[0], self.grid(name)[-1]):
                self.reference.replace(**{name: v})

    def bounds(self, name: str) -> tuple[float, float]:
        ref = getattr(self.reference, name)
        h = self.half_range[name]
        return ref * (1.0 - h), ref * (1.0 + h)

    def grid(self, name: str) -> np.ndarray:
        lo, hi = self.bounds(name)
        if name in INTEGER_TRAITS:
            values = np.arange(math.ceil(lo - 1e-9), math.floor(hi + 1e-9) + 1)
            if len(values) < 2:
                raise ValueError(f"range of {name} holds fewer than two integers")
            return values.astype(float)
        return lo + np.arange(self.levels) * (hi - lo) / (self.levels - 1)

    def level_counts(self) -> tuple[int, ...]:
        return tuple(len(self.grid(name)) for name in self.parameters)


@dataclass(frozen=True)
class GaIndividual:
    genes: tuple[int, ...]
    fitness: float | None = None

    def with_fitness(self, value: float) -> "GaIndividual":
        return GaIndividual(self.genes, float(value))


def decode(individual: GaIndividual, config: GaConfig) -> GeneticTraits:
    genes = individual.genes
    if len(genes) != len(config.parameters):
        raise ValueError(f"expected {len(config.parameters)} genes, got {len(genes)}")
    changes = {}
    for name, g in zip(config.parameters, genes):
        grid = config.grid(name)
        if not 0 <= g < len(grid):
            raise IndexError(f"level {g} of {name} outside [0, {len(grid)})")
        v = grid[g]
        changes[name] = int(v) if name in INTEGER_TRAITS else float(v)
    return config.reference.replace(**changes)


def encode(traits: GeneticTraits, config: GaConfig) -> GaIndividual:
    """Inverse of ``decode`` for on-grid trait values."""
    genes = []
    for name in config.parameters:
        grid = config.grid(name)
        v = getattr(traits, name)
        i = int(np.argmin(np.abs(grid - v)))
        if not math.isclose(grid[i], v, rel_tol=1e-9, abs_tol=1e-12):
            raise ValueError(f"{name}={v} is not a grid level")
        genes.append(i)
    return GaIndividual(tuple(genes))


def fitness(individual: GaIndividual, config: GaConfig, constants: GrowthConstants,
            cache: dict | None = None) -> float:
    """Final cob weight (g) of the decoded individual, memoized in ``cache``."""
    if cache is not None and individual.genes in cache:
        return cache[individual.genes]
    value = final_cob_weight(decode(individual, config), constants)
    if cache is not None:
        cache[individual.genes] = value
    return value


def roulette_select(population: Sequence[GaIndividual], rng: np.random.Generator):
    """Two independent fitness-proportional draws; uniform if all fitness is zero."""
    f = np.array([ind.fitness for ind in population], dtype=float)
    if np.any(np.isnan(f)) or np.any(f < 0):
        raise ValueError("all individuals need a nonnegative fitness")
    total = f.sum()
    p = f / total if total > 0 else None
    i, j = rng.choice(len(population), size=2, p=p)
    return population[i], population[j]


def one_point_crossover(a: GaIndividual, b: GaIndividual, p_c: float,
                        rng: np.random.Generator, cut: int | None = None):
    if len(a.genes) != len(b.genes):
        raise ValueError("parents differ in length")
    n = len(a.genes)
    if n < 2 or rng.random() >= p_c:
        return GaIndividual(a.genes), GaIndividual(b.genes)
    if cut is None:
        cut = int(rng.integers(1, n))
    return (GaIndividual(a.genes[:cut] + b.genes[cut:]),
            GaIndividual(b.genes[:cut] + a.genes[cut:]))


def mutate(individual: GaIndividual, p_m: float, rng: np.random.Generator,
           levels: Sequence[int]) -> GaIndividual:
    """Each gene, with probability ``p_m``, moves to one of its other levels."""
    genes = list(individual.genes)
    hits = rng.random(len(genes)) < p_m
    for k in np.flatnonzero(hits):
        other = int(rng.integers(levels[k] - 1))
        genes[k] = other if other < genes[k] else other + 1
    if not hits.any():
        return individual
    return GaIndividual(tuple(genes))


@dataclass
class GaResult:
    best: GaIndividual
    traits: GeneticTraits
    history: list[tuple[int, float, float]]  # generation, best so far, mean
    evaluations: int

    def history_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["generation", "best_fitness", "mean_fitness"])
        for g, best, mean in self.history:
            w.writerow([g, repr(best), repr(mean)])
        return buf.getvalue()


def evolve(config: GaConfig, constants: GrowthConstants | None = None,
           fitness_fn: Callable[[tuple[int, ...]], float] | None = None,
           initial: Sequence[Sequence[int]] | None = None) -> GaResult:
    """Generational GA: roulette selection, one-point crossover, mutation, elitism.

    ``fitness_fn`` maps a gene tuple to a nonnegative score; by default the
    decoded traits are simulated and scored by final cob weight.
    """
    rng = np.random.default_rng(config.seed)
    levels = config.level_counts()
    cache: dict[tuple[int, ...], float] = {}
    if fitness_fn is None:
        constants = constants or calibrate_E()

        def fitness_fn(genes):
            return fitness(GaIndividual(genes), config, constants)

    def evaluate(ind: GaIndividual) -> GaIndividual:
        if ind.genes not in cache:
            value = float(fitness_fn(ind.genes))
            if not value >= 0:
                raise ValueError(f"fitness must be >= 0, got {value}")
            cache[ind.genes] = value
        return ind.with_fitness(cache[ind.genes])

    if initial is None:
        pop = [GaIndividual(tuple(int(rng.integers(L)) for L in levels))
               for _ in range(config.population_size)]
    else:
        if len(initial) != config.population_size:
            raise ValueError("initial population has the wrong size")
        pop = [GaIndividual(tuple(int(g) for g in genes)) for genes in initial]
        for ind in pop:
            if len(ind.genes) != len(levels) or not all(0 <= g < L for g, L in zip(ind.genes, levels)):
                raise ValueError(f"invalid initial individual {ind.genes}")
    pop = [evaluate(ind) for ind in pop]

    best = max(pop, key=lambda ind: ind.fitness)
    history = [(0, best.fitness, float(np.mean([ind.fitness for ind in pop])))]
    for gen in range(1, config.generations + 1):
        ranked = sorted(pop, key=lambda ind: -ind.fitness)
        nxt = ranked[:config.elitism]
        while len(nxt) < config.population_size:
            a, b = roulette_select(pop, rng)
            for child in one_point_crossover(a, b, config.crossover_prob, rng):
                if len(nxt) < config.population_size:
                    nxt.append(evaluate(mutate(child, config.mutation_prob, rng, levels)))
        pop = nxt
        leader = max(pop, key=lambda ind: ind.fitness)
        if leader.fitness > best.fitness:
            best = leader
        history.append((gen, best.fitness, float(np.mean([ind.fitness for ind in pop]))))
    traits = decode(best, config) if all(n in TRAIT_NAMES for n in config.parameters) else None
    return GaResult(best, traits, history, len(cache))


def boundary_flag(index: int, n_levels: int) -> str:
    if index == 0:
        return "min"
    if index == n_levels - 1:
        return "max"
    return "interior"


@dataclass
class IdeotypeReport:
    rows: list[dict]
    reference_cob_weight: float
    optimized_cob_weight: float

    def flags(self) -> dict[str, str]:
        return {r["parameter"]: r["boundary_flag"] for r in self.rows}

    @property
    def gain(self) -> float:
        return self.optimized_cob_weight / self.reference_cob_weight

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["parameter", "reference", "range", "optimal", "boundary_flag"])
        for r in self.rows:
            w.writerow([r["parameter"], repr(r["reference"]), r["range"], repr(r["optimal"]),
                        r["boundary_flag"]])
        w.writerow(["cob_weight", repr(self.reference_cob_weight), "",
                    repr(self.optimized_cob_weight), ""])
        return buf.getvalue()


def report(best: GaIndividual, config: GaConfig,
           constants: GrowthConstants | None = None) -> IdeotypeReport:
    constants = constants or calibrate_E()
    traits = decode(best, config)
    rows = []
    for name, g, L in zip(config.parameters, best.genes, config.level_counts()):
        ref = getattr(config.reference, name)
        rows.append({
            "parameter": name,
            "reference": ref,
            "range": f"+/-{round(config.half_range[name] * 100):d}%",
            "optimal": getattr(traits, name),
            "boundary_flag": boundary_flag(g, L),
        })
    ref_w = final_cob_weight(config.reference, constants)
    opt_w = final_cob_weight(traits, constants)
    return IdeotypeReport(rows, ref_w, opt_w)
