"""Config-driven pipelines shared by the command line and the scripts."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig
from .ga import GaResult, IdeotypeReport, evolve, report
from .genetics import MappingPopulation, apply_noise, founders, make_ril
from .growth import GrowthConstants, GrowthSeries, simulate, surface_scan
from .qtl import LodProfile, QtlHit, detect, scan


def streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent generators for population building and measurement noise."""
    pop, noise = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(pop), np.random.default_rng(noise)


def run_simulate(config: ExperimentConfig, constants: GrowthConstants | None = None) -> GrowthSeries:
    return simulate(config.traits(), constants or config.constants())


def build_population(config: ExperimentConfig, constants: GrowthConstants | None = None) -> MappingPopulation:
    gmap = config.genetic_map()
    effects = config.effects()
    p1, p2 = founders(effects, gmap)
    rng, _ = streams(config.seed)
    pop = make_ril(p1, p2, config.population.generations, config.population.size, gmap, rng,
                   effects=effects, constants=constants or config.constants())
    pop.seed = config.seed
    return pop


@dataclass
class TraitScan:
    trait: str
    noisy: bool
    profile: LodProfile
    hits: list[QtlHit]


def run_qtl(config: ExperimentConfig, population: MappingPopulation,
            traits: list[str] | None = None) -> list[TraitScan]:
    """Scan each trait; traits listed in ``qtl.noisy_traits`` get ``noise.cv`` noise.

    Noise draws come from the config seed's noise stream, in trait order.
    """
    _, noise_rng = streams(config.seed)
    out = []
    for trait in traits or config.qtl.traits:
        values = population.trait_values(trait)
        noisy = trait in config.qtl.noisy_traits and config.noise.cv > 0
        if noisy:
            values = apply_noise(values, config.noise.cv, noise_rng)
        profile = scan(population, values, name=trait, threshold=config.qtl.threshold,
                       heterozygote=config.qtl.heterozygote)
        out.append(TraitScan(trait, noisy, profile, detect(profile, peak_drop=config.qtl.peak_drop)))
    return out


def summary_csv(scans: list[TraitScan], population: MappingPopulation) -> str:
    """One row per trait: hit count and the markers hit, plus the locus they host."""
    loci = {int(m): g + 1 for g, m in enumerate(population.gmap.locus_markers)}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["trait", "noisy", "n_hits", "markers", "loci"])
    for s in scans:
        markers = [population.gmap.names[h.marker] for h in s.hits]
        hosted = [str(loci[h.marker]) for h in s.hits if h.marker in loci]
        w.writerow([s.trait, int(s.noisy), len(s.hits), " ".join(markers), " ".join(hosted)])
    return buf.getvalue()


def hit_loci(hits: list[QtlHit], population: MappingPopulation) -> list[int]:
    """1-based gene loci sitting on hit markers."""
    loci = {int(m): g + 1 for g, m in enumerate(population.gmap.locus_markers)}
    return sorted(loci[h.marker] for h in hits if h.marker in loci)


def run_optimize(config: ExperimentConfig, constants: GrowthConstants | None = None,
                 ) -> tuple[GaResult, IdeotypeReport]:
    constants = constants or config.constants()
    ga = config.ga_config()
    result = evolve(ga, constants)
    return result, report(result.best, ga, constants)


def surface_ranges(config: ExperimentConfig) -> tuple[tuple[float, float], tuple[float, float]]:
    ga = config.ga_config()
    return ga.bounds(config.surface.x), ga.bounds(config.surface.y)


def run_surface(config: ExperimentConfig, constants: GrowthConstants | None = None):
    xr, yr = surface_ranges(config)
    return surface_scan(config.traits(), constants or config.constants(),
                        config.surface.x, config.surface.y, xr, yr, config.surface.grid)


def surface_csv(x: str, y: str, xs, ys, W) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "cob_weight"])
    for i, xv in enumerate(xs):
        for j, yv in enumerate(ys):
            w.writerow([repr(float(xv)), repr(float(yv)), repr(float(W[i, j]))])
    return buf.getvalue()
