"""
Virtual diploid genome driving the genetically determined growth parameters.

A genome is a pair of homologous chromosomes on one linkage group. Allele
effect values are carried at the N gene loci; founder origin (1 or 2) is
carried at every marker so that marker genotypes are read exactly.

Genotype to parameters:  C3 = express(C1, C2),  Y = D @ A @ C3 with
D(j, j) = Yr(j) / sum_k A(j, k).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .growth import (
    INTEGER_TRAITS,
    TRAIT_NAMES,
    GeneticTraits,
    GrowthConstants,
    simulate,
)

ADDITIVE = "additive"
DOMINANT = "dominant"

# Relative half-ranges of variation of the genetically determined parameters.
TRAIT_HALF_RANGE = {
    "blade_thickness": 0.05,
    "blade_resistance": 0.05,
    "sheath_sink": 0.10,
    "internode_sink": 0.10,
    "cob_sink": 0.30,
    "blade_sink_var": 0.20,
    "sheath_sink_var": 0.20,
    "internode_sink_var": 0.20,
    "cob_sink_var": 0.30,
    "seed_biomass": 0.10,
    "short_internode_count": 0.20,
    "ear_cycle": 0.20,
}


def round_half_away(x: np.ndarray | float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


@dataclass
class GeneticMap:
    """Markers on one linkage group; gene locus g sits on marker ``locus_markers[g]``."""

    positions: np.ndarray
    locus_markers: np.ndarray
    names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        self.locus_markers = np.asarray(self.locus_markers, dtype=int)
        if self.positions.ndim != 1 or len(self.positions) < 1:
            raise ValueError("map needs at least one marker")
        if np.any(np.diff(self.positions) <= 0):
            raise ValueError("marker positions must be strictly increasing")
        if len(set(self.locus_markers.tolist())) != len(self.locus_markers):
            raise ValueError("each locus must sit on a distinct marker")
        if np.any(self.locus_markers < 0) or np.any(self.locus_markers >= len(self.positions)):
            raise ValueError("locus marker index out of range")
        if not self.names:
            self.names = [f"M{i + 1}" for i in range(len(self.positions))]

    @classmethod
    def regular(cls, n_loci: int = 15, qtl_spacing: int = 4, marker_spacing: float = 10.0) -> "GeneticMap":
        """Evenly spaced markers with a gene every ``qtl_spacing`` markers, first gene at 0 cM."""
        n_markers = (n_loci - 1) * qtl_spacing + 1
        return cls(np.arange(n_markers) * marker_spacing, np.arange(n_loci) * qtl_spacing)

    @property
    def length(self) -> float:
        return float(self.positions[-1] - self.positions[0])

    @property
    def n_markers(self) -> int:
        return len(self.positions)

    @property
    def n_loci(self) -> int:
        return len(self.locus_markers)

    @property
    def locus_positions(self) -> np.ndarray:
        return self.positions[self.locus_markers]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["marker", "position_cM"])
        for name, pos in zip(self.names, self.positions):
            w.writerow([name, repr(float(pos))])
        return buf.getvalue()


@dataclass
class DiploidGenome:
    """Two homologous chromosomes: allele values at loci, founder origin at markers.

    ``origin1``/``origin2`` are ``None`` when founder origin is not tracked.
    """

    c1: np.ndarray
    c2: np.ndarray
    origin1: np.ndarray | None = None
    origin2: np.ndarray | None = None

    def __post_init__(self):
        self.c1 = np.asarray(self.c1, dtype=float)
        self.c2 = np.asarray(self.c2, dtype=float)
        if self.c1.shape != self.c2.shape:
            raise ValueError(f"chromosome lengths differ: {len(self.c1)} vs {len(self.c2)}")
        if (self.origin1 is None) != (self.origin2 is None):
            raise ValueError("origin must be tracked on both chromosomes or neither")
        if self.origin1 is not None:
            self.origin1 = np.asarray(self.origin1, dtype=np.int8)
            self.origin2 = np.asarray(self.origin2, dtype=np.int8)

    @classmethod
    def founder(cls, values: Sequence[float], origin: int, n_markers: int) -> "DiploidGenome":
        v = np.asarray(values, dtype=float)
        o = np.full(n_markers, origin, dtype=np.int8)
        return cls(v.copy(), v.copy(), o, o.copy())

    def is_homozygous(self) -> bool:
        if not np.array_equal(self.c1, self.c2):
            return False
        return self.origin1 is None or np.array_equal(self.origin1, self.origin2)

    def heterozygous_loci(self, gmap: GeneticMap) -> np.ndarray:
        """Loci whose two copies come from different founders."""
        if self.origin1 is None:
            return self.c1 != self.c2
        m = gmap.locus_markers
        return self.origin1[m] != self.origin2[m]


@dataclass
class ExpressionRules:
    """Per-locus expression mode. At a dominant locus the allele listed first in
    ``dominance_order[g]`` wins whenever it is present."""

    modes: list[str]
    dominance_order: dict[int, tuple[float, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for m in self.modes:
            if m not in (ADDITIVE, DOMINANT):
                raise ValueError(f"unknown expression mode {m!r}")

    @classmethod
    def additive(cls, n: int) -> "ExpressionRules":
        return cls([ADDITIVE] * n)


def express(genome: DiploidGenome, rules: ExpressionRules) -> np.ndarray:
    """Effective allele vector C3 from the two chromosomes."""
    c1, c2 = genome.c1, genome.c2
    if len(rules.modes) != len(c1):
        raise ValueError(f"{len(rules.modes)} expression rules for {len(c1)} loci")
    c3 = 0.5 * (c1 + c2)
    for g, mode in enumerate(rules.modes):
        if mode != DOMINANT or c1[g] == c2[g]:
            continue
        order = rules.dominance_order.get(g, (c1[g], c2[g]))
        for allele in order:
            if allele == c1[g] or allele == c2[g]:
                c3[g] = allele
                break
        else:
            c3[g] = c1[g]
    return c3


@dataclass
class GeneEffectMap:
    """Linear map from expressed alleles to growth parameters.

    ``spread[g]`` is the founder allele deviation at locus g: the two founder
    alleles are ``1 - spread[g]`` (parent 1) and ``1 + spread[g]`` (parent 2).
    """

    A: np.ndarray
    Yr: np.ndarray
    spread: np.ndarray
    integer_mask: np.ndarray
    names: tuple[str, ...] = TRAIT_NAMES

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.Yr = np.asarray(self.Yr, dtype=float)
        self.spread = np.asarray(self.spread, dtype=float)
        self.integer_mask = np.asarray(self.integer_mask, dtype=bool)
        T, N = self.A.shape
        if self.Yr.shape != (T,) or self.integer_mask.shape != (T,):
            raise ValueError("Yr and integer_mask must have one entry per row of A")
        if self.spread.shape != (N,):
            raise ValueError("spread must have one entry per column of A")
        if np.any(self.A < 0):
            raise ValueError("A must be nonnegative")
        bad = np.flatnonzero(self.A.sum(axis=1) <= 0)
        if len(bad):
            raise ValueError(f"rows {bad.tolist()} of A have zero sum")

    @property
    def D(self) -> np.ndarray:
        return self.Yr / self.A.sum(axis=1)

    @property
    def n_loci(self) -> int:
        return self.A.shape[1]

    def founder_alleles(self) -> tuple[np.ndarray, np.ndarray]:
        return 1.0 - self.spread, 1.0 + self.spread

    @classmethod
    def from_matrix(cls, A, reference: GeneticTraits | None = None,
                    spread: Sequence[float] | None = None) -> "GeneEffectMap":
        """Build from A; spread defaults to the relative half-range of each locus's
        main parameter (largest weight in its column, lowest row on ties)."""
        A = np.asarray(A, dtype=float)
        reference = reference or GeneticTraits()
        Yr = reference.as_vector()
        if spread is None:
            spread = np.zeros(A.shape[1])
            for g in range(A.shape[1]):
                if A[:, g].max() > 0:
                    spread[g] = TRAIT_HALF_RANGE[TRAIT_NAMES[int(np.argmax(A[:, g]))]]
        mask = np.array([n in INTEGER_TRAITS for n in TRAIT_NAMES])
        return cls(A, Yr, np.asarray(spread, dtype=float), mask)

    @classmethod
    def diagonal(cls, n_loci: int = 15, reference: GeneticTraits | None = None) -> "GeneEffectMap":
        A = np.zeros((len(TRAIT_NAMES), n_loci))
        A[np.arange(len(TRAIT_NAMES)), np.arange(len(TRAIT_NAMES))] = 1.0
        return cls.from_matrix(A, reference)


def genotype_to_values(c3: np.ndarray, effects: GeneEffectMap) -> np.ndarray:
    c3 = np.asarray(c3, dtype=float)
    if c3.shape != (effects.n_loci,):
        raise ValueError(f"expected {effects.n_loci} allele effects, got {c3.shape}")
    Y = effects.D * (effects.A @ c3)
    return np.where(effects.integer_mask, round_half_away(Y), Y)


def genotype_to_traits(c3: np.ndarray, effects: GeneEffectMap) -> GeneticTraits:
    """Growth parameters Y = D A C3, integer parameters rounded half away from zero."""
    return GeneticTraits.from_vector(genotype_to_values(c3, effects))


def gamete(genome: DiploidGenome, gmap: GeneticMap, rng: np.random.Generator) -> np.ndarray:
    """Allele values of one recombinant chromosome.

    Crossover count ~ Poisson(map length / 100 cM), cut points uniform on the
    map, starting chromosome by a fair coin.
    """
    return gamete_parts(genome, gmap, rng)[0]


def crossover_count(gmap: GeneticMap, rng: np.random.Generator) -> int:
    return int(rng.poisson(gmap.length / 100.0))


def gamete_parts(genome: DiploidGenome, gmap: GeneticMap, rng: np.random.Generator,
                 ) -> tuple[np.ndarray, np.ndarray | None]:
    n_cuts = crossover_count(gmap, rng)
    start = int(rng.integers(2))
    if n_cuts:
        cuts = np.sort(rng.uniform(gmap.positions[0], gmap.positions[-1], n_cuts))
        flips = np.searchsorted(cuts, gmap.positions, side="right")
        source = (start + flips) % 2
    else:
        source = np.full(gmap.n_markers, start)
    at_locus = source[gmap.locus_markers]
    values = np.where(at_locus == 0, genome.c1, genome.c2)
    origin = None
    if genome.origin1 is not None:
        origin = np.where(source == 0, genome.origin1, genome.origin2).astype(np.int8)
    return values, origin


def cross(parent_a: DiploidGenome, parent_b: DiploidGenome, gmap: GeneticMap,
          rng: np.random.Generator) -> DiploidGenome:
    va, oa = gamete_parts(parent_a, gmap, rng)
    vb, ob = gamete_parts(parent_b, gmap, rng)
    if oa is None or ob is None:
        oa = ob = None
    return DiploidGenome(va, vb, oa, ob)


def marker_codes(genome: DiploidGenome, gmap: GeneticMap) -> list[str]:
    """Marker genotypes: "1"/"2" homozygous for a founder's segment, "H" otherwise."""
    if genome.origin1 is None:
        raise ValueError("genome does not track founder origin")
    o1, o2 = genome.origin1, genome.origin2
    if len(o1) != gmap.n_markers:
        raise ValueError(f"origin tracked at {len(o1)} markers, map has {gmap.n_markers}")
    return ["1" if a == b == 1 else "2" if a == b == 2 else "H" for a, b in zip(o1, o2)]


def apply_noise(values, cv: float, rng: np.random.Generator) -> np.ndarray:
    """Multiplicative white noise: v * (1 + eps), eps ~ N(0, cv)."""
    if cv < 0:
        raise ValueError(f"coefficient of variation must be >= 0, got {cv}")
    values = np.asarray(values, dtype=float)
    if cv == 0:
        return values.copy()
    return values * (1.0 + rng.normal(0.0, cv, size=values.shape))


@dataclass
class Individual:
    genome: DiploidGenome
    codes: list[str]
    traits: GeneticTraits
    phenotype: dict[str, float] = field(default_factory=dict)


@dataclass
class MappingPopulation:
    individuals: list[Individual]
    gmap: GeneticMap
    generation: int
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.individuals)

    def code_matrix(self) -> np.ndarray:
        """(individuals x markers) array of "1"/"2"/"H"."""
        if not self.individuals:
            return np.empty((0, self.gmap.n_markers), dtype="<U1")
        return np.array([ind.codes for ind in self.individuals])

    def trait_names(self) -> list[str]:
        extra = list(self.individuals[0].phenotype) if self.individuals else []
        return list(TRAIT_NAMES) + [n for n in extra if n not in TRAIT_NAMES]

    def trait_values(self, name: str) -> np.ndarray:
        if name in TRAIT_NAMES:
            return np.array([float(getattr(ind.traits, name)) for ind in self.individuals])
        if self.individuals and name not in self.individuals[0].phenotype:
            raise KeyError(f"unknown trait {name!r}; available: {self.trait_names()}")
        return np.array([ind.phenotype[name] for ind in self.individuals])

    def heterozygosity(self) -> float:
        """Mean fraction of heterozygous gene loci."""
        if not self.individuals:
            return 0.0
        return float(np.mean([ind.genome.heterozygous_loci(self.gmap).mean() for ind in self.individuals]))

    def genotype_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["individual"] + self.gmap.names)
        for i, ind in enumerate(self.individuals):
            w.writerow([i + 1] + ind.codes)
        return buf.getvalue()

    def phenotype_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        names = self.trait_names() if self.individuals else list(TRAIT_NAMES) + ["cob_weight"]
        w.writerow(["individual"] + names)
        for i in range(len(self)):
            w.writerow([i + 1] + [repr(float(self.trait_values(n)[i])) for n in names])
        return buf.getvalue()


def founders(effects: GeneEffectMap, gmap: GeneticMap) -> tuple[DiploidGenome, DiploidGenome]:
    low, high = effects.founder_alleles()
    return (DiploidGenome.founder(low, 1, gmap.n_markers),
            DiploidGenome.founder(high, 2, gmap.n_markers))


def make_ril(parent1: DiploidGenome, parent2: DiploidGenome, generations: int, size: int,
             gmap: GeneticMap, rng: np.random.Generator, *,
             rules: ExpressionRules | None = None,
             effects: GeneEffectMap | None = None,
             constants: GrowthConstants | None = None) -> MappingPopulation:
    """Recombinant inbred lines: F1 = parent1 x parent2, then selfed up to F<generations>.

    Each lineage draws from its own child generator spawned from ``rng``.
    With ``effects`` the traits are expressed; with ``constants`` as well, each
    line is grown and its final cob weight stored as phenotype ``cob_weight``.
    """
    if generations < 2:
        raise ValueError("generations must be >= 2 (F1 plus at least one selfing)")
    if size < 0:
        raise ValueError("size must be >= 0")
    for label, p in (("parent1", parent1), ("parent2", parent2)):
        if not p.is_homozygous():
            raise ValueError(f"{label} is not homozygous")
    rules = rules or ExpressionRules.additive(len(parent1.c1))
    individuals = []
    for child_rng in rng.spawn(size) if size else []:
        g = cross(parent1, parent2, gmap, child_rng)
        for _ in range(generations - 1):
            g = cross(g, g, gmap, child_rng)
        traits = genotype_to_traits(express(g, rules), effects) if effects is not None else GeneticTraits()
        phenotype = {}
        if effects is not None and constants is not None:
            phenotype["cob_weight"] = simulate(traits, constants).final_cob_weight
        individuals.append(Individual(g, marker_codes(g, gmap), traits, phenotype))
    return MappingPopulation(individuals, gmap, generations)


# Pleiotropic design with two known rows (parameters 1 and 2) and the rest
# filled so that four genes share the parameter space; 1-based loci.
PLEIOTROPIC_ROWS = (
    {3: 1, 8: 1},
    {3: 3, 8: 2, 14: 1},
    {1: 2, 11: 1},
    {5: 1, 12: 2},
    {1: 1},
    {14: 1},
    {11: 1},
    {3: 1, 8: 1, 14: 1},
    {12: 1},
    {5: 1},
    {11: 1},
    {1: 1},
)


def pleiotropic_matrix(n_loci: int = 15) -> np.ndarray:
    A = np.zeros((len(TRAIT_NAMES), n_loci))
    for j, row in enumerate(PLEIOTROPIC_ROWS):
        for locus, w in row.items():
            A[j, locus - 1] = w
    return A
