"""
Deterministic per-cycle source-sink growth of a single maize plant.

Organs are grouped in cohorts (same type, same appearance cycle). At every
growth cycle n the biomass produced during the previous cycle, Q(n-1), is
shared among all expanding organs in proportion to their current demand

    P_o * f_o(age)

and the new production Q(n) is computed from the biomass of the blades that
are still photosynthetically active (age <= tb) with a Beer-Lambert law:

    Q = E*Sp/(r*k) * (1 - exp(-k * B / (e * Sp)))

Units: biomass in g, areas in cm^2, leaf specific weight e in g.cm^-2.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

ORGAN_TYPES = ("blade", "sheath", "internode", "cob", "tassel")

# Order of the genetically determined parameters (the vector Y).
TRAIT_NAMES = (
    "blade_thickness",
    "blade_resistance",
    "sheath_sink",
    "internode_sink",
    "cob_sink",
    "blade_sink_var",
    "sheath_sink_var",
    "internode_sink_var",
    "cob_sink_var",
    "seed_biomass",
    "short_internode_count",
    "ear_cycle",
)
INTEGER_TRAITS = frozenset({"short_internode_count", "ear_cycle"})


@dataclass(frozen=True)
class GeneticTraits:
    """Genetically determined parameters of one plant (reference genotype by default)."""

    blade_thickness: float = 0.028
    blade_resistance: float = 354.0
    sheath_sink: float = 0.7
    internode_sink: float = 2.17
    cob_sink: float = 202.0
    blade_sink_var: float = 0.4
    sheath_sink_var: float = 0.53
    internode_sink_var: float = 0.79
    cob_sink_var: float = 0.62
    seed_biomass: float = 0.3
    short_internode_count: int = 6
    ear_cycle: int = 15
    blade_sink: float = 1.0

    def __post_init__(self):
        for name in ("blade_thickness", "blade_resistance"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        for name in ("sheath_sink", "internode_sink", "cob_sink", "blade_sink"):
            if not getattr(self, name) > 0:
                raise ValueError(f"sink strength {name} must be > 0, got {getattr(self, name)}")
        for name in ("blade_sink_var", "sheath_sink_var", "internode_sink_var", "cob_sink_var"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if self.blade_sink != 1.0:
            raise ValueError("blade_sink is the normalization anchor and must equal 1.0")
        if self.seed_biomass < 0:
            raise ValueError(f"seed_biomass must be >= 0, got {self.seed_biomass}")
        for name in INTEGER_TRAITS:
            if int(getattr(self, name)) != getattr(self, name):
                raise ValueError(f"{name} must be an integer, got {getattr(self, name)}")
            object.__setattr__(self, name, int(getattr(self, name)))

    def as_vector(self) -> np.ndarray:
        return np.array([float(getattr(self, name)) for name in TRAIT_NAMES])

    @classmethod
    def from_vector(cls, values: Sequence[float]) -> "GeneticTraits":
        if len(values) != len(TRAIT_NAMES):
            raise ValueError(f"expected {len(TRAIT_NAMES)} values, got {len(values)}")
        kwargs = {}
        for name, v in zip(TRAIT_NAMES, values):
            kwargs[name] = int(v) if name in INTEGER_TRAITS else float(v)
        return cls(**kwargs)

    def replace(self, **changes) -> "GeneticTraits":
        return dataclasses.replace(self, **changes)

    def sink(self, organ: str, constants: "GrowthConstants") -> float:
        if organ == "tassel":
            return constants.tassel_sink
        return getattr(self, f"{organ}_sink")

    def sink_var(self, organ: str, constants: "GrowthConstants") -> float:
        if organ == "tassel":
            return constants.tassel_sink_var
        return getattr(self, f"{organ}_sink_var")


@dataclass(frozen=True)
class GrowthConstants:
    """Environment and species constants held fixed across genotypes.

    ``cob_expansion=None`` makes the cob expand until the end of the run,
    i.e. for ``cycle_count - ear_cycle + 1`` cycles. ``E`` is normally
    replaced by :func:`calibrate_E` before use.
    """

    E: float = 3.5
    Sp: float = 3600.0
    k: float = 0.7
    tb: int = 8
    cycle_count: int = 33
    phytomer_count: int = 21
    tassel_cycle: int = 21
    tassel_sink: float = 1.0
    tassel_sink_var: float = 0.5
    blade_expansion: int = 8
    sheath_expansion: int = 8
    internode_expansion: int = 8
    cob_expansion: int | None = 14
    tassel_expansion: int = 8
    short_internode_sink_factor: float = 0.1

    def __post_init__(self):
        for name in ("E", "Sp", "k", "tb"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.cycle_count < 1 or self.phytomer_count < 1:
            raise ValueError("cycle_count and phytomer_count must be >= 1")
        if not 1 <= self.tassel_cycle <= self.cycle_count:
            raise ValueError("tassel_cycle must lie in [1, cycle_count]")
        for organ in ORGAN_TYPES:
            t = getattr(self, f"{organ}_expansion")
            if t is not None and t < 1:
                raise ValueError(f"{organ}_expansion must be >= 1, got {t}")
        if not 0 < self.short_internode_sink_factor <= 1:
            raise ValueError("short_internode_sink_factor must lie in (0, 1]")
        if not 0 < self.tassel_sink_var < 1 or not self.tassel_sink > 0:
            raise ValueError("invalid tassel sink parameters")

    def expansion(self, organ: str, traits: GeneticTraits) -> int:
        if organ == "cob" and self.cob_expansion is None:
            return max(1, self.cycle_count - traits.ear_cycle + 1)
        return getattr(self, f"{organ}_expansion")

    def replace(self, **changes) -> "GrowthConstants":
        return dataclasses.replace(self, **changes)


def check_compatible(traits: GeneticTraits, constants: GrowthConstants) -> None:
    if not 1 <= traits.short_internode_count < constants.phytomer_count:
        raise ValueError(
            f"short_internode_count={traits.short_internode_count} outside "
            f"[1, {constants.phytomer_count})"
        )
    if not 1 <= traits.ear_cycle <= constants.cycle_count:
        raise ValueError(f"ear_cycle={traits.ear_cycle} outside [1, {constants.cycle_count}]")


@lru_cache(maxsize=1024)
def _kernel(p: float, T: int) -> tuple:
    a = 1.0 + 4.0 * p
    b = 1.0 + 4.0 * (1.0 - p)
    x = (np.arange(1, T + 1) - 0.5) / T
    g = x ** (a - 1.0) * (1.0 - x) ** (b - 1.0)
    return tuple(g / g.sum())


def sink_kernel(p: float, T: int) -> np.ndarray:
    """Normalized beta-law sink variation f(1..T) for sink-variation parameter p.

    Shape parameters are a = 1 + 4p, b = 1 + 4(1 - p), evaluated at the
    cycle midpoints (j - 0.5)/T, so p < 0.5 moves the peak early.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"sink-variation parameter must lie in (0, 1), got {p}")
    if int(T) != T or T < 1:
        raise ValueError(f"expansion duration must be an integer >= 1, got {T}")
    return np.array(_kernel(float(p), int(T)))


@dataclass
class OrganCohort:
    organ_type: str
    appearance_cycle: int
    count: int = 1
    sink_multiplier: float = 1.0
    accumulated_biomass: float = 0.0

    def age(self, n: int) -> int:
        return n - self.appearance_cycle + 1


def organogenesis_schedule(constants: GrowthConstants, traits: GeneticTraits) -> list[OrganCohort]:
    """Deterministic maize topology: one metamer per cycle, then a cob and a tassel."""
    check_compatible(traits, constants)
    cohorts = []
    for n in range(1, constants.phytomer_count + 1):
        cohorts.append(OrganCohort("blade", n))
        cohorts.append(OrganCohort("sheath", n))
        mult = constants.short_internode_sink_factor if n <= traits.short_internode_count else 1.0
        cohorts.append(OrganCohort("internode", n, sink_multiplier=mult))
    cohorts.append(OrganCohort("cob", traits.ear_cycle))
    cohorts.append(OrganCohort("tassel", constants.tassel_cycle))
    cohorts.sort(key=lambda c: (c.appearance_cycle, ORGAN_TYPES.index(c.organ_type)))
    return cohorts


def cohort_demand(cohort: OrganCohort, n: int, traits: GeneticTraits, constants: GrowthConstants) -> float:
    T = constants.expansion(cohort.organ_type, traits)
    age = cohort.age(n)
    if age < 1 or age > T:
        return 0.0
    f = _kernel(float(traits.sink_var(cohort.organ_type, constants)), T)
    return cohort.count * cohort.sink_multiplier * traits.sink(cohort.organ_type, constants) * f[age - 1]


def demand(cohorts: Iterable[OrganCohort], n: int, traits: GeneticTraits, constants: GrowthConstants) -> float:
    """Total plant demand D(n) of the cohorts expanding at cycle n."""
    if n < 1:
        raise ValueError(f"cycle must be >= 1, got {n}")
    return float(sum(cohort_demand(c, n, traits, constants) for c in cohorts))


def production(active_blade_biomass: float, traits: GeneticTraits, constants: GrowthConstants) -> float:
    """Biomass produced in one cycle by ``active_blade_biomass`` grams of blades."""
    e, r = traits.blade_thickness, traits.blade_resistance
    k, Sp = constants.k, constants.Sp
    if e == 0 or r == 0 or k == 0 or Sp == 0:
        raise ValueError("e, r, k and Sp must be nonzero")
    if active_blade_biomass < 0:
        raise ValueError("active blade biomass must be >= 0")
    return constants.E * Sp / (r * k) * -math.expm1(-k * active_blade_biomass / (e * Sp))


def production_ceiling(traits: GeneticTraits, constants: GrowthConstants) -> float:
    return constants.E * constants.Sp / (traits.blade_resistance * constants.k)


@dataclass
class PlantState:
    """Plant after ``cycle`` growth cycles; ``Q`` is the production of that cycle."""

    traits: GeneticTraits
    constants: GrowthConstants
    cycle: int
    Q: float
    cohorts: list[OrganCohort] = field(default_factory=list)
    pending: list[OrganCohort] = field(default_factory=list)
    D: float = 0.0
    increments: list[float] = field(default_factory=list)

    @classmethod
    def initial(cls, traits: GeneticTraits, constants: GrowthConstants) -> "PlantState":
        return cls(traits, constants, 0, traits.seed_biomass,
                   pending=organogenesis_schedule(constants, traits))

    def active_blade_biomass(self) -> float:
        tb = self.constants.tb
        return sum(c.accumulated_biomass for c in self.cohorts
                   if c.organ_type == "blade" and 1 <= c.age(self.cycle) <= tb)

    def compartments(self) -> dict[str, float]:
        out = dict.fromkeys(ORGAN_TYPES, 0.0)
        for c in self.cohorts:
            out[c.organ_type] += c.accumulated_biomass
        return out


def step(state: PlantState) -> PlantState:
    """Advance one cycle: organogenesis, allocation of Q(n-1), production Q(n)."""
    traits, constants = state.traits, state.constants
    n = state.cycle + 1
    cohorts = [dataclasses.replace(c) for c in state.cohorts]
    pending = []
    for c in state.pending:
        (cohorts if c.appearance_cycle <= n else pending).append(dataclasses.replace(c))

    demands = [cohort_demand(c, n, traits, constants) for c in cohorts]
    D = float(sum(demands))
    increments = [0.0] * len(cohorts)
    if D > 0 and state.Q > 0:
        ratio = state.Q / D
        for i, (c, d) in enumerate(zip(cohorts, demands)):
            if d > 0:
                increments[i] = d * ratio
                c.accumulated_biomass += increments[i]

    new = PlantState(traits, constants, n, 0.0, cohorts, pending, D, increments)
    new.Q = production(new.active_blade_biomass(), traits, constants)
    return new


@dataclass
class GrowthSeries:
    """Per-cycle records of one simulation; index i holds cycle i + 1."""

    traits: GeneticTraits
    constants: GrowthConstants
    Q: np.ndarray
    D: np.ndarray
    Q_over_D: np.ndarray
    active_blade_biomass: np.ndarray
    blade_area: np.ndarray
    biomass: dict[str, np.ndarray]

    @property
    def cycles(self) -> np.ndarray:
        return np.arange(1, len(self.Q) + 1)

    @property
    def final_cob_weight(self) -> float:
        return float(self.biomass["cob"][-1])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["cycle", "Q", "D", "Q_over_D", "blade_area"] + list(ORGAN_TYPES))
        for i, n in enumerate(self.cycles):
            row = [int(n), self.Q[i], self.D[i], self.Q_over_D[i], self.blade_area[i]]
            row += [self.biomass[o][i] for o in ORGAN_TYPES]
            writer.writerow([row[0]] + [repr(float(v)) for v in row[1:]])
        return buf.getvalue()


def demand_matrix(cohorts: Sequence[OrganCohort], traits: GeneticTraits,
                  constants: GrowthConstants) -> np.ndarray:
    """Demand of every cohort (rows) at every cycle 1..cycle_count (columns)."""
    N = constants.cycle_count
    out = np.zeros((len(cohorts), N))
    for i, c in enumerate(cohorts):
        T = constants.expansion(c.organ_type, traits)
        f = np.array(_kernel(float(traits.sink_var(c.organ_type, constants)), T))
        scale = c.count * c.sink_multiplier * traits.sink(c.organ_type, constants)
        first = c.appearance_cycle - 1
        last = min(first + T, N)
        if first < N:
            out[i, first:last] = scale * f[: last - first]
    return out


def simulate(traits: GeneticTraits, constants: GrowthConstants | None = None) -> GrowthSeries:
    """Run the plant from Q(0) = seed biomass through ``cycle_count`` cycles.

    Same recurrence as repeated :func:`step`, evaluated on a precomputed
    cohort x cycle demand matrix.
    """
    constants = constants or GrowthConstants()
    cohorts = organogenesis_schedule(constants, traits)
    N = constants.cycle_count
    dm = demand_matrix(cohorts, traits, constants)
    organ_index = np.array([ORGAN_TYPES.index(c.organ_type) for c in cohorts])
    is_blade = organ_index == 0
    blade_appear = np.array([c.appearance_cycle for c in cohorts])[is_blade]

    Q, D, ratio = np.zeros(N), dm.sum(axis=0), np.zeros(N)
    active = np.zeros(N)
    acc = np.zeros(len(cohorts))
    per_organ = np.zeros((len(ORGAN_TYPES), N))
    q_prev = traits.seed_biomass
    for i in range(N):
        n = i + 1
        if D[i] > 0 and q_prev > 0:
            ratio[i] = q_prev / D[i]
            acc += dm[:, i] * ratio[i]
        age = n - blade_appear + 1
        active[i] = acc[is_blade][(age >= 1) & (age <= constants.tb)].sum()
        Q[i] = production(active[i], traits, constants)
        per_organ[:, i] = np.bincount(organ_index, weights=acc, minlength=len(ORGAN_TYPES))
        q_prev = Q[i]
    biomass = {o: per_organ[j] for j, o in enumerate(ORGAN_TYPES)}
    return GrowthSeries(traits, constants, Q, D, ratio, active,
                        active / traits.blade_thickness, biomass)


def cob_weight(series: GrowthSeries, n: int) -> float:
    """Cob weight at cycle n, summed from the per-cycle supply/demand ratios."""
    N = len(series.Q)
    if not 1 <= n <= N:
        raise IndexError(f"cycle {n} outside [1, {N}]")
    traits, constants = series.traits, series.constants
    T = constants.expansion("cob", traits)
    f = _kernel(float(traits.cob_sink_var), T)
    total = 0.0
    for i in range(traits.ear_cycle, n + 1):
        age = i - traits.ear_cycle + 1
        if age > T or series.D[i - 1] <= 0:
            continue
        q_prev = traits.seed_biomass if i == 1 else series.Q[i - 2]
        total += traits.cob_sink * f[age - 1] * q_prev / series.D[i - 1]
    return total


def final_cob_weight(traits: GeneticTraits, constants: GrowthConstants | None = None) -> float:
    return simulate(traits, constants).final_cob_weight


REFERENCE_COB_WEIGHT = 773.0


def calibrate_E(traits: GeneticTraits | None = None, constants: GrowthConstants | None = None,
                target: float = REFERENCE_COB_WEIGHT, bracket: tuple[float, float] = (0.01, 1000.0),
                ) -> GrowthConstants:
    """Return ``constants`` with E solved so that ``traits`` give ``target`` g of cob."""
    from scipy.optimize import brentq

    traits = traits or GeneticTraits()
    constants = constants or GrowthConstants()

    def gap(E):
        return simulate(traits, constants.replace(E=E)).final_cob_weight - target

    lo, hi = bracket
    if gap(lo) * gap(hi) > 0:
        raise ValueError(f"target cob weight {target} g not reachable for E in {bracket}")
    return constants.replace(E=brentq(gap, lo, hi, xtol=1e-12, rtol=1e-14))


SURFACE_PARAMETERS = tuple(n for n in TRAIT_NAMES if n not in INTEGER_TRAITS)


def surface_scan(traits: GeneticTraits, constants: GrowthConstants, x: str, y: str,
                 x_range: tuple[float, float], y_range: tuple[float, float], grid: int | tuple[int, int] = 20,
                 ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Final cob weight over a grid of two continuous parameters.

    Returns ``(xs, ys, W)`` with ``W[i, j]`` the weight at ``(xs[i], ys[j])``.
    """
    for name in (x, y):
        if name not in SURFACE_PARAMETERS:
            raise ValueError(f"{name!r} is not a continuous trait; choose from {SURFACE_PARAMETERS}")
    nx, ny = (grid, grid) if isinstance(grid, int) else grid
    if nx < 2 or ny < 2:
        raise ValueError("surface grid must be at least 2 x 2")
    xs = np.linspace(*x_range, nx)
    ys = np.linspace(*y_range, ny)
    W = np.empty((nx, ny))
    for i, xv in enumerate(xs):
        for j, yv in enumerate(ys):
            W[i, j] = simulate(traits.replace(**{x: float(xv), y: float(yv)}), constants).final_cob_weight
    return xs, ys, W
