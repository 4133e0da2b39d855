"""
Single-marker QTL analysis.

At each marker the trait is regressed on the marker dose (1 -> 0, H -> 0.5,
2 -> 1) and the Gaussian likelihood ratio against the intercept-only model is
reported as a LOD score, (n/2) * log10(RSS0 / RSS1).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .genetics import MappingPopulation

LOD_CAP = 50.0
DEFAULT_THRESHOLD = 3.0
DOSE = {"1": 0.0, "H": 0.5, "2": 1.0}


def dose(codes: Sequence[str], heterozygote: float = 0.5) -> np.ndarray:
    table = dict(DOSE, H=heterozygote)
    try:
        return np.array([table[str(c)] for c in codes], dtype=float)
    except KeyError as err:
        raise ValueError(f"unknown marker code {err.args[0]!r}") from None


def likelihood_ratio_lod(trait_values, codes: Sequence[str], heterozygote: float = 0.5) -> float | None:
    """Uncapped LOD (``inf`` for a zero-residual fit), or ``None`` when no test
    is possible (fewer than 3 individuals or a single genotype class)."""
    y = np.asarray(trait_values, dtype=float)
    if len(y) != len(codes):
        raise ValueError(f"{len(y)} trait values for {len(codes)} marker codes")
    n = len(y)
    if n < 3 or len(set(codes)) < 2:
        return None
    x = dose(codes, heterozygote)
    xc = x - x.mean()
    yc = y - y.mean()
    rss0 = float(yc @ yc)
    sxx = float(xc @ xc)
    if sxx == 0.0:
        return None
    # constant trait up to rounding
    if rss0 <= n * (64 * np.finfo(float).eps * float(np.max(np.abs(y)))) ** 2:
        return 0.0
    rss1 = rss0 - float(xc @ yc) ** 2 / sxx
    if rss1 <= 1e-12 * rss0:
        return float("inf")
    return max(0.0, 0.5 * n * float(np.log10(rss0 / rss1)))


def single_marker_lod(trait_values, codes: Sequence[str], heterozygote: float = 0.5) -> float | None:
    """LOD score of one marker, capped at ``LOD_CAP``; ``None`` means no test."""
    lod = likelihood_ratio_lod(trait_values, codes, heterozygote)
    return None if lod is None else min(lod, LOD_CAP)


@dataclass
class LodProfile:
    trait: str
    positions: np.ndarray
    lod: np.ndarray
    tested: np.ndarray
    threshold: float = DEFAULT_THRESHOLD
    names: list[str] = field(default_factory=list)
    raw: np.ndarray | None = None  # uncapped scores, used to rank markers

    def __post_init__(self):
        if self.raw is None:
            self.raw = np.asarray(self.lod, dtype=float).copy()

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["marker", "position_cM", "lod"])
        for i, (pos, lod, ok) in enumerate(zip(self.positions, self.lod, self.tested)):
            w.writerow([self._name(i), repr(float(pos)), repr(float(lod)) if ok else ""])
        return buf.getvalue()

    def _name(self, i: int) -> str:
        return self.names[i] if self.names else f"M{i + 1}"


@dataclass(frozen=True)
class QtlHit:
    marker: int
    position: float
    lod: float


def scan(population: MappingPopulation, trait: str | np.ndarray, *, name: str | None = None,
         threshold: float = DEFAULT_THRESHOLD, heterozygote: float = 0.5) -> LodProfile:
    """LOD at every marker of the population's map for one trait.

    ``trait`` is a trait name of the population or an explicit value array
    (e.g. noisy measurements), aligned with the individuals.
    """
    if isinstance(trait, str):
        name = name or trait
        y = population.trait_values(trait)
    else:
        y = np.asarray(trait, dtype=float)
        name = name or "trait"
        if len(y) != len(population):
            raise ValueError(f"{len(y)} trait values for {len(population)} individuals")
    codes = population.code_matrix()
    gmap = population.gmap
    raw = np.zeros(gmap.n_markers)
    tested = np.zeros(gmap.n_markers, dtype=bool)
    for m in range(gmap.n_markers):
        value = likelihood_ratio_lod(y, codes[:, m], heterozygote) if len(y) else None
        if value is not None:
            raw[m], tested[m] = value, True
    return LodProfile(name, gmap.positions.copy(), np.minimum(raw, LOD_CAP), tested,
                      threshold, list(gmap.names), raw)


def prominence(values: np.ndarray, i: int) -> float:
    """Drop from ``values[i]`` to the lowest point on the way to higher ground.

    ``inf`` when no marker on the map scores higher.
    """
    v = values[i]
    best = -np.inf
    for step in (-1, 1):
        j, low = i, v
        while 0 <= j + step < len(values):
            j += step
            low = min(low, values[j])
            if values[j] > v:
                best = max(best, low)
                break
    return float(v - best) if np.isfinite(best) else float("inf")


def detect(profile: LodProfile, threshold: float | None = None,
           peak_drop: float | None = None) -> list[QtlHit]:
    """Peaks of the profile at or above ``threshold``.

    A peak is a local maximum (plateaus report their first marker) that
    stands at least ``peak_drop`` LOD above the valley separating it from any
    higher marker; lesser bumps merge into the neighbouring peak. The drop
    defaults to the threshold. Ranking uses the uncapped scores.
    """
    threshold = profile.threshold if threshold is None else threshold
    peak_drop = threshold if peak_drop is None else peak_drop
    if threshold <= 0 or peak_drop < 0:
        raise ValueError("threshold must be > 0 and peak_drop >= 0")
    raw = np.where(profile.tested, profile.raw, 0.0)
    hits = []
    for i, v in enumerate(raw):
        if v < threshold:
            continue
        if (i > 0 and raw[i - 1] >= v) or (i + 1 < len(raw) and raw[i + 1] > v):
            continue
        if prominence(raw, i) < peak_drop:
            continue
        hits.append(QtlHit(i, float(profile.positions[i]), float(profile.lod[i])))
    return hits


def hits_csv(hits: Sequence[QtlHit], names: Sequence[str] | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["marker", "position_cM", "lod"])
    for h in hits:
        w.writerow([names[h.marker] if names else f"M{h.marker + 1}", repr(h.position), repr(h.lod)])
    return buf.getvalue()


def compare_detection(population: MappingPopulation, parameter_traits: Sequence[str],
                      phenotype_trait: str = "cob_weight",
                      threshold: float = DEFAULT_THRESHOLD) -> dict:
    """Hits per parameter trait versus hits on a phenotypic trait.

    Returns marker-index sets: ``parameters`` (per trait), ``union``,
    ``phenotype``, ``missed`` (union minus phenotype) and ``extra``.
    """
    report = {"parameters": {}, "union": set(), "phenotype": set(), "missed": set(), "extra": set()}
    if len(population) == 0:
        return report
    for trait in parameter_traits:
        markers = {h.marker for h in detect(scan(population, trait, threshold=threshold))}
        report["parameters"][trait] = markers
        report["union"] |= markers
    report["phenotype"] = {h.marker for h in detect(scan(population, phenotype_trait, threshold=threshold))}
    report["missed"] = report["union"] - report["phenotype"]
    report["extra"] = report["phenotype"] - report["union"]
    return report
