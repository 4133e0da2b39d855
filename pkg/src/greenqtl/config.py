"""YAML experiment configuration with line-addressed validation."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .ga import GaConfig
from .genetics import TRAIT_HALF_RANGE, GeneEffectMap, GeneticMap, pleiotropic_matrix
from .growth import (REFERENCE_COB_WEIGHT, TRAIT_NAMES, GeneticTraits, GrowthConstants,
                     calibrate_E)
from .qtl import DEFAULT_THRESHOLD

MATRIX_PRESETS = ("pleiotropic", "diagonal")


class ConfigError(ValueError):
    pass


@dataclass
class GrowthBlock:
    calibrate_to: float | None = REFERENCE_COB_WEIGHT
    constants: dict[str, Any] = field(default_factory=dict)
    traits: dict[str, Any] = field(default_factory=dict)


@dataclass
class MapBlock:
    n_loci: int = 15
    qtl_spacing: int = 4
    marker_spacing: float = 10.0


@dataclass
class MatrixBlock:
    preset: str | None = "diagonal"
    rows: list[list[float]] | None = None
    spread: list[float] | None = None


@dataclass
class PopulationBlock:
    size: int = 250
    generations: int = 6


@dataclass
class NoiseBlock:
    cv: float = 0.0


@dataclass
class QtlBlock:
    traits: list[str] = field(default_factory=lambda: ["cob_weight"])
    noisy_traits: list[str] = field(default_factory=list)
    threshold: float = DEFAULT_THRESHOLD
    peak_drop: float | None = None
    heterozygote: float = 0.5


@dataclass
class GaBlock:
    population_size: int = 60
    generations: int = 100
    crossover_prob: float = 0.8
    mutation_prob: float = 0.05
    levels: int = 16
    elitism: int = 1
    parameters: list[str] = field(default_factory=lambda: list(TRAIT_NAMES))


@dataclass
class SurfaceBlock:
    x: str = "cob_sink"
    y: str = "cob_sink_var"
    grid: int = 20


@dataclass
class ExperimentConfig:
    name: str = "reference"
    seed: int = 0
    out: str = "results"
    growth: GrowthBlock = field(default_factory=GrowthBlock)
    map: MapBlock = field(default_factory=MapBlock)
    matrix: MatrixBlock = field(default_factory=MatrixBlock)
    population: PopulationBlock = field(default_factory=PopulationBlock)
    noise: NoiseBlock = field(default_factory=NoiseBlock)
    qtl: QtlBlock = field(default_factory=QtlBlock)
    ga: GaBlock = field(default_factory=GaBlock)
    surface: SurfaceBlock = field(default_factory=SurfaceBlock)

    # builders; each raises ConfigError on invalid content

    def traits(self) -> GeneticTraits:
        try:
            return GeneticTraits().replace(**self.growth.traits)
        except (TypeError, ValueError) as err:
            raise ConfigError(f"growth.traits: {err}") from None

    def constants(self) -> GrowthConstants:
        try:
            c = GrowthConstants().replace(**self.growth.constants)
            if self.growth.calibrate_to is not None:
                # E is anchored on the reference genotype, not on overrides
                c = calibrate_E(GeneticTraits(), c, target=self.growth.calibrate_to)
            return c
        except (TypeError, ValueError) as err:
            raise ConfigError(f"growth: {err}") from None

    def genetic_map(self) -> GeneticMap:
        m = self.map
        try:
            return GeneticMap.regular(m.n_loci, m.qtl_spacing, m.marker_spacing)
        except ValueError as err:
            raise ConfigError(f"map: {err}") from None

    def effects(self) -> GeneEffectMap:
        n = self.map.n_loci
        mx = self.matrix
        if mx.rows is not None:
            A = np.asarray(mx.rows, dtype=float)
        elif mx.preset == "pleiotropic":
            A = pleiotropic_matrix(n)
        else:
            A = np.zeros((len(TRAIT_NAMES), n))
            A[np.arange(len(TRAIT_NAMES)), np.arange(len(TRAIT_NAMES))] = 1.0
        try:
            return GeneEffectMap.from_matrix(A, self.traits(), mx.spread)
        except ValueError as err:
            raise ConfigError(f"matrix: {err}") from None

    def ga_config(self) -> GaConfig:
        try:
            return GaConfig(seed=self.seed, reference=self.traits(),
                            half_range=dict(TRAIT_HALF_RANGE),
                            **{k: v for k, v in dataclasses.asdict(self.ga).items()})
        except (TypeError, ValueError) as err:
            raise ConfigError(f"ga: {err}") from None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


_BLOCKS = {f.name: f.default_factory for f in dataclasses.fields(ExperimentConfig)
           if f.default_factory is not dataclasses.MISSING}


def _node_line(node) -> int:
    return node.start_mark.line + 1


def _plain(node) -> Any:
    return yaml.safe_load(yaml.serialize(node))


def _check_type(path: str, value: Any, expected: Any, line: int) -> Any:
    """Coerce/validate a scalar or list against a dataclass field annotation."""
    kind = str(expected)
    where = f"line {line}: {path}"
    if value is None:
        if "None" in kind:
            return None
        raise ConfigError(f"{where}: value required")
    if kind.startswith("list"):
        if not isinstance(value, list):
            raise ConfigError(f"{where}: expected a list")
        if "list[float]" in kind and "list[list" not in kind:
            return [_number(where, v) for v in value]
        if "list[list" in kind:
            if not all(isinstance(r, list) for r in value):
                raise ConfigError(f"{where}: expected a list of rows")
            return [[_number(where, v) for v in r] for r in value]
        if not all(isinstance(v, str) for v in value):
            raise ConfigError(f"{where}: expected a list of names")
        return value
    if kind.startswith("dict"):
        if not isinstance(value, dict):
            raise ConfigError(f"{where}: expected a mapping")
        return value
    if kind.startswith("int"):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if kind.startswith("float"):
        return _number(where, value)
    if kind.startswith("str"):
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
        return value
    return value


def _number(where: str, v: Any) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {v!r}")
    return float(v)


def _mapping(node, path: str) -> dict:
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError(f"line {_node_line(node)}: {path or 'document'}: expected a mapping")
    out = {}
    for key, value in node.value:
        k = key.value
        if k in out:
            raise ConfigError(f"line {_node_line(key)}: {path + '.' if path else ''}{k}: duplicate key")
        out[k] = (key, value)
    return out


def _build(cls, node, path: str):
    entries = _mapping(node, path)
    fields = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for k, (key, value) in entries.items():
        sub = f"{path}.{k}" if path else k
        if k not in fields:
            raise ConfigError(f"line {_node_line(key)}: unknown key {sub!r}; "
                              f"expected one of {sorted(fields)}")
        if k in _BLOCKS and cls is ExperimentConfig:
            kwargs[k] = _build(type(_BLOCKS[k]()), value, sub)[0]
        else:
            kwargs[k] = _check_type(sub, _plain(value), fields[k].type, _node_line(value))
    return cls(**kwargs), entries


def parse(text: str, source: str = "<config>") -> ExperimentConfig:
    """Parse and validate a YAML document; errors name the source line."""
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as err:
        mark = getattr(err, "problem_mark", None)
        line = f"line {mark.line + 1}: " if mark else ""
        raise ConfigError(f"{source}: {line}invalid YAML ({getattr(err, 'problem', err)})") from None
    if root is None:
        return ExperimentConfig()
    try:
        config, entries = _build(ExperimentConfig, root, "")
        _validate(config, entries)
    except ConfigError as err:
        raise ConfigError(f"{source}: {err}") from None
    return config


def _line_of(entries: dict, block: str, *keys: str) -> int:
    """Source line of ``block.key1.key2...``, falling back to the deepest found."""
    if block not in entries:
        return 1
    line = _node_line(entries[block][0])
    node = entries[block][1]
    for key in keys:
        if key is None or not isinstance(node, yaml.MappingNode):
            break
        for k, v in node.value:
            if k.value == key:
                line, node = _node_line(v), v
                break
        else:
            break
    return line


def _validate(c: ExperimentConfig, entries: dict) -> None:
    def fail(block, key, msg, item=None):
        path = ".".join(p for p in (block, key, item) if p)
        raise ConfigError(f"line {_line_of(entries, block, key, item)}: {path}: {msg}")

    for name, value in c.growth.traits.items():
        if name not in TRAIT_NAMES:
            fail("growth", "traits", "unknown trait", name)
        try:
            GeneticTraits().replace(**{name: value})
        except (TypeError, ValueError) as err:
            fail("growth", "traits", str(err), name)
    known = {f.name for f in dataclasses.fields(GrowthConstants)}
    for name, value in c.growth.constants.items():
        if name not in known:
            fail("growth", "constants", "unknown constant", name)
        try:
            GrowthConstants().replace(**{name: value})
        except (TypeError, ValueError) as err:
            fail("growth", "constants", str(err), name)
    if c.growth.calibrate_to is not None and not c.growth.calibrate_to > 0:
        fail("growth", "calibrate_to", "must be > 0")
    try:
        c.traits()
    except ConfigError as err:
        fail("growth", "traits", str(err).removeprefix("growth.traits: "))
    try:
        GrowthConstants().replace(**c.growth.constants)
    except (TypeError, ValueError) as err:
        fail("growth", "constants", str(err))
    if c.map.n_loci < 1 or c.map.qtl_spacing < 1 or not c.map.marker_spacing > 0:
        fail("map", None, "n_loci, qtl_spacing and marker_spacing must be positive")
    if c.matrix.rows is None:
        if c.matrix.preset not in MATRIX_PRESETS:
            fail("matrix", "preset", f"unknown preset {c.matrix.preset!r}; choose from {MATRIX_PRESETS}")
        if c.map.n_loci < len(TRAIT_NAMES):
            fail("map", "n_loci", f"presets need at least {len(TRAIT_NAMES)} loci")
    else:
        shape = np.shape(c.matrix.rows)
        if shape != (len(TRAIT_NAMES), c.map.n_loci):
            fail("matrix", "rows", f"expected {len(TRAIT_NAMES)} rows of {c.map.n_loci} weights, got shape {shape}")
    if c.matrix.spread is not None and len(c.matrix.spread) != c.map.n_loci:
        fail("matrix", "spread", f"expected {c.map.n_loci} values")
    try:
        c.effects()
    except ConfigError as err:
        fail("matrix", None, str(err).removeprefix("matrix: "))
    if c.population.size < 0:
        fail("population", "size", "must be >= 0")
    if c.population.generations < 2:
        fail("population", "generations", "must be >= 2")
    if c.noise.cv < 0:
        fail("noise", "cv", "must be >= 0")
    allowed = set(TRAIT_NAMES) | {"cob_weight"}
    for key in ("traits", "noisy_traits"):
        for name in getattr(c.qtl, key):
            if name not in allowed:
                fail("qtl", key, f"unknown trait {name!r}")
    if not c.qtl.threshold > 0:
        fail("qtl", "threshold", "must be > 0")
    if c.qtl.peak_drop is not None and c.qtl.peak_drop < 0:
        fail("qtl", "peak_drop", "must be >= 0")
    try:
        c.ga_config()
    except ConfigError as err:
        msg = str(err).removeprefix("ga: ")
        key = next((f.name for f in dataclasses.fields(c.ga) if msg.startswith(f.name)), None)
        fail("ga", key, msg)
    from .growth import SURFACE_PARAMETERS
    for key in ("x", "y"):
        if getattr(c.surface, key) not in SURFACE_PARAMETERS:
            fail("surface", key, f"must be one of {SURFACE_PARAMETERS}")
    if c.surface.x == c.surface.y:
        fail("surface", "y", "must differ from x")
    if c.surface.grid < 2:
        fail("surface", "grid", "must be >= 2")
    if c.seed < 0:
        fail("seed", None, "must be >= 0")


def load(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigError(f"{path}: {err.strerror}") from None
    return parse(text, str(path))


def preset_names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("greenqtl.presets").iterdir()
                  if p.name.endswith(".yaml"))


def load_preset(name: str) -> ExperimentConfig:
    res = resources.files("greenqtl.presets") / f"{name}.yaml"
    if not res.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {preset_names()}")
    return parse(res.read_text(), f"preset:{name}")
