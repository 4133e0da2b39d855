"""Command line entry point: ``greenqtl <command> [options]``."""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from . import experiments as ex
from .config import ConfigError, ExperimentConfig, load, load_preset, preset_names
from .growth import INTEGER_TRAITS, TRAIT_NAMES
from .qtl import hits_csv

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2


def _assignment(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        number = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{name}: {value!r} is not a number") from None
    return name.strip(), number


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--config", metavar="PATH", help="YAML experiment file")
    src.add_argument("--preset", metavar="NAME",
                     help=f"packaged experiment ({', '.join(preset_names())})")
    common.add_argument("--seed", type=int, help="master seed (overrides the config)")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides the config)")

    parser = argparse.ArgumentParser(prog="greenqtl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="grow one plant, write the series CSV")
    p.add_argument("--set", dest="traits", action="append", type=_assignment, default=[],
                   metavar="TRAIT=VALUE", help="override a genetic trait")
    p.add_argument("--constant", dest="constants", action="append", type=_assignment, default=[],
                   metavar="NAME=VALUE", help="override a growth constant")

    p = sub.add_parser("population", parents=[common], help="build the RIL population files")
    p.add_argument("--size", type=int)
    p.add_argument("--generations", type=int)

    p = sub.add_parser("qtl", parents=[common], help="single-marker scans and QTL hits")
    p.add_argument("--trait", dest="traits", action="append", metavar="NAME",
                   help="trait to scan (repeatable); defaults to the config list")
    p.add_argument("--noisy", action="append", metavar="NAME",
                   help="trait measured with noise (repeatable)")
    p.add_argument("--cv", type=float, help="noise coefficient of variation")
    p.add_argument("--threshold", type=float)
    p.add_argument("--size", type=int)

    p = sub.add_parser("optimize", parents=[common], help="GA ideotype search")
    p.add_argument("--generations", type=int)
    p.add_argument("--population-size", type=int)

    p = sub.add_parser("surface", parents=[common], help="cob weight over two parameters")
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--grid", type=int)
    return parser


def _resolve(args) -> ExperimentConfig:
    if args.config:
        config = load(args.config)
    else:
        config = load_preset(args.preset or "reference")
    if args.seed is not None:
        config.seed = args.seed
    if args.out is not None:
        config.out = args.out
    cmd = args.command
    if cmd == "simulate":
        traits = dict(config.growth.traits)
        for name, value in args.traits:
            if name not in TRAIT_NAMES:
                raise ConfigError(f"--set: unknown trait {name!r}")
            traits[name] = int(value) if name in INTEGER_TRAITS and value == int(value) else value
        constants = dict(config.growth.constants)
        constants.update(args.constants)
        config.growth = dataclasses.replace(config.growth, traits=traits, constants=constants)
    if cmd in ("population", "qtl"):
        if args.size is not None:
            config.population.size = args.size
        if getattr(args, "generations", None) is not None:
            config.population.generations = args.generations
    if cmd == "qtl":
        if args.traits:
            config.qtl.traits = args.traits
        if args.noisy:
            config.qtl.noisy_traits = args.noisy
        if args.cv is not None:
            config.noise.cv = args.cv
        if args.threshold is not None:
            config.qtl.threshold = args.threshold
    if cmd == "optimize":
        if args.generations is not None:
            config.ga.generations = args.generations
        if args.population_size is not None:
            config.ga.population_size = args.population_size
    if cmd == "surface":
        for key in ("x", "y", "grid"):
            if getattr(args, key) is not None:
                setattr(config.surface, key, getattr(args, key))
    # re-run validation on the final document
    from .config import parse
    return parse(config.dump(), "<resolved config>")


def _write(out: Path, name: str, text: str) -> None:
    (out / name).write_text(text)


def run(args) -> int:
    config = _resolve(args)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    _write(out, "config.yaml", config.dump())
    constants = config.constants()
    cmd = args.command

    if cmd == "simulate":
        series = ex.run_simulate(config, constants)
        _write(out, "series.csv", series.to_csv())
        print(f"final cob weight: {series.final_cob_weight:.3f} g")

    elif cmd == "population":
        pop = ex.build_population(config, constants)
        _write(out, "map.csv", pop.gmap.to_csv())
        _write(out, "genotypes.csv", pop.genotype_csv())
        _write(out, "phenotypes.csv", pop.phenotype_csv())
        print(f"{len(pop)} lines, F{pop.generation}, heterozygosity {pop.heterozygosity():.4f}")

    elif cmd == "qtl":
        pop = ex.build_population(config, constants)
        scans = ex.run_qtl(config, pop)
        for s in scans:
            _write(out, f"lod_{s.trait}.csv", s.profile.to_csv())
            _write(out, f"hits_{s.trait}.csv", hits_csv(s.hits, pop.gmap.names))
            print(f"{s.trait}: {len(s.hits)} hits, loci {ex.hit_loci(s.hits, pop)}")
        _write(out, "qtl_summary.csv", ex.summary_csv(scans, pop))

    elif cmd == "optimize":
        result, rep = ex.run_optimize(config, constants)
        _write(out, "history.csv", result.history_csv())
        _write(out, "ideotype.csv", rep.to_csv())
        for row in rep.rows:
            print(f"{row['parameter']:<22} {row['optimal']:>10.4g}  {row['boundary_flag']}")
        print(f"cob weight {rep.reference_cob_weight:.1f} g -> {rep.optimized_cob_weight:.1f} g "
              f"(x{rep.gain:.3f})")

    elif cmd == "surface":
        xs, ys, W = ex.run_surface(config, constants)
        _write(out, "surface.csv", ex.surface_csv(config.surface.x, config.surface.y, xs, ys, W))
        i, j = divmod(int(W.argmax()), W.shape[1])
        print(f"max {W[i, j]:.1f} g at {config.surface.x}={xs[i]:.4g}, {config.surface.y}={ys[j]:.4g}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except ConfigError as err:
        print(f"greenqtl: config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, KeyError, OSError) as err:
        print(f"greenqtl: error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
