"""Cob-weight scan when every parameter has its own gene.

Usage: python3 scripts/diagonal.py [--seeds N] [--size N] [--out DIR]
"""
import argparse
import csv
from pathlib import Path

from greenqtl.config import load_preset
from greenqtl.experiments import build_population, hit_loci, run_qtl

ap = argparse.ArgumentParser()
ap.add_argument("--seeds", type=int, default=3)
ap.add_argument("--size", type=int, default=None)
ap.add_argument("--out", default="results/diagonal")
args = ap.parse_args()

cfg = load_preset("diagonal")
if args.size:
    cfg.population.size = args.size
constants = cfg.constants()
out = Path(args.out)
out.mkdir(parents=True, exist_ok=True)
with open(out / "seeds.csv", "w", newline="") as fh:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["seed", "size", "loci_detected", "n_parameter_loci"])
    for seed in range(args.seeds):
        cfg.seed = seed
        pop = build_population(cfg, constants)
        loci = [g for g in hit_loci(run_qtl(cfg, pop, ["cob_weight"])[0].hits, pop) if g <= 12]
        w.writerow([seed, cfg.population.size, " ".join(map(str, loci)), len(loci)])
        print(seed, loci, len(loci))
