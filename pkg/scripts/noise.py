"""Effect of 15 % measurement noise on detection for internode sink variation.

Usage: python3 scripts/noise.py [--replicates 20] [--out DIR]
"""
import argparse
import csv
import dataclasses
from pathlib import Path

from greenqtl.config import load_preset
from greenqtl.experiments import build_population, run_qtl

ap = argparse.ArgumentParser()
ap.add_argument("--replicates", type=int, default=20)
ap.add_argument("--out", default="results/noise")
args = ap.parse_args()

cfg = load_preset("noise")
constants = cfg.constants()
trait = cfg.qtl.noisy_traits[0]
out = Path(args.out)
out.mkdir(parents=True, exist_ok=True)
fewer = 0
with open(out / "replicates.csv", "w", newline="") as fh:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["seed", "hits_noiseless", "hits_noisy"])
    for seed in range(args.replicates):
        cfg.seed = seed
        pop = build_population(cfg, constants)
        noisy = run_qtl(cfg, pop, [trait])[0]
        clean = run_qtl(dataclasses.replace(cfg, noise=dataclasses.replace(cfg.noise, cv=0.0)),
                        pop, [trait])[0]
        fewer += len(noisy.hits) < len(clean.hits)
        w.writerow([seed, len(clean.hits), len(noisy.hits)])
print(f"noisy scan found fewer QTL in {fewer}/{args.replicates} replicates")
