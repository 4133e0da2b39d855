"""Parameter scans versus cob-weight scan under the pleiotropic matrix.

Usage: python3 scripts/pleiotropy.py [--seeds N] [--out DIR]
Writes one row per seed with the hit loci per trait.
"""
import argparse
import csv
from pathlib import Path

from greenqtl.config import load_preset
from greenqtl.experiments import build_population, hit_loci, run_qtl
from greenqtl.growth import TRAIT_NAMES

ap = argparse.ArgumentParser()
ap.add_argument("--seeds", type=int, default=10)
ap.add_argument("--out", default="results/pleiotropy")
args = ap.parse_args()

cfg = load_preset("pleiotropy")
constants = cfg.constants()
traits = list(TRAIT_NAMES[:4]) + ["cob_weight"]
out = Path(args.out)
out.mkdir(parents=True, exist_ok=True)
with open(out / "seeds.csv", "w", newline="") as fh:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["seed"] + traits + ["union_size", "cob_hits"])
    for seed in range(args.seeds):
        cfg.seed = seed
        pop = build_population(cfg, constants)
        scans = run_qtl(cfg, pop, traits)
        union = set().union(*({h.marker for h in s.hits} for s in scans[:4]))
        w.writerow([seed] + [" ".join(map(str, hit_loci(s.hits, pop))) for s in scans]
                   + [len(union), len(scans[-1].hits)])
        print(seed, [hit_loci(s.hits, pop) for s in scans], len(union), len(scans[-1].hits))
