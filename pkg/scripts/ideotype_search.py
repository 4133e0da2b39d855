"""GA ideotype search repeated over several seeds.

Usage: python3 scripts/ideotype_search.py [--seeds 5] [--generations N] [--out DIR]
"""
import argparse
import csv
from pathlib import Path

from greenqtl.config import load_preset
from greenqtl.experiments import run_optimize

ap = argparse.ArgumentParser()
ap.add_argument("--seeds", type=int, default=5)
ap.add_argument("--generations", type=int, default=None)
ap.add_argument("--out", default="results/ideotype")
args = ap.parse_args()

cfg = load_preset("ideotype")
if args.generations:
    cfg.ga.generations = args.generations
constants = cfg.constants()
out = Path(args.out)
out.mkdir(parents=True, exist_ok=True)
rows = []
for seed in range(args.seeds):
    cfg.seed = seed
    result, rep = run_optimize(cfg, constants)
    (out / f"ideotype_seed{seed}.csv").write_text(rep.to_csv())
    (out / f"history_seed{seed}.csv").write_text(result.history_csv())
    rows.append([seed, f"{rep.gain:.4f}"] + [rep.flags()[p] for p in cfg.ga.parameters])
    print(seed, f"gain x{rep.gain:.3f}", rep.flags())
with open(out / "flags.csv", "w", newline="") as fh:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["seed", "gain"] + list(cfg.ga.parameters))
    w.writerows(rows)
