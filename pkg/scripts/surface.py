"""Cob-weight surface over cob sink and cob sink variation.

Usage: python3 scripts/surface.py [--grid 20] [--out DIR]
"""
import argparse
from pathlib import Path

from greenqtl.config import load_preset
from greenqtl.experiments import run_surface, surface_csv

ap = argparse.ArgumentParser()
ap.add_argument("--grid", type=int, default=20)
ap.add_argument("--out", default="results/surface")
args = ap.parse_args()

cfg = load_preset("surface")
cfg.surface.grid = args.grid
xs, ys, W = run_surface(cfg)
out = Path(args.out)
out.mkdir(parents=True, exist_ok=True)
(out / "surface.csv").write_text(surface_csv(cfg.surface.x, cfg.surface.y, xs, ys, W))
i, j = divmod(int(W.argmax()), W.shape[1])
print(f"argmax at {cfg.surface.x}={xs[i]:.4g} (index {i}), {cfg.surface.y}={ys[j]:.4g} (index {j})")
