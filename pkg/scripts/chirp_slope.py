"""Per-cycle peak tracking error of the chirp runs and its dB/decade slope."""

import argparse
from pathlib import Path

import numpy as np

from preisach_ff.experiments import ExperimentConfig, run_compensation

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--interpolate", action="store_true", help="use the sub-cell model")
    ap.add_argument("--n", type=int, help="mesh size override")
    args = ap.parse_args()
    for kind in ("uniform", "gaussian"):
        cfg = ExperimentConfig.load(CONFIGS / f"chirp_{kind}.ini")
        cfg.mesh.interpolate = args.interpolate
        if args.n:
            cfg.mesh.n = args.n
        rec = run_compensation(cfg)
        nu, eps = rec.cycles.T
        print(f"{kind}: slope {rec.metrics['eps_slope_db_per_decade']:.2f} dB/dec "
              f"over {len(nu)} cycles")
        # one line per decade band
        for lo in (0.1, 1.0):
            band = (nu >= lo) & (nu < 10 * lo)
            if band.any():
                print(f"  nu in [{lo:g}, {10 * lo:g}) Hz: eps {eps[band].min():.2e} .. "
                      f"{eps[band].max():.2e}")


if __name__ == "__main__":
    main()
