"""Steady per-cycle peak error at 0.5 Hz for a range of integral gains."""

import argparse
from pathlib import Path

from preisach_ff.experiments import ExperimentConfig, run_compensation

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def cycle_peak(K, kind, interpolate, n):
    cfg = ExperimentConfig.load(CONFIGS / f"zigzag_{kind}.ini")
    cfg.signal.kind, cfg.signal.amplitude = "sine", 0.9
    cfg.signal.freq_hz, cfg.signal.duration = 0.5, 4.0
    cfg.controller.K = K
    cfg.mesh.interpolate, cfg.mesh.n = interpolate, n
    cfg.output.record_every = 100
    return run_compensation(cfg).cycles[-1, 1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gains", type=float, nargs="+", default=[3000, 6000, 12000, 24000])
    ap.add_argument("--n", type=int, default=400)
    args = ap.parse_args()
    for kind in ("uniform", "gaussian"):
        for interpolate in (False, True):
            peaks = [cycle_peak(K, kind, interpolate, args.n) for K in args.gains]
            mode = "sub-cell" if interpolate else "quantized"
            cells = "  ".join(f"K={K:g}: {p:.2e}" for K, p in zip(args.gains, peaks))
            print(f"{kind:8s} {mode:9s} {cells}")


if __name__ == "__main__":
    main()
