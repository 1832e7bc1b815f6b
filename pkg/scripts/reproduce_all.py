"""Run every shipped config and write its outputs under out/<config name>/."""

import argparse
from pathlib import Path

from preisach_ff import experiments

ROOT = Path(__file__).resolve().parents[1]
KIND = {"sweep": "sweep", "zigzag": "compensate", "chirp": "compensate",
        "constant": "compensate", "frf": "frf", "hysteron": "hysteron"}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=ROOT / "out")
    ap.add_argument("--only", nargs="*", help="config stems to run, e.g. zigzag_uniform")
    args = ap.parse_args()
    for path in sorted((ROOT / "configs").glob("*.ini")):
        if args.only and path.stem not in args.only:
            continue
        kind = KIND[path.stem.split("_")[0]]
        rec = experiments.run(kind, experiments.ExperimentConfig.load(path), args.out / path.stem)
        print(f"{path.stem} ({kind})")
        for key, value in rec.metrics.items():
            print(f"  {key} = {value}")


if __name__ == "__main__":
    main()
