"""Run the desk-scale benchmark and print mean metrics per (network, size).

    python scripts/desk_benchmark.py [--manifest M] [--out results.csv] [--jobs 4]
"""

import argparse
import csv
import statistics
from collections import defaultdict
from pathlib import Path

from saiyanh.cli import RunConfig, cmd_benchmark

HERE = Path(__file__).parent


def summarise(rows):
    groups = defaultdict(list)
    for row in rows:
        groups[(row["case"], int(row["n"]))].append(row)
    print(f"{'case':<10}{'n':>8}{'f1':>8}{'shd':>8}{'bsf':>8}{'phase2':>8}{'runtime':>9}")
    for (case, n), group in sorted(groups.items()):
        done = [r for r in group if r["f1"] != "n/a"]
        if not done:
            print(f"{case:<10}{n:>8}{'n/a':>8}")
            continue

        def mean(col):
            return statistics.fmean(float(r[col]) for r in done)

        print(f"{case:<10}{n:>8}{mean('f1'):8.3f}{mean('shd'):8.2f}{mean('bsf'):8.3f}"
              f"{mean('phase2_frac'):8.2f}{mean('runtime_s'):9.2f}")


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--manifest", type=Path, default=HERE / "desk_manifest.json")
    p.add_argument("--out", type=Path, default=Path("desk_results.csv"))
    p.add_argument("--timeout", type=float, default=600)
    p.add_argument("--jobs", type=int, default=1)
    args = p.parse_args()
    cmd_benchmark(RunConfig("benchmark", manifest=args.manifest, out=args.out,
                            timeout=args.timeout, jobs=args.jobs))
    with open(args.out, newline="") as fh:
        summarise(list(csv.DictReader(fh)))


if __name__ == "__main__":
    main()
