"""How often does hill climbing from a random spanning tree reach the best
connected DAG? Exhaustive check on 3 binary variables.

    python scripts/hill_climb_optimum_rate.py [--seeds 100] [--strength 2.5]
"""

import argparse
import math
import random
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from oracles import connected_dags, loglik_rows  # noqa: E402
from saiyanh.data import Dataset, Variable  # noqa: E402
from saiyanh.graph import Dag  # noqa: E402
from saiyanh.score import ScoreContext  # noqa: E402
from saiyanh.search import hill_climb  # noqa: E402

NAMES = ("V0", "V1", "V2")


def sample(seed, strength):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(50, 500))
    x = np.zeros((n, 3), dtype=np.int64)
    for v in range(3):
        parents = [p for p in range(v) if p == v - 1 or rng.random() < 0.3]
        logit = rng.normal(0, 0.5) + sum(rng.normal(0, strength) * (2 * x[:, p] - 1) for p in parents)
        x[:, v] = rng.random(n) < 1 / (1 + np.exp(-logit))
    return Dataset(tuple(Variable(v, ("0", "1")) for v in NAMES), x)


def bic(d, adj):
    parents = {v: [p for p in range(3) if adj[p][v]] for v in range(3)}
    k = sum(2 ** len(ps) for ps in parents.values())
    return loglik_rows(d.codes.tolist(), parents) - math.log2(d.n) / 2 * k


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--strength", type=float, default=2.5)
    args = p.parse_args()
    dags = connected_dags(3)
    hits = 0
    for seed in range(args.seeds):
        d = sample(seed, args.strength)
        rng = random.Random(seed)
        hub = rng.randrange(3)
        edges = [(NAMES[hub], NAMES[o]) if rng.random() < 0.5 else (NAMES[o], NAMES[hub])
                 for o in range(3) if o != hub]
        out = hill_climb(Dag(NAMES, edges), ScoreContext(d)).dag
        adj = [[int(out.has_directed(a, b)) for b in NAMES] for a in NAMES]
        hits += abs(bic(d, adj) - max(bic(d, m) for m in dags)) < 1e-8
    print(f"optimum reached in {hits}/{args.seeds} seeds ({hits / args.seeds:.0%})")


if __name__ == "__main__":
    main()
