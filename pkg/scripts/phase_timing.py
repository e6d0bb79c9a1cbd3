"""Share of runtime spent in each learning phase on Asia samples.

    python scripts/phase_timing.py [--sizes 1000,10000,100000] [--seed 1]
"""

import argparse

from saiyanh import forward_sample, learn, load_network


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--sizes", default="1000,10000,100000")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--net", default="asia")
    args = p.parse_args()
    model = load_network(args.net)
    print(f"{'n':>8}{'phase1':>9}{'phase2':>9}{'phase3':>9}{'total_s':>9}")
    for n in map(int, args.sizes.split(",")):
        r = learn(forward_sample(model, n, args.seed))
        f = r.timing.fractions
        print(f"{n:>8}{f[0]:9.3f}{f[1]:9.3f}{f[2]:9.3f}{r.timing.total_s:9.2f}")


if __name__ == "__main__":
    main()
