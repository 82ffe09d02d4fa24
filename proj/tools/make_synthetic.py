"""Writes a small clustered implicit-feedback dataset in generic-tsv layout."""

import argparse
import random


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--users", type=int, default=50)
    ap.add_argument("--items", type=int, default=80)
    ap.add_argument("--per-user", type=int, default=20)
    ap.add_argument("--clusters", type=int, default=4)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    items_per_cluster = args.items // args.clusters
    ts = 1_000_000
    with open(args.out, "w") as f:
        for u in range(args.users):
            c = u % args.clusters
            home = list(range(c * items_per_cluster, (c + 1) * items_per_cluster))
            chosen = set()
            while len(chosen) < args.per_user:
                if rng.random() < 0.8:
                    chosen.add(rng.choice(home))
                else:
                    chosen.add(rng.randrange(args.items))
            for i in sorted(chosen):
                ts += rng.randrange(1, 100)
                rating = rng.choice([3, 4, 5, 5])
                f.write(f"u{u}\ti{i}\t{rating}\t{ts}\n")


if __name__ == "__main__":
    main()
