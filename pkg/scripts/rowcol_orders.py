"""Mean plain-ROWCOL size per fixed elimination order on path:n."""

import argparse
import random
import statistics

from permsynth.gf2 import Permutation
from permsynth.rowcol import OrderStrategy, rowcol_synth
from permsynth.topology import path_graph


def endpoint_orders(n):
    def rec(lo, hi):
        if lo == hi:
            yield (lo,)
            return
        for rest in rec(lo + 1, hi):
            yield (lo,) + rest
        for rest in rec(lo, hi - 1):
            yield (hi,) + rest

    return sorted(set(rec(0, n - 1)))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()

    g = path_graph(args.n)
    rng = random.Random(args.seed)
    perms = [Permutation.random(args.n, rng) for _ in range(args.samples)]
    rows = []
    for order in endpoint_orders(args.n):
        sizes = [rowcol_synth(g, p, OrderStrategy.fixed(order), 1).size for p in perms]
        rows.append((statistics.fmean(sizes), order))
    rows.sort()
    print("order,mean_size")
    for mean, order in rows:
        print(f"\"{','.join(map(str, order))}\",{mean:.3f}")


if __name__ == "__main__":
    main()
