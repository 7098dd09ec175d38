"""CNOT-depth vs SWAP-depth optima on path:8 over sampled permutations.

By default decides "CNOT depth < 3 * SWAP depth" with one bounded query per
permutation; ``--full`` computes the exact CNOT-depth optimum instead (slow).
"""

import argparse
import csv
import random
import sys
from collections import Counter

from permsynth.gf2 import Permutation
from permsynth.optimal import decide_bound, exact_synth
from permsynth.topology import path_graph


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--samples", type=int, default=500)
    ap.add_argument("--seed", type=int, default=2026)
    ap.add_argument("--full", action="store_true")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    g = path_graph(args.n)
    rng = random.Random(args.seed)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["perm", "swap_depth", "cnot_depth", "cnot_better"])
    better, hist = 0, Counter()
    for _ in range(args.samples):
        p = Permutation.random(args.n, rng)
        s = exact_synth(g, p, "swap", "depth").optimum
        if args.full:
            c = exact_synth(g, p, "cnot", "depth").optimum
            wins = c < 3 * s
            hist[c] += 1
        else:
            c = ""
            wins = s > 0 and decide_bound(g, p, "cnot", "depth", 3 * s - 1) is not None
        better += wins
        w.writerow([str(p), s, c, int(wins)])
        out.flush()
    print(f"cnot strictly better on {better}/{args.samples}", file=sys.stderr)
    if hist:
        print("cnot depth histogram", dict(sorted(hist.items())), file=sys.stderr)


if __name__ == "__main__":
    main()
