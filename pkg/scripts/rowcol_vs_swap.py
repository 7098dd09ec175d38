"""How often ROWCOL(-hybrid) beats 3 * (SWAP-size optimum) CNOTs on path:n."""

import argparse
import random

from permsynth.gf2 import Permutation
from permsynth.optimal import exact_synth
from permsynth.rowcol import OrderStrategy, rowcol_synth
from permsynth.topology import path_graph


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=88)
    ap.add_argument("--threshold", type=int, default=4, help="1 disables the exact finish")
    args = ap.parse_args()

    g = path_graph(args.n)
    rng = random.Random(args.seed)
    wins = ties = 0
    for i in range(args.samples):
        p = Permutation.random(args.n, rng)
        rc = rowcol_synth(g, p, OrderStrategy.exhaustive(), args.threshold).size
        sw = 3 * exact_synth(g, p, "swap", "size").optimum
        wins += rc < sw
        ties += rc == sw
        if (i + 1) % 100 == 0:
            print(f"{i + 1}: win rate {wins / (i + 1):.3f}", flush=True)
    print(f"wins {wins}, ties {ties}, losses {args.samples - wins - ties} of {args.samples}")


if __name__ == "__main__":
    main()
