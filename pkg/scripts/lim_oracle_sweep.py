"""Compare lim of random periodic towers with brute-force thread enumeration.

Prints agreement counts and the rate at which the enumeration cannot decide.

    python scripts/lim_oracle_sweep.py --towers 500 --seed 0
"""

import argparse
import os
import random
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "tests"))

from conftest import random_periodic_tower  # noqa: E402
from oracles import brute_force_lim  # noqa: E402

from telescoped.towers import lim  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--towers", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--depth", type=int, default=20)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    agree = undetermined = 0
    mismatches = []
    t0 = time.perf_counter()
    for i in range(args.towers):
        T, G, Phi = random_periodic_tower(rng)
        expected = brute_force_lim(list(G.invariant_factors), G.free_rank, Phi, depth=args.depth)
        if expected is None:
            undetermined += 1
            continue
        got = lim(T).group
        if (got.free_rank, got.invariant_factors) == expected:
            agree += 1
        else:
            mismatches.append((i, str(G), Phi, str(got), expected))
    dt = time.perf_counter() - t0
    print(f"towers={args.towers} agree={agree} undetermined={undetermined} "
          f"mismatch={len(mismatches)} seconds={dt:.1f}")
    for m in mismatches:
        print("mismatch", *m)
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
