"""Cohomology of truncated circle telescopes against their last stage, with timings."""

import argparse
import itertools
import time

from telescoped.simplicial import cohomology
from telescoped.telescope import SphereTelescope, simplicial_model, truncated_telescope
from telescoped.towers import MultiplierSequence


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--degrees", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--max-stages", type=int, default=3)
    ap.add_argument("--dim", type=int, default=1, help="sphere dimension (suspensions for > 1)")
    args = ap.parse_args()
    bad = 0
    for N in range(1, args.max_stages + 1):
        for ks in itertools.product(args.degrees, repeat=N):
            t0 = time.perf_counter()
            model = simplicial_model(SphereTelescope(args.dim, MultiplierSequence(ks, (1,))), N)
            K = truncated_telescope(model, N)
            ours = [str(cohomology(K, q)) for q in range(args.dim + 2)]
            last = [str(cohomology(model.stage(N), q)) for q in range(args.dim + 2)]
            ok = ours == last
            bad += not ok
            print(f"degrees={ks} vertices={len(K.vertices)} H={ours} "
                  f"{'ok' if ok else 'MISMATCH ' + str(last)} {time.perf_counter() - t0:.2f}s")
    return bad


if __name__ == "__main__":
    raise SystemExit(main())
