"""Table of Milnor data and sample coboundary verdicts for circle telescopes of degree p."""

import argparse

from telescoped.telescope import borsuk_eilenberg


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", type=int, nargs="+", default=[2, 3, 5, 7, 11])
    ap.add_argument("--depth", type=int, default=16)
    args = ap.parse_args()
    print(f"{'p':>3}  {'H^2 lim^1':<10} {'H^2 lim':<8} {'Ext':<11} {'all-ones cocycle':<18} value")
    for p in args.primes:
        r = borsuk_eilenberg(p, args.depth)
        m = r["milnor_q2"]
        cob = r["sample_cocycle"]["coboundary"]
        ext = "nontrivial" if r["ext_nontrivial"] else "trivial"
        print(f"{p:>3}  {m['asymptotic']['status']:<10} {m['weak']['group']:<8} {ext:<11} "
              f"{cob['verdict']:<18} {cob['certificate'].get('value', '')}")


if __name__ == "__main__":
    main()
