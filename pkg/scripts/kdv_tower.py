"""Build the sh-Lie tower of the KdV-type bracket E(a) * d/dx E(b) dx and verify it.

    python3 scripts/kdv_tower.py [--order 12] [--kmax 3] [--trials 25] [--seed 8] [--out tower.json]

Prints timings, the Poisson conditions, tower sizes and the verification report.
"""

import argparse
import time

from jetlift.randgen import FunctionConfig
from jetlift.serialize import dumps
from jetlift.shlie import build_tower, check_poisson_conditions, kdv_bracket, verify_shlie


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--order", type=int, default=12, help="truncation order of the Euler operators")
    ap.add_argument("--kmax", type=int, default=3)
    ap.add_argument("--trials", type=int, default=25)
    ap.add_argument("--seed", type=int, default=8)
    ap.add_argument("--jet-order", type=int, default=3, help="jet order of the random test forms")
    ap.add_argument("--out", default=None, help="write the tower as JSON")
    args = ap.parse_args()

    t0 = time.perf_counter()
    L = kdv_bracket(args.order)
    rep = check_poisson_conditions(L)
    print(f"conditions i={rep.i} ii={rep.ii} iii={rep.iii}  ({time.perf_counter() - t0:.1f}s)")

    t0 = time.perf_counter()
    tower = build_tower(L, kmax=args.kmax)
    print(f"tower built to kmax={args.kmax}  ({time.perf_counter() - t0:.1f}s)")
    for k, b in sorted(tower.brackets.items()):
        nterms = sum(len(A.terms) for F in b.families.values() for A in F.components.values())
        print(f"  l{k}: {len(b.families)} families, {nterms} terms, prec {b.prec}")

    t0 = time.perf_counter()
    cfg = FunctionConfig(jet_order=args.jet_order)
    report = verify_shlie(tower, nmax=args.kmax, trials=args.trials, seed=args.seed, cfg=cfg)
    print(f"verification  ({time.perf_counter() - t0:.1f}s)")
    for n in sorted(report.checked):
        print(f"  n={n}: {report.checked[n]} nonempty evaluations, {len(report.failures[n])} failures")
    print("PASS" if report.passed else "FAIL")

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dumps(tower) + "\n")


if __name__ == "__main__":
    main()
