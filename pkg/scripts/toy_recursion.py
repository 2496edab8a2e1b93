"""One-dimensional toy model: lifting A = sum_i a_i(x) (d/dx)^i to 0-forms.

For each random A the lift gives F_1 = sum_m b_m (d/dx)^m with
b_m = sum_j (-1)^j (d/dx)^j a_{m+j}; A lifts exactly when b_0 = chi(A) is a
constant.  The script compares the solver with that recursion.

    python3 scripts/toy_recursion.py [--cases 200] [--seed 1] [--verbose]
"""

import argparse
import time

from jetlift.jetalgebra import LocalFunction
from jetlift.ldocalc import Ldo, apply, characteristic
from jetlift.lifting import NotLiftableError, is_liftable, lift
from jetlift.randgen import make_rng, random_horizontal_ldo


def coefficients(A: Ldo) -> list:
    n = max(I[0] for (xi, _), _c in A.terms.items() for I in xi)
    out = [LocalFunction.zero(1) for _ in range(n + 1)]
    for (xi, _), c in A.terms.items():
        out[xi[0][0]] = c
    return out


def recursion(a: list) -> list:
    b = []
    for m in range(len(a)):
        acc = LocalFunction.zero(1)
        for j in range(len(a) - m):
            d = a[m + j]
            for _ in range(j):
                d = d.total_derivative(1)
            acc = acc + (d if j % 2 == 0 else -d)
        b.append(acc)
    return b


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--cases", type=int, default=200)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--verbose", action="store_true")
    args = ap.parse_args()
    rng = make_rng(args.seed)

    t0 = time.perf_counter()
    agree = lifted = 0
    for _ in range(args.cases):
        A = random_horizontal_ldo(rng, 1, rng.randint(1, 4))
        if not A.terms:
            A = Ldo.multiplication(LocalFunction.const(1, 1))
        if rng.random() < 0.5:
            # force chi constant by correcting the order-zero coefficient
            chi = apply(characteristic(A), [LocalFunction.const(1, 1)])
            A = A - Ldo.multiplication(chi) + Ldo.multiplication(LocalFunction.const(1, 2))
        b = recursion(coefficients(A))
        constant = b[0].total_derivative(1).is_zero()
        ok = is_liftable(A) == constant
        if constant:
            F1 = lift(A).component(1, ((),)).component(()).to_mode(False)
            ok = ok and coefficients(F1) == b[: len(coefficients(F1))] and not any(b[len(coefficients(F1)):])
            lifted += 1
        else:
            try:
                lift(A)
                ok = False
            except NotLiftableError:
                pass
        agree += ok
        if args.verbose:
            print(f"A = {A}\n  chi = {b[0]}  liftable = {constant}  {'ok' if ok else 'MISMATCH'}")
    print(f"{agree}/{args.cases} cases agree with the recursion ({lifted} liftable), "
          f"{time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
