"""Order norms of sheared Mahler basis elements.

For each (n1, n2) prints min over h of the order-(0, h) norm of the pullback
of the basis element under (x, y) -> (x + a y, y); negative entries would
signal a failure of integrality.
"""

import argparse
from fractions import Fraction

from padic_lab.amice import order_norm, shear_pullback_basis


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--a", type=int, default=1)
    ap.add_argument("--n-max", type=int, default=6)
    ap.add_argument("--h", default="1/2,1")
    args = ap.parse_args()
    hs = [Fraction(h) for h in args.h.split(",")]
    print(f"p={args.p} a={args.a} h in {{{', '.join(map(str, hs))}}}; rows n1, columns n2")
    print("      " + "".join(f"{n2:>6}" for n2 in range(args.n_max + 1)))
    for n1 in range(args.n_max + 1):
        row = []
        for n2 in range(args.n_max + 1):
            v = min(order_norm(shear_pullback_basis(args.p, n1, n2, args.a, h)) for h in hs)
            row.append(f"{str(v):>6}")
        print(f"{n1:>6}" + "".join(row))


if __name__ == "__main__":
    main()
