"""Table of Kubota-Leopoldt moments against the Bernoulli oracle.

For each (p, a, k) prints the p-adic digit string of the k-th moment of
(1 - phi/p) log g_a, the rational oracle and the number of agreeing digits.
"""

import argparse
import csv
import sys

from padic_lab.coleman import kubota_leopoldt


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--primes", default="3,5,7")
    ap.add_argument("--a", default="2,3")
    ap.add_argument("--k-max", type=int, default=10)
    ap.add_argument("--digits", type=int, default=12)
    ap.add_argument("--pi-terms", type=int, default=64)
    ap.add_argument("--guard", type=int, default=4)
    args = ap.parse_args()
    w = csv.writer(sys.stdout)
    w.writerow(["p", "a", "k", "value", "oracle", "agree_digits"])
    for p in map(int, args.primes.split(",")):
        for a in map(int, args.a.split(",")):
            if a % p == 0:
                continue
            for k in range(1, args.k_max + 1):
                if k + p >= args.pi_terms:
                    break
                r = kubota_leopoldt(p, a, k, args.digits, args.pi_terms, args.guard)
                w.writerow([p, a, k, r["value"], r["oracle_rational"], r["agree_digits"]])


if __name__ == "__main__":
    main()
