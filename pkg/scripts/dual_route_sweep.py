"""Worst-case agreement between group-side and series-side character values.

Draws random measures, evaluates every character of conductor <= the given
level and weight |j| <= max-weight both ways, and reports the minimum number
of certified and agreeing digits per conductor.
"""

import argparse
import random
import time
from collections import defaultdict

from padic_lab.measures import (GroupAlgebraMeasure, SeriesRoute, characters_up_to, dual_route_check,
                                mellin, required_level)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=5)
    ap.add_argument("--digits", type=int, default=12)
    ap.add_argument("--pi-terms", type=int, default=400)
    ap.add_argument("--conductor", type=int, default=2)
    ap.add_argument("--max-weight", type=int, default=3)
    ap.add_argument("--measures", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    L = required_level(args.digits, args.pi_terms, args.p)
    chars = characters_up_to(args.p, args.conductor, range(-args.max_weight, args.max_weight + 1))
    worst = defaultdict(lambda: [args.digits, args.digits])
    failures = 0
    t0 = time.perf_counter()
    for _ in range(args.measures):
        mu = GroupAlgebraMeasure.random(args.p, L, args.digits, 5, rng)
        route = SeriesRoute(mellin(mu, args.pi_terms))
        for eta in chars:
            rep = dual_route_check(mu, eta, route=route)
            w = worst[eta.conductor]
            w[0] = min(w[0], rep["certified"])
            w[1] = min(w[1], rep["agree_digits"])
            failures += not rep["agree"]
    print(f"p={args.p} N={args.digits} M={args.pi_terms} measure level {L}, "
          f"{args.measures} measures x {len(chars)} characters in {time.perf_counter() - t0:.1f}s")
    print("conductor  min_certified  min_agree")
    for c in sorted(worst):
        print(f"{c:9d}  {worst[c][0]:13}  {worst[c][1]:9}")
    print(f"disagreements: {failures}")


if __name__ == "__main__":
    main()
