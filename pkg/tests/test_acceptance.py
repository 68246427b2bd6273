"""Acceptance criteria 1-9, each with its runtime limit.

Run with ``pytest tests/test_acceptance.py`` (a PASS/FAIL line per criterion
is printed in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

import json
import os
import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from padic_lab.amice import (CellDistribution2D, basis_element, convolve, growth_constant, order_norm,
                             shear_pullback, shear_pullback_basis, shear_pushforward)
from padic_lab.coleman import (ColemanSeries, coleman_to_measure, cyclotomic_unit,
                               interpolation_check, kubota_leopoldt)
from padic_lab.epsilon import WeilCharacter, epsilon_factor, gauss_product_check
from padic_lab.measures import (CharacterSpec, GroupAlgebraMeasure, SeriesRoute, characters_up_to,
                                dual_route_check, eval_character, mellin, mellin_inverse, required_level)
from padic_lab.oracle import kl_moment_bernoulli, reduce_mod
from padic_lab.precision import INF
from padic_lab.rings import Zp, make_unramified
from padic_lab.scalar import PadicScalar
from padic_lab.series import PiSeries
from padic_lab.yager import (CharacterHost, _subfield_element, check_tower_compat, corrupt_tower,
                             find_normal_basis_gen, lift_tower, period, period_identity_defect,
                             reduce_yager, relative_trace, yager_map)

GOLDEN = Path(__file__).parent / "golden"
RESULTS: dict = {}

LIMITS = {1: 10.0, 2: 5.0, 3: 30.0, 4: 10.0, 5: None, 6: 20.0, 7: 10.0, 8: None, 9: None}
TITLES = {1: "Kubota-Leopoldt moments", 2: "operator suite", 3: "dual-route evaluation",
          4: "Gauss sums and epsilon factors", 5: "Coleman interpolation and norm",
          6: "Yager suite", 7: "order-(a,b) distributions", 8: "regulator factorization",
          9: "CLI golden files"}


# -- criteria ---------------------------------------------------------------------------

def criterion_1():
    N, M, guard = 12, 64, 4
    checked = 0
    for p in (3, 5, 7):
        for a in (2, 3):
            if a % p == 0:
                continue
            for k in range(2, 11, 2):
                r = kubota_leopoldt(p, a, k, N, M, guard)
                num, den = reduce_mod(kl_moment_bernoulli(p, a, k), p, N - guard)
                oracle = PadicScalar(p, num, den, N - guard)
                if not r["certified"] or r["value"] != oracle.digits():
                    return False, f"p={p} a={a} k={k}: {r['value']} vs {oracle.digits()}"
                checked += 1
    spots = {2: Fraction(-1), 4: Fraction(31, 2), 3: Fraction(0)}
    for k, val in spots.items():
        r = kubota_leopoldt(5, 2, k, N, M, guard)
        if r["value"] != PadicScalar.from_rational(5, val, N - guard).digits():
            return False, f"spot value k={k}"
    return True, f"{checked} moments and 3 spot values exact to {N - guard} digits"


def criterion_2():
    p, N = 5, 12
    rng = random.Random(2)
    R = Zp(p)
    M = 64
    # psi o phi = id on 100 random series (closed, degree < M/p so phi keeps every term)
    for _ in range(100):
        deg = rng.randrange(1, M // p)
        f = PiSeries.from_ints(p, [rng.randrange(p ** N) for _ in range(deg)], N, M, closed=True)
        if f.phi().psi().truncate(deg) != f.truncate(deg):
            return False, "psi(phi(f)) != f"
    t = PiSeries.t(R, N, M)
    m = M - p
    if t.phi().truncate(m).agree_digits(t.scale_p(1).truncate(m)) < N:
        return False, "phi(t) != p t"
    c = 1 + p
    gt = t.gamma_act(c)
    if gt.truncate(m).agree_digits((t * PadicScalar(p, c, 0, N + 4)).truncate(m)) < N:
        return False, "gamma(t) != chi(gamma) t"
    # Mellin round trip at level 3; psi vanishing of every Mellin image formed
    n, MM = 3, 930
    L = required_level(N, MM, p)
    for _ in range(20):
        mu = GroupAlgebraMeasure.random(p, L, N, 5, rng)
        F = mellin(mu, MM)
        if not F.psi_vanishes():
            return False, "Mellin image not psi-zero"
        back = mellin_inverse(F, n, check=False)
        if back.prec < N - n or back != mu.reduce(n).with_prec(N - n):
            return False, f"round trip: certified {back.prec}"
    return True, "100 psi(phi f) = f; phi(t), gamma(t); 20 Mellin images psi-zero, round trips exact mod p^9"


def criterion_3():
    p, N, M = 5, 12, 400
    rng = random.Random(3)
    L = required_level(N, M, p)
    chars = characters_up_to(p, 2, range(-3, 4))
    worst = N
    for _ in range(20):
        mu = GroupAlgebraMeasure.random(p, L, N, 5, rng)
        route = SeriesRoute(mellin(mu, M))
        for eta in chars:
            rep = dual_route_check(mu, eta, route=route)
            if not rep["agree"] or rep["certified"] < N - 4:
                return False, f"{eta}: {rep}"
            worst = min(worst, rep["certified"])
    return True, f"20 measures x {len(chars)} characters agree; worst certified {worst} of {N} digits"


def criterion_4():
    prec, count = 10, 0
    for p in (3, 5):
        for eta in characters_up_to(p, 2):
            if eta.conductor == 0:
                continue
            if not gauss_product_check(eta, prec):
                return False, f"tau product fails at {eta}"
            for j in (-1, 0, 1):
                if not epsilon_factor(WeilCharacter(eta, j), prec).agree:
                    return False, f"epsilon mismatch at {eta}, j={j}"
            count += 1
        res = epsilon_factor(WeilCharacter(CharacterSpec(p), 2, Fraction(2)), prec)
        if not (res.closed - 1).is_zero():
            return False, "unramified epsilon != 1"
    return True, f"{count} primitive characters of conductor p, p^2 (p=3,5)"


def criterion_5():
    for p, a in ((5, 2), (5, 3), (3, 2), (7, 3)):
        g = cyclotomic_unit(p, a, 10, 40)
        for n in (1, 2, 3):
            if interpolation_check(g, a, n) != INF:
                return False, f"interpolation p={p} a={a} n={n}"
    if ColemanSeries.cyclotomic(5, 2, 10, 40).norm_defect() != INF:
        return False, "N(g_2) != g_2"
    return True, "g_a(zeta_{p^n} - 1) exact for n <= 3; N(g_2) = g_2 mod (5^10, pi^40)"


def criterion_6():
    p, prec = 3, 8
    amb = make_unramified(p, prec, 9)
    mod = p ** prec
    rng = random.Random(6)

    def sub(d):
        return _subfield_element(amb, d, rng, mod)

    for base, top in ((1, 3), (3, 9), (1, 9)):
        for _ in range(3):
            if yager_map(sub(top), amb, base, top, prec).semilinearity_defect() != INF:
                return False, f"semilinearity {base}->{top}"
    for _ in range(20):
        x = sub(9)
        if reduce_yager(yager_map(x, amb, 1, 9, prec), 3) != \
                yager_map(relative_trace(amb, x, 3, 9, mod), amb, 1, 3, prec):
            return False, "reduce != yager o trace"
    x, cert = find_normal_basis_gen(amb, 1, 9, prec)
    host = CharacterHost(amb, 9, prec)
    for y in (yager_map(x, amb, 1, 9, prec), yager_map(sub(9), amb, 1, 9, prec)):
        for j in range(9):
            if period_identity_defect(y, j, host) != INF:
                return False, f"period identity j={j}"
    if not all(host.is_unit(period(yager_map(x, amb, 1, 9, prec), j, host)) for j in range(9)):
        return False, "period of normal generator not a unit"
    z = GroupAlgebraMeasure.random(p, 2, prec, 3, rng)
    h0 = GroupAlgebraMeasure(p, 2, {g: amb.from_int(c) for g, c in z.entries.items()}, prec, amb)
    tower = lift_tower(amb, 1, [1, 3, 9], h0, rng)
    rep = check_tower_compat(tower)
    if not rep["compatible"]:
        return False, f"lifted tower: {rep}"
    bad = check_tower_compat(corrupt_tower(tower, 2))
    found = sum(q["defect_count"] for q in bad["level_pairs"])
    if found < 1:
        return False, "corruption not detected"
    return True, f"semilinear, 20 reductions, 9 period identities, compat 0 / corrupted {found}"


def criterion_7():
    for p in (3, 5):
        for a in (1, 2):
            for h in (Fraction(1, 2), Fraction(1)):
                for n1 in range(7):
                    for n2 in range(7):
                        if order_norm(shear_pullback_basis(p, n1, n2, a, h)) < 0:
                            return False, f"non-integral shear p={p} a={a} ({n1},{n2})"
    for a, b in ((1, 2), (2, -1), (3, 3)):
        f = basis_element(3, 3, 4, (0, 1))
        if shear_pullback(shear_pullback(f, a), b) != shear_pullback(f, a + b):
            return False, "shear group law"
    rng = random.Random(7)
    for _ in range(50):
        o1 = (Fraction(rng.randrange(4), 4), Fraction(rng.randrange(4), 4))
        o2 = (Fraction(rng.randrange(4), 4), Fraction(rng.randrange(4), 4))
        m1 = CellDistribution2D.random(3, (2, 2), o1, rng)
        m2 = CellDistribution2D.random(3, (2, 2), o2, rng)
        c = growth_constant(convolve(m1, m2), (o1[0] + o2[0], o1[1] + o2[1])).C
        if c < growth_constant(m1, o1).C + growth_constant(m2, o2).C:
            return False, "superadditivity"
    D = CellDistribution2D.dirac_times_haar(3, (4, 4))
    right = growth_constant(shear_pushforward(D, 1, coordinate=2), (0, 1))
    wrong = growth_constant(shear_pushforward(D, 1, coordinate=1), (0, 1))
    if not right.bounded or wrong.bounded:
        return False, "negative test did not separate the shears"
    return True, f"integrality, group law, 50 superadditive pairs, wrong shear C={wrong.C} unbounded"


def criterion_8():
    out = coleman_to_measure(ColemanSeries.cyclotomic(5, 2, 12, 500), 2)
    worst = INF
    for j in range(7):
        eta = CharacterSpec(5, 0, 0, j)
        lhs, lp = out.L.evaluate(eta)
        rhs = eval_character(out.h, eta)
        prec = min(lp, rhs.prec)
        d = (lhs - rhs * j).valuation()
        if d < prec:
            return False, f"j={j}: agree to {d} of {prec}"
        worst = min(worst, prec)
    return True, f"j = 0..6 exact to {worst} digits; guard loss {out.guard}"


def criterion_9():
    commands = json.loads((GOLDEN / "commands.json").read_text())
    runs = 0
    for name, argv in commands.items():
        golden = (GOLDEN / f"{name}.json").read_bytes()
        for threads in (1, 4, 1, 4):
            env = dict(os.environ, PADIC_LAB_THREADS=str(threads))
            r = subprocess.run([sys.executable, "-m", "padic_lab.cli", *argv], capture_output=True, env=env)
            if r.returncode != 0 or r.stdout != golden:
                return False, f"{name} differs at {threads} threads"
            runs += 1
    return True, f"{len(commands)} commands x 4 runs byte-identical"


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 10)}


def evaluate(i: int):
    t = time.perf_counter()
    ok, detail = CRITERIA[i]()
    dt = time.perf_counter() - t
    limit = LIMITS[i]
    if limit is not None and dt >= limit:
        ok, detail = False, f"{detail}; runtime {dt:.1f}s over the {limit:.0f}s limit"
    RESULTS[i] = (ok, dt, detail)
    return ok, dt, detail


def format_line(i: int) -> str:
    ok, dt, detail = RESULTS[i]
    limit = f" (limit {LIMITS[i]:.0f}s)" if LIMITS[i] else ""
    return f"criterion {i} [{TITLES[i]}]: {'PASS' if ok else 'FAIL'} in {dt:.2f}s{limit}: {detail}"


@pytest.mark.parametrize("i", range(1, 10))
def test_criterion(i):
    ok, _, detail = evaluate(i)
    assert ok, format_line(i)


if __name__ == "__main__":
    failed = 0
    for i in CRITERIA:
        evaluate(i)
        print(format_line(i), flush=True)
        failed += not RESULTS[i][0]
    sys.exit(1 if failed else 0)
