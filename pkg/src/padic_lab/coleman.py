"""Coleman's norm operator and the rank-one regulator pipeline.

g  ->  w = (1 - phi/p) log g  ->  measure h with mellin(h) = w  ->  ell_0 * h.

Only the formal multiplicative group is covered.  Coleman series are
given in closed form and verified, never solved for.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from . import _series_kernel as K
from .measures import DistributionSeries, GroupAlgebraMeasure, ell_element, mellin_inverse
from .oracle import kl_moment_bernoulli, reduce_mod
from .precision import INF, PrecisionError
from .rings import CyclotomicRing, Zp
from .scalar import PadicScalar
from .series import PiSeries, log_unit_series


def cyclotomic_unit(p: int, a: int, prec: int, M: int) -> PiSeries:
    """g_a = ((1+pi)^a - 1)/pi as an exact polynomial."""
    if a < 1:
        raise ValueError("a must be a positive integer")
    vals = [comb(a, k + 1) for k in range(a)]
    if len(vals) > M:
        raise ValueError(f"g_{a} needs {len(vals)} terms, have M={M}")
    return PiSeries.from_ints(p, vals, prec, M, closed=True)


def coleman_norm(g: PiSeries) -> PiSeries:
    """The N(g) with phi(N g)(pi) = prod_{zeta^p = 1} g(zeta(1+pi) - 1).

    The product over zeta != 1 is a norm from the level-1 cyclotomic ring;
    it is formed there, descended, multiplied by g and pushed through psi.
    Closed input gives an exact answer.  For open input the error in
    coefficient m of the product stays above floor(M/p) - m after psi,
    which is the bound psi already applies to an open series.
    """
    ring, p = g.ring, g.p
    if g.den or not ring.is_unit(g.coeffs[0]):
        raise ValueError("coleman_norm needs a unit series")
    mod = g.mod
    L = p * (g.degree() + 1) if g.closed else g.M
    coeffs = list(g.coeffs[:L])
    Q = CyclotomicRing(p, 1, base=ring)
    z = Q.zeta_power(1)
    Y = [Q.sub(z, Q.one), z] + [Q.zero] * (L - 2)
    # Horner: g(zeta(1+pi) - 1)
    acc = [Q.zero] * L
    for c in reversed(coeffs):
        acc = K.series_mul(Q, acc, Y, L, mod)
        acc[0] = Q.red(Q.add(acc[0], Q.from_base(c)), mod)
    prod = acc
    for s in range(2, p):
        conj = [Q.galois(c, s) for c in acc]
        prod = K.series_mul(Q, prod, conj, L, mod)
    down = []
    for c in prod:
        rest = c[1:]
        if any(Q.base.red(x, mod) != Q.base.zero for x in rest):
            raise ArithmeticError("norm did not descend to the coefficient ring")
        down.append(c[0])
    full = K.series_mul(ring, down, list(coeffs) + [ring.zero] * (L - len(coeffs)), L, mod)
    tv, gr = g.tail_bound()
    P = PiSeries(ring, full, g.prec, closed=g.closed, tail_val=tv, growth=gr)
    out = P.psi()
    if g.closed:
        M_out = g.M
        cs = list(out.coeffs[:M_out]) + [ring.zero] * max(0, M_out - out.M)
        out = PiSeries(ring, cs, out.prec, out.den, closed=out.degree() < M_out)
    return out


@dataclass
class ColemanSeries:
    g: PiSeries
    fixed_by_norm: bool = False

    def __post_init__(self):
        if self.g.den or not self.g.ring.is_unit(self.g.coeffs[0]):
            raise ValueError("a Coleman series must be a unit")

    @classmethod
    def cyclotomic(cls, p: int, a: int, prec: int, M: int) -> "ColemanSeries":
        if a % p == 0:
            raise ValueError(f"a={a} is divisible by p={p}")
        return cls(cyclotomic_unit(p, a, prec, M), fixed_by_norm=True)

    def norm_defect(self) -> float:
        """Valuation of N(g) - g on the common range (inf = fixed)."""
        Ng = coleman_norm(self.g)
        m = min(Ng.M, self.g.M)
        return (Ng.truncate(m) - self.g.truncate(m)).vmin()


def interpolation_check(g, a: int, n: int) -> float:
    """Valuation of g(zeta_{p^n} - 1) - (zeta^a - 1)/(zeta - 1); inf when they agree.

    Only g over Z_p (sigma trivial).
    """
    if isinstance(g, ColemanSeries):
        g = g.g
    if not isinstance(g.ring, Zp):
        raise ValueError("interpolation_check covers series over Z_p")
    if n < 1:
        raise ValueError("n must be at least 1")
    E, prec = g.eval_zeta_minus_one(n)
    if prec < 1:
        raise PrecisionError(f"M={g.M} certifies nothing at level {n}")
    Q = E.ring
    target = Q.zero
    for i in range(a):
        target = Q.add(target, Q.zeta_power(i))
    mod = g.p ** (prec + E.den)
    diff = Q.red(Q.sub(E.raw, Q.scal(g.p ** E.den, target)), mod)
    v = Q.content(diff) - E.den
    return INF if v >= prec else v


@dataclass
class RegulatorOutput:
    h: GroupAlgebraMeasure
    L: DistributionSeries
    w: PiSeries
    guard: dict = field(default_factory=dict)


def regulator_series(g: PiSeries) -> PiSeries:
    """(1 - phi/p) log g."""
    lg = log_unit_series(g)
    return lg - lg.phi().scale_p(-1)


def coleman_to_measure(cs: ColemanSeries, n: int, M_dist: int = 32) -> RegulatorOutput:
    g = cs.g
    w = regulator_series(g)
    ok, worst = w.psi_defect()
    if not ok:
        raise ValueError(f"psi((1 - phi/p) log g) != 0 at valuation {worst}; "
                         f"norm defect N(g) - g has valuation {cs.norm_defect()}")
    h = mellin_inverse(w, n, check=False)
    D = DistributionSeries.from_measure(h, M_dist)
    ell = ell_element(0, g.p, h.prec, M_dist)
    L = ell * D
    guard = {"log_and_phi_over_p": g.prec - w.prec, "mellin_inverse": w.prec - h.prec,
             "ell_0": h.prec - L.branches[0].prec}
    return RegulatorOutput(h, L, w, guard)


def moment(w: PiSeries, k: int) -> PadicScalar:
    """d^k w at pi = 0; reads only the first k+1 coefficients."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k >= w.M - w.p:
        raise PrecisionError(f"moment {k} needs M > {k + w.p}, have {w.M}")
    if not isinstance(w.ring, Zp):
        raise ValueError("moment covers series over Z_p")
    head = PiSeries(w.ring, w.coeffs[:k + 1], w.prec, w.den, closed=True)
    d = head.deriv_power(k) if k else head
    return PadicScalar(w.p, d.coeffs[0], d.den, d.prec)


def kubota_leopoldt(p: int, a: int, k: int, N: int, M: int, guard: int = 4) -> dict:
    """k-th moment of (1 - phi/p) log g_a with its rational-oracle certificate."""
    if a % p == 0:
        raise ValueError(f"a={a} must be prime to p={p}")
    if M <= k + p:
        raise PrecisionError(f"need M > k + p = {k + p}")
    w = regulator_series(cyclotomic_unit(p, a, N, M))
    value = moment(w, k)
    digits = N - guard
    out = {"p": p, "a": a, "k": k, "N": N, "M": M, "guard": guard, "digits": digits,
           "value": value.with_prec(min(digits, value.prec)).digits()}
    if k >= 1:
        exact = kl_moment_bernoulli(p, a, k)
        num, den = reduce_mod(exact, p, digits)
        oracle = PadicScalar(p, num, den, digits)
        diff = (value - oracle).valuation()
        out["oracle_rational"] = _frac_str(exact)
        out["oracle_value"] = oracle.digits()
        out["agree_digits"] = int(min(diff, digits))
        out["certified"] = diff >= digits
    return out


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
