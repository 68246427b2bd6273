"""Measures on Gamma = Z_p^x at finite level, Mellin transform, characters.

Gamma is split as Delta x Gamma_1 with Delta the (p-1)-th roots of unity
and Gamma_1 = 1 + pZ_p topologically generated by gamma = 1 + p.  Every
class g in (Z/p^n)^x has a canonical lift

    chi(g) = teich(g mod p) * (1 + p)^m,   0 <= m < p^{n-1},

and every route (group algebra, series, distribution branches) uses it,
so they agree exactly rather than up to a lift ambiguity.
"""

from __future__ import annotations

import random as _random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .logs import iwasawa_log, teichmuller
from .precision import INF, PrecisionError, ceil_log, floor_log, vp
from .rings import CyclotomicRing, RingElem, Zp, wrap
from .scalar import PadicScalar
from .series import PiSeries, _tail_min
from . import _series_kernel as K


# -- the canonical decomposition of (Z/p^n)^x --------------------------------

@lru_cache(maxsize=None)
def _teich_table(p: int, prec: int) -> tuple[int, ...]:
    return tuple(teichmuller(p, t, prec).num if t else 0 for t in range(p))


@lru_cache(maxsize=4096)
def wild_log(p: int, n: int, g: int) -> int:
    """m in [0, p^{n-1}) with g / teich(g) = (1+p)^m mod p^n."""
    if n <= 1:
        return 0
    mod = p ** n
    x = g * pow(_teich_table(p, n)[g % p], -1, mod) % mod
    m = 0
    for i in range(n - 1):
        step = pow(1 + p, p ** i, mod)  # = 1 + p^{i+1} * unit
        unit = (step - 1) // p ** (i + 1) % p
        d = ((x - 1) // p ** (i + 1)) % p * pow(unit, -1, p) % p
        x = x * pow(step, -d, mod) % mod
        m += d * p ** i
    return m


def chi_lift(p: int, n: int, g: int, prec: int) -> int:
    """Canonical lift of g in (Z/p^n)^x to Z_p, reduced mod p^prec."""
    mod = p ** prec
    return _teich_table(p, prec)[g % p] * pow(1 + p, wild_log(p, n, g), mod) % mod


def units(p: int, n: int):
    return [g for g in range(1, p ** n) if g % p]


def ramanujan(j: int, p: int, m: int) -> int:
    """Trace from Q_p(zeta_{p^m}) of zeta_{p^m}^j."""
    if m == 0:
        return 1
    if j % p ** m == 0:
        return (p - 1) * p ** (m - 1)
    if j % p ** (m - 1) == 0:
        return -p ** (m - 1)
    return 0


def value_ring(p: int, level: int, base=None):
    """Ring hosting values of level-``level`` characters over ``base``."""
    base = Zp(p) if base is None else base
    if isinstance(base, CyclotomicRing) and isinstance(base.base, Zp):
        return CyclotomicRing(p, max(level, base.level))
    if level == 0:
        return base
    return CyclotomicRing(p, level, base=base)


def lift_into(ring, src_ring, raw):
    """Move a raw element of ``src_ring`` (Zp, a cyclotomic level, or ``ring``'s base) into ``ring``."""
    if src_ring == ring:
        return raw
    if isinstance(src_ring, Zp):
        return ring.from_int(raw)
    if isinstance(ring, CyclotomicRing) and isinstance(src_ring, CyclotomicRing) and src_ring.base == ring.base:
        return ring.embed(raw, src_ring.level)
    if isinstance(ring, CyclotomicRing) and src_ring == ring.base:
        return ring.from_base(raw)
    if isinstance(ring, CyclotomicRing) and isinstance(src_ring, CyclotomicRing) and isinstance(src_ring.base, Zp):
        # Z_p[zeta_m] into B[zeta_n]
        emb = CyclotomicRing(ring.p, ring.level).embed(raw, src_ring.level)
        return tuple(ring.base.from_int(c) for c in emb)
    raise TypeError(f"cannot move {src_ring.describe()} into {ring.describe()}")


# -- characters -----------------------------------------------------------

@dataclass(frozen=True)
class CharacterSpec:
    """eta = omega * chi^j with omega = teich^tame * (wild part).

    The wild part is gamma^m -> zeta_{p^{wild_level-1}}^{wild * m}; it is
    present only when ``wild_level >= 2``.
    """

    p: int
    tame: int = 0
    wild_level: int = 0
    weight: int = 0
    wild: int = 1

    def __post_init__(self):
        object.__setattr__(self, "tame", self.tame % (self.p - 1))
        if self.wild_level >= 2 and self.wild % self.p == 0:
            raise ValueError("wild exponent must be prime to p for the stated level")

    @property
    def conductor(self) -> int:
        if self.wild_level >= 2:
            return self.wild_level
        return 1 if self.tame else 0

    @property
    def value_level(self) -> int:
        return max(self.conductor - 1, 0)

    def finite_part(self) -> "CharacterSpec":
        return CharacterSpec(self.p, self.tame, self.wild_level, 0, self.wild)

    def inverse(self) -> "CharacterSpec":
        return CharacterSpec(self.p, -self.tame, self.wild_level, -self.weight, -self.wild)

    def __mul__(self, other: "CharacterSpec") -> "CharacterSpec":
        if other.p != self.p:
            raise ValueError("characters for different primes")
        wl = max(self.wild_level, other.wild_level)
        w = 0
        if wl >= 2:
            w = self._wild_at(wl) + other._wild_at(wl)
        if wl >= 2 and w % self.p == 0:
            # the wild parts cancel down to a smaller level
            while wl >= 2 and w % self.p == 0:
                w //= self.p
                wl -= 1
            if wl < 2:
                wl, w = 0, 1
        return CharacterSpec(self.p, self.tame + other.tame, wl, self.weight + other.weight, w if wl >= 2 else 1)

    def _wild_at(self, level: int) -> int:
        if self.wild_level < 2:
            return 0
        return self.wild * self.p ** (level - self.wild_level)

    def omega_raw(self, g: int, prec: int):
        """omega(g) as a raw element of the level ``value_level`` ring over Z_p."""
        p = self.p
        t = _teich_table(p, prec)[g % p]
        tame = pow(t, self.tame, p ** prec)
        lvl = self.value_level
        if self.wild_level < 2:
            return tame if lvl == 0 else CyclotomicRing(p, lvl).from_int(tame)
        R = CyclotomicRing(p, lvl)
        m = wild_log(p, self.wild_level, g % p ** self.wild_level)
        z = R.zeta_power(self.wild * m)
        return R.red(R.scal(tame, z), p ** prec)

    def chi_power(self, g: int, n: int, prec: int) -> int:
        mod = self.p ** prec
        return pow(chi_lift(self.p, n, g, prec), self.weight, mod)

    def value_raw(self, g: int, n: int, prec: int):
        """eta(g) = omega(g) chi(g)^j, raw, in the level ``value_level`` ring."""
        om = self.omega_raw(g, prec)
        c = self.chi_power(g, n, prec)
        mod = self.p ** prec
        if self.value_level == 0:
            return om * c % mod
        R = CyclotomicRing(self.p, self.value_level)
        return R.red(R.scal(c, om), mod)

    def omega_minus_one(self) -> int:
        """omega(-1) = (-1)^tame (the wild part is trivial on Delta)."""
        return -1 if self.tame % 2 else 1

    def to_json(self) -> dict:
        out = {"tame": self.tame, "wild_level": self.wild_level, "weight": self.weight}
        if self.wild_level >= 2 and self.wild != 1:
            out["wild"] = self.wild
        return out

    @classmethod
    def from_json(cls, p: int, data: dict) -> "CharacterSpec":
        return cls(p, data.get("tame", 0), data.get("wild_level", 0), data.get("weight", 0), data.get("wild", 1))


def characters_up_to(p: int, conductor: int, weights=(0,)):
    """Every character with conductor <= ``conductor`` (one per finite part), times the given weights."""
    out = []
    for j in weights:
        for i in range(p - 1):
            out.append(CharacterSpec(p, i, 0, j))
            for lvl in range(2, conductor + 1):
                for w in range(1, p ** (lvl - 1)):
                    if w % p:
                        out.append(CharacterSpec(p, i, lvl, j, w))
    return out


# -- measures ----------------------------------------------------------------

class GroupAlgebraMeasure:
    """An element of R[(Z/p^n)^x] (or of R[Z/u_order x (Z/p^n)^x]).

    ``entries`` maps group elements to raw coefficients in ``ring``; absent
    keys are zero.  One-variable keys are ints, two-variable keys are
    ``(u, g)`` pairs.
    """

    __slots__ = ("p", "level", "ring", "entries", "prec", "den", "u_order")
    __hash__ = None

    def __init__(self, p: int, level: int, entries: dict, prec: int, ring=None, den: int = 0,
                 u_order: int = 0):
        ring = Zp(p) if ring is None else ring
        mod = p ** (prec + den)
        clean = {}
        for key, c in entries.items():
            g = key[1] if u_order else key
            if g % p == 0:
                raise ValueError(f"{g} is not a unit mod p")
            c = ring.red(c, mod)
            if ring.content(c) != INF:
                clean[key] = c
        content = min((ring.content(c) for c in clean.values()), default=INF)
        if content == INF:
            den = 0
        elif den > 0 and content >= 1:
            s = min(den, int(content))
            clean = {k: ring.red(ring.divp(c, s), p ** (prec + den - s)) for k, c in clean.items()}
            den -= s
        self.p, self.level, self.ring = p, level, ring
        self.entries = dict(sorted(clean.items()))
        self.prec, self.den, self.u_order = prec, den, u_order

    # -- construction -------------------------------------------------
    @classmethod
    def dirac(cls, p: int, level: int, g: int, prec: int, ring=None):
        ring = Zp(p) if ring is None else ring
        return cls(p, level, {g % p ** level: ring.one}, prec, ring)

    @classmethod
    def random(cls, p: int, level: int, prec: int, count: int = 5, rng=None, ring=None):
        rng = rng or _random.Random(0)
        ring = Zp(p) if ring is None else ring
        mod = p ** prec
        ent = {}
        while len(ent) < count:
            g = rng.randrange(1, p ** level)
            if g % p:
                ent[g] = ring.from_coords([rng.randrange(mod) for _ in range(ring.rank)])
        return cls(p, level, ent, prec, ring)

    def _new(self, entries, prec=None, den=None, ring=None, level=None):
        return GroupAlgebraMeasure(self.p, self.level if level is None else level, entries,
                                   self.prec if prec is None else prec, self.ring if ring is None else ring,
                                   self.den if den is None else den, self.u_order)

    def coefficient(self, key):
        return wrap(self.ring, self.entries.get(key, self.ring.zero), self.prec, self.den)

    def total_mass(self):
        r = self.ring
        acc = r.zero
        for c in self.entries.values():
            acc = r.add(acc, c)
        return wrap(r, acc, self.prec, self.den)

    def reduce(self, level: int) -> "GroupAlgebraMeasure":
        """Push forward to (Z/p^level)^x, summing over fibers."""
        if level > self.level:
            raise ValueError("cannot reduce to a higher level")
        q = self.p ** level
        out: dict = {}
        r = self.ring
        for key, c in self.entries.items():
            k2 = (key[0], key[1] % q) if self.u_order else key % q
            out[k2] = r.add(out.get(k2, r.zero), c)
        return self._new(out, level=level)

    def __add__(self, other: "GroupAlgebraMeasure") -> "GroupAlgebraMeasure":
        self._check(other)
        r, D = self.ring, max(self.den, other.den)
        sa, sb = self.p ** (D - self.den), self.p ** (D - other.den)
        out = {k: r.scal(sa, c) for k, c in self.entries.items()}
        for k, c in other.entries.items():
            out[k] = r.add(out.get(k, r.zero), r.scal(sb, c))
        return self._new(out, prec=min(self.prec, other.prec), den=D)

    def __neg__(self):
        return self._new({k: self.ring.neg(c) for k, c in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "GroupAlgebraMeasure") -> "GroupAlgebraMeasure":
        """Convolution (the group-algebra product)."""
        if isinstance(other, int):
            return self._new({k: self.ring.scal(other, c) for k, c in self.entries.items()})
        self._check(other)
        r, q = self.ring, self.p ** self.level
        den = self.den + other.den
        va, vb = self.valuation(), other.valuation()
        va = self.prec if va == INF else va
        vb = other.prec if vb == INF else vb
        prec = int(min(self.prec + vb, other.prec + va))
        mod = self.p ** (prec + den)
        out: dict = {}
        for k1, c1 in self.entries.items():
            for k2, c2 in other.entries.items():
                if self.u_order:
                    k = ((k1[0] + k2[0]) % self.u_order, k1[1] * k2[1] % q)
                else:
                    k = k1 * k2 % q
                out[k] = r.add(out.get(k, r.zero), r.mul(c1, c2, mod))
        return self._new(out, prec=prec, den=den)

    __rmul__ = __mul__

    def valuation(self) -> float:
        c = min((self.ring.content(x) for x in self.entries.values()), default=INF)
        return c if c == INF else c - self.den

    def is_zero(self) -> bool:
        return self.valuation() == INF

    def __eq__(self, other):
        if not isinstance(other, GroupAlgebraMeasure):
            return NotImplemented
        return (self - other).is_zero()

    def _check(self, other):
        if (other.p, other.level, other.u_order) != (self.p, self.level, self.u_order) or other.ring != self.ring:
            raise ValueError("measures live on different groups or rings")

    def act(self, c: int) -> "GroupAlgebraMeasure":
        """Translate by the group element c: [g] -> [cg]."""
        q = self.p ** self.level
        if self.u_order:
            return self._new({(k[0], k[1] * c % q): v for k, v in self.entries.items()})
        return self._new({k * c % q: v for k, v in self.entries.items()})

    def with_prec(self, prec: int):
        return self._new(self.entries, prec=min(prec, self.prec))

    def to_json(self) -> dict:
        ents = []
        for k, c in self.entries.items():
            val = wrap(self.ring, c, self.prec, self.den)
            s = val.digits() if isinstance(val, PadicScalar) else val.to_json()
            ents.append([list(k) if self.u_order else k, s])
        return {"level": self.level, "entries": ents}

    @classmethod
    def from_json(cls, p: int, data: dict) -> "GroupAlgebraMeasure":
        vals = {g: PadicScalar.from_digits(p, s) for g, s in data["entries"]}
        prec = min((x.prec for x in vals.values()), default=1)
        den = max((x.den for x in vals.values()), default=0)
        out = {g: x.num * p ** (den - x.den) for g, x in vals.items()}
        return cls(p, data["level"], out, prec, den=den)

    def __repr__(self):
        return f"GroupAlgebraMeasure(p={self.p}, level={self.level}, {len(self.entries)} entries, prec={self.prec})"


# -- Mellin transform --------------------------------------------------------------

def required_level(prec: int, M: int, p: int) -> int:
    return prec + ceil_log(M, p)


def mellin(mu: GroupAlgebraMeasure, M: int) -> PiSeries:
    """sum_g mu_g (1+pi)^{chi(g)} mod (p^prec, pi^M)."""
    p = mu.p
    need = required_level(mu.prec + mu.den, M, p)
    if mu.level < need:
        raise PrecisionError(f"mellin needs level >= {need}, got {mu.level}")
    if mu.u_order:
        raise ValueError("mellin is defined on one-variable measures")
    r = mu.ring
    mod = p ** (mu.prec + mu.den)
    cols = [[0] * M for _ in range(r.rank)]
    closed = True
    for g, c in mu.entries.items():
        b = K.binomial_series(g, M, mod)
        closed = closed and g < M
        for i, x in enumerate(r.coords(c)):
            if x:
                col = cols[i]
                for k in range(M):
                    if b[k]:
                        col[k] += x * b[k]
    coeffs = [r.from_coords([cols[i][k] % mod for i in range(r.rank)]) for k in range(M)]
    vm = mu.valuation()
    return PiSeries(r, coeffs, mu.prec, mu.den, closed=closed, tail_val=0 if vm == INF else vm, growth=0)


def fleck_prec(M: int, n: int, p: int, tail_val: float, growth: int) -> float:
    """Certified digits of p^{-n} sum_zeta zeta^{-a} f(zeta - 1) given a tail beyond pi^M.

    Fleck's congruence: sum_{j = r mod p^n} binom(k, j)(-1)^j has valuation
    >= floor((k - p^{n-1}) / phi(p^n)).
    """
    if tail_val == INF:
        return INF
    c = p ** (n - 1)
    phin = (p - 1) * c
    return _tail_min(max(M - c, 1), p, phin, tail_val - growth, growth)


def mellin_inverse(f: PiSeries, n: int, check: bool = True) -> GroupAlgebraMeasure:
    """The level-n measure mu(a) = p^{-n} sum_{zeta^{p^n}=1} zeta^{-a} f(zeta - 1)."""
    p = f.p
    if n < 1:
        raise ValueError("level must be at least 1")
    if check:
        ok, worst = f.psi_defect()
        if not ok:
            raise ValueError(f"psi(f) != 0 (defect valuation {worst})")
    if f.prec - n < 1:
        raise PrecisionError(f"mellin_inverse at level {n} needs more than {n} digits, have {f.prec}")
    tv, g = f.tail_bound()
    prec = int(min(f.prec - n, fleck_prec(f.M, n, p, tv, g)))
    if prec < 1:
        raise PrecisionError(f"pi-truncation M={f.M} too short for level {n}")
    r = f.ring
    mod = f.mod
    evals = []
    for m in range(n + 1):
        if m == 0:
            evals.append((r.coords(f.coeffs[0]) if f.M else [0] * r.rank,))
            continue
        # coordinates alone are certified only to floor(M/phi(p^m)) digits; the
        # trace combination below recovers the rest, so keep all stored digits
        _, E = f.eval_raw(m)
        evals.append(tuple(r.coords(c) for c in E))
    entries = {}
    for a in units(p, n):
        acc = [0] * r.rank
        for m, E in enumerate(evals):
            for i, coords in enumerate(E):
                # trace over the roots of exact order p^m of zeta^{i-a}
                t = ramanujan(i - a, p, m)
                if t:
                    for k, x in enumerate(coords):
                        acc[k] += t * x
        entries[a] = r.from_coords([x % mod for x in acc])
    return GroupAlgebraMeasure(p, n, entries, prec, r, f.den + n)


# -- evaluation at characters -----------------------------------------------------------

def eval_character(mu: GroupAlgebraMeasure, eta: CharacterSpec):
    """Group-algebra route: sum_g mu_g omega(g) chi(g)^j in the value ring."""
    if mu.level < eta.conductor:
        raise ValueError(f"measure level {mu.level} is below the conductor {eta.conductor}")
    p = mu.p
    prec = mu.prec
    work = prec + mu.den
    V = value_ring(p, eta.value_level, mu.ring)
    src = value_ring(p, eta.value_level)
    mod = p ** work
    acc = V.zero
    for g, c in mu.entries.items():
        ev = lift_into(V, src, eta.value_raw(g, mu.level, work))
        acc = V.add(acc, V.mul(lift_into(V, mu.ring, c), ev, mod))
    return wrap(V, V.red(acc, mod), prec, mu.den)


def twist(mu: GroupAlgebraMeasure, eta: CharacterSpec) -> GroupAlgebraMeasure:
    """[g] -> eta(g)[g]."""
    p = mu.p
    work = mu.prec + mu.den
    V = value_ring(p, eta.value_level, mu.ring)
    src = value_ring(p, eta.value_level)
    mod = p ** work
    out = {}
    for key, c in mu.entries.items():
        g = key[1] if mu.u_order else key
        ev = lift_into(V, src, eta.value_raw(g, mu.level, work))
        out[key] = V.mul(lift_into(V, mu.ring, c), ev, mod)
    return GroupAlgebraMeasure(p, mu.level, out, mu.prec, V, mu.den, mu.u_order)


def gauss_sum_raw(eta: CharacterSpec, prec: int, zeta_exp: int = 1):
    """tau(omega) = sum_a omega(a)^{-1} zeta_{p^n}^(zeta_exp * a) in Z_p[zeta_{p^n}], n = conductor."""
    p, n = eta.p, eta.conductor
    R = CyclotomicRing(p, n)
    if n == 0:
        return R, R.one
    inv = eta.finite_part().inverse()
    mod = p ** prec
    src = value_ring(p, inv.value_level)
    acc = R.zero
    for a in units(p, n):
        om = lift_into(R, src, inv.omega_raw(a, prec)) if n > 0 else R.one
        acc = R.add(acc, R.mul(om, R.zeta_power(zeta_exp * a), mod))
    return R, R.red(acc, mod)


def _e_omega(E_raw, Q: CyclotomicRing, eta: CharacterSpec, prec: int):
    """sum_{a in (Z/p^n)^x} omega(a)^{-1} sigma_a(E)."""
    p, n = eta.p, Q.level
    inv = eta.finite_part().inverse()
    mod = p ** prec
    src = value_ring(p, inv.value_level)
    acc = Q.zero
    for a in units(p, n):
        om = lift_into(Q, src, inv.omega_raw(a, prec))
        acc = Q.add(acc, Q.mul(om, Q.galois(E_raw, a), mod))
    return Q.red(acc, mod)


class SeriesRoute:
    """Evaluations of d^j F at zeta_{p^n} - 1, cached per (j, n).

    The omega-projection is cheap; the derivative and evaluation are shared
    by every character with the same weight and conductor.
    """

    def __init__(self, F: PiSeries):
        self.F = F
        self._cache = {}

    def at_root(self, j: int, n: int):
        key = (j, n)
        if key not in self._cache:
            F = self.F
            if j >= 0:
                E, prec = F.deriv_power(j).eval_zeta_minus_one(n)
                self._cache[key] = (_raw_of(E), E.ring if n else F.ring, prec, E.den)
            else:
                self._cache[key] = deriv_inverse_eval(F, -j, n)
        return self._cache[key]

    def value(self, eta: CharacterSpec):
        return series_route_value(self.F, eta, self)


def series_route_value(F: PiSeries, eta: CharacterSpec, route: SeriesRoute | None = None):
    """e_omega (d^j F)(zeta_{p^n} - 1), n the conductor; returns (raw, ring, certified prec, den).

    For j < 0 the inverse derivative on the psi = 0 part is used.
    """
    n = eta.conductor
    route = SeriesRoute(F) if route is None else route
    raw, Q, prec, den = route.at_root(eta.weight, n)
    if n == 0:
        return raw, Q, prec, den
    work = prec + den
    return _e_omega(raw, Q, eta, work), Q, prec, den


def dual_route_check(mu: GroupAlgebraMeasure, eta: CharacterSpec, F: PiSeries | None = None,
                     route: SeriesRoute | None = None) -> dict:
    """Compare tau(omega) * (group-route value) with the series-route value.

    Returns the certified digits of the comparison and the digits that agree.
    """
    p, n = mu.p, eta.conductor
    if route is None:
        route = SeriesRoute(F if F is not None else mellin(mu, 64))
    g = eval_character(mu, eta)
    raw, Q, prec, den = series_route_value(route.F, eta, route)
    prec = int(min(prec, g.prec))
    gden = g.den
    mod = p ** (prec + den + gden)
    if n == 0:
        diff = (raw * p ** gden - _raw_of(g) * p ** den) % mod
        v = vp(diff, p) if diff else INF
    else:
        R, tau = gauss_sum_raw(eta, prec + den + gden)
        gr = lift_into(Q, g.ring, g.raw) if isinstance(g, RingElem) else Q.from_int(g.num)
        prod = Q.mul(gr, lift_into(Q, R, tau), mod)
        diff = Q.red(Q.sub(Q.scal(p ** gden, raw), Q.scal(p ** den, prod)), mod)
        v = Q.content(diff)
    agree = v - den - gden
    return {"certified": prec, "agree_digits": prec if agree >= prec else int(agree), "agree": agree >= prec}


def deriv_inverse_eval(F: PiSeries, k: int, n: int):
    """(d^{-k} F)(zeta_{p^n} - 1) for F in the psi = 0 part.

    d^{-k} F = sum_{a=1}^{p-1} (1+pi)^a phi((a + p d)^{-k} F_a) with
    F_a = psi((1+pi)^{-a} F); phi(H)(zeta_{p^n} - 1) = sigma(H)(zeta_{p^{n-1}} - 1).
    """
    p = F.p
    r = F.ring
    Q = CyclotomicRing(p, n, base=r) if n else r
    acc = Q.zero
    prec = F.prec
    den = 0
    parts = []
    for a in range(1, p):
        ua = PiSeries(r, [r.from_int(c) for c in _neg_binomial(-a, F.M, F.mod)], F.prec + F.den + 4,
                      tail_val=0, growth=0)
        Fa = (ua * F).psi()
        H = _apply_inverse_shift(Fa, a, k)
        lvl = max(n - 1, 0)
        E, pr = H.frobenius_coeffs(1).eval_zeta_minus_one(lvl)
        prec = min(prec, pr)
        parts.append((a, E))
        den = max(den, E.den)
    mod = p ** (prec + den)
    for a, E in parts:
        src = r if isinstance(E, PadicScalar) else E.ring
        raw = src.scal(p ** (den - E.den), _raw_of(E))
        if n == 0:
            acc = r.add(acc, raw)
        else:
            acc = Q.add(acc, Q.mul(Q.zeta_power(a), lift_into(Q, src, raw), mod))
    return Q.red(acc, mod), Q, int(prec), den


def _raw_of(E):
    return E.num if isinstance(E, PadicScalar) else E.raw


def _neg_binomial(c: int, M: int, mod: int):
    """(1+pi)^c for a negative integer c."""
    out, b = [], 1
    for k in range(M):
        out.append(b % mod)
        b = b * (c - k) // (k + 1)
    return out


def _apply_inverse_shift(H: PiSeries, a: int, k: int) -> PiSeries:
    """(a + p d)^{-k} H = a^{-k} sum_i binom(-k, i) (p/a)^i d^i H."""
    p = H.p
    prec = H.prec
    mod = p ** (prec + H.den + 2)
    ainv = pow(a, -1, mod)
    out, term, i = H * 0, H, 0
    while i <= prec + H.den and term.M >= 1:
        coef = _binom_signed(-k, i) * pow(ainv, k + i, mod) * p ** i % mod
        out = out + term * coef
        if term.M == 1:
            i += 1
            break
        term = term.deriv()
        i += 1
    if i <= prec + H.den:
        # ran out of pi-terms: the dropped terms carry p^i
        out = out.with_prec(max(min(out.prec, i - H.den), 0))
    return out


def _binom_signed(n: int, k: int) -> int:
    num = 1
    for i in range(k):
        num *= n - i
    den = 1
    for i in range(1, k + 1):
        den *= i
    return num // den


# -- distributions: one series per Delta-branch ---------------------------------------------

class DistributionSeries:
    """sum over branches b of e_b * F_b(X), X = gamma - 1, gamma = 1 + p.

    Branch b of a measure collects omega^b on Delta; evaluation at
    omega^i * (wild) * chi^j reads branch (i + j) mod (p-1) at
    X = zeta^w chi(gamma)^j - 1.  ``order`` is the growth order h.
    """

    __slots__ = ("p", "branches", "order", "gamma")

    def __init__(self, p: int, branches: dict, order=Fraction(0), gamma: int | None = None):
        self.p = p
        self.branches = {b % (p - 1): s for b, s in branches.items()}
        self.order = Fraction(order)
        self.gamma = 1 + p if gamma is None else gamma

    @property
    def M(self) -> int:
        return min(s.M for s in self.branches.values())

    @classmethod
    def from_measure(cls, mu: GroupAlgebraMeasure, M: int) -> "DistributionSeries":
        p, r = mu.p, mu.ring
        prec = mu.prec
        mod = p ** (prec + mu.den)
        tt = _teich_table(p, prec + mu.den)
        branches = {}
        for b in range(p - 1):
            cols = [[0] * M for _ in range(r.rank)]
            closed = True
            for g, c in mu.entries.items():
                m = wild_log(p, mu.level, g)
                closed = closed and m < M
                w = pow(tt[g % p], b, mod)
                bs = K.binomial_series(m, M, mod)
                for i, x in enumerate(r.coords(c)):
                    if x:
                        xw = x * w
                        col = cols[i]
                        for k in range(M):
                            if bs[k]:
                                col[k] += xw * bs[k]
            coeffs = [r.from_coords([cols[i][k] % mod for i in range(r.rank)]) for k in range(M)]
            branches[b] = PiSeries(r, coeffs, prec, mu.den, closed=closed, tail_val=0, growth=0)
        return cls(p, branches, 0)

    def __mul__(self, other):
        if isinstance(other, GroupAlgebraMeasure):
            other = DistributionSeries.from_measure(other, self.M)
        if other.p != self.p or other.gamma != self.gamma:
            raise ValueError("incompatible distributions")
        if other.M != self.M:
            raise ValueError(f"truncation mismatch: {self.M} vs {other.M}")
        return DistributionSeries(self.p, {b: self.branches[b] * other.branches[b] for b in self.branches},
                                  self.order + other.order, self.gamma)

    __rmul__ = __mul__

    def evaluate(self, eta: CharacterSpec):
        """Value at eta, plus certified precision."""
        p = self.p
        b = (eta.tame + eta.weight) % (p - 1)
        F = self.branches[b]
        prec = F.prec
        cg = PadicScalar(p, self.gamma, 0, prec + F.den + 8)
        base = cg ** eta.weight if eta.weight >= 0 else cg.inverse() ** (-eta.weight)
        lvl = max(eta.wild_level - 1, 0) if eta.wild_level >= 2 else 0
        if lvl and self.gamma != 1 + p:
            raise ValueError("wild evaluation needs gamma = 1 + p")
        V = value_ring(p, lvl, F.ring)
        mod = p ** (prec + F.den)
        if lvl:
            x = V.sub(V.scal(base.num % mod, V.zeta_power(eta.wild)), V.one)
            x = V.red(x, mod)
            vx = Fraction(1, (p - 1) * p ** (lvl - 1))
        else:
            x = V.from_int((base.num - 1) % mod)
            vx = base.num != 1 and vp((base.num - 1) % mod, p) or INF
        acc = V.zero
        for c in reversed(F.coeffs):
            acc = V.red(V.add(V.mul(acc, x, mod), lift_into(V, F.ring, c)), mod)
        tv, g = F.tail_bound()
        if vx == INF:
            bound = INF
        else:
            # v(x^k) >= k * vx in coordinates, against the tail tv - g log k
            bound = _tail_min(F.M, p, 1 if vx >= 1 else int(1 / vx), tv, g)
        out_prec = int(min(prec, bound))
        return wrap(V, acc, out_prec, F.den), out_prec

    def max_coeff_valuation(self) -> float:
        """min valuation over all stored coefficients (the boundedness statistic)."""
        return min(s.vmin() for s in self.branches.values())


def ell_element(i: int, p: int, prec: int, M: int, gamma: int | None = None) -> DistributionSeries:
    """log(1+X)/log chi(gamma) - i on the identity of Delta (same series in every branch)."""
    gamma = 1 + p if gamma is None else gamma
    if gamma % p != 1 or (gamma - 1) % (p * p) == 0:
        raise ValueError("gamma must topologically generate 1 + pZ_p")
    lg = iwasawa_log(PadicScalar(p, gamma, 0, prec + 2))
    inv = lg.inverse()
    t = PiSeries.t(Zp(p), prec + 2, M)
    s = t * inv - i
    s = s.with_prec(prec)
    cap = -floor_log(max(M - 1, 1), p) - int(lg.valuation())
    if s.vmin() < cap:
        raise ArithmeticError("denominator cap violated")
    return DistributionSeries(p, {b: s for b in range(p - 1)}, 1, gamma)
