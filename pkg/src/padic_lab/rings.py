"""Coefficient rings: Z_p, unramified extensions W(F_q), and Z_p[zeta_{p^n}].

Two layers live here.  The *raw* layer (``Zp``, ``ExtensionRing`` and its
subclasses) works on bare ints / tuples of ints and takes an explicit
modulus on every multiplicative call; the power-series code uses it
directly.  :class:`RingElem` wraps a raw value with a precision and a
denominator exponent and is what callers handle.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from . import _arith
from .precision import INF, PrecisionError, is_prime, vp
from .scalar import PadicScalar


class Zp:
    """The raw ring Z_p; elements are Python ints."""

    rank = 1

    def __init__(self, p: int):
        self.p = p

    def __eq__(self, other):
        return type(other) is Zp and other.p == self.p

    def __hash__(self):
        return hash(("Zp", self.p))

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def from_int(self, c: int):
        return c

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def scal(self, c: int, a):
        return c * a

    def mul(self, a, b, mod: int):
        return a * b % mod

    def red(self, a, mod: int):
        return a % mod

    def frob(self, a, mod: int, times: int = 1):
        return a

    def coords(self, a) -> list[int]:
        return [a]

    def from_coords(self, cs):
        return cs[0]

    def content(self, a) -> float:
        return vp(a, self.p)

    def divp(self, a, e: int):
        return a // self.p ** e

    def is_unit(self, a) -> bool:
        return a % self.p != 0

    def inverse(self, a, mod: int):
        return pow(a, -1, mod)

    def power(self, a, e: int, mod: int):
        return pow(a, e, mod)

    def mul_matrix(self, a, mod: int):
        return [[a % mod]]

    def describe(self) -> str:
        return "Zp"


class ExtensionRing:
    """``base[x] / (modulus)`` for a monic integer polynomial ``modulus``.

    Frobenius acts on the base coefficients and fixes ``x``; this is the
    right convention for tensoring an unramified ring with roots of unity.
    """

    def __init__(self, base, modulus: list[int]):
        if modulus[-1] != 1:
            raise ValueError("modulus must be monic")
        self.base = base
        self.p = base.p
        self.modulus = list(modulus)
        self.degree = len(modulus) - 1
        self.rank = base.rank * self.degree

    def __eq__(self, other):
        return (type(other) is type(self) and other.base == self.base
                and other.modulus == self.modulus)

    def __hash__(self):
        return hash((type(self).__name__, self.base, tuple(self.modulus)))

    @property
    def zero(self):
        return (self.base.zero,) * self.degree

    @property
    def one(self):
        return self.from_int(1)

    @property
    def gen(self):
        if self.degree == 1:
            return (self.base.from_int(-self.modulus[0]),)
        return (self.base.zero, self.base.one) + (self.base.zero,) * (self.degree - 2)

    def from_int(self, c: int):
        return (self.base.from_int(c),) + (self.base.zero,) * (self.degree - 1)

    def from_base(self, b):
        return (b,) + (self.base.zero,) * (self.degree - 1)

    def add(self, a, b):
        ba = self.base.add
        return tuple(ba(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        bs = self.base.sub
        return tuple(bs(x, y) for x, y in zip(a, b))

    def neg(self, a):
        bn = self.base.neg
        return tuple(bn(x) for x in a)

    def scal(self, c: int, a):
        bs = self.base.scal
        return tuple(bs(c, x) for x in a)

    def red(self, a, mod: int):
        br = self.base.red
        return tuple(br(x, mod) for x in a)

    def mul(self, a, b, mod: int):
        base = self.base
        if isinstance(base, Zp):
            prod = _arith.poly_mul([x % mod for x in a], [y % mod for y in b], mod)
            return tuple(c % mod for c in _arith.poly_reduce(prod, self.modulus))
        d = self.degree
        prod = [base.zero] * (2 * d - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] = base.add(prod[i + j], base.mul(x, y, mod))
        for k in range(2 * d - 2, d - 1, -1):
            lead = prod[k]
            for i in range(d):
                if self.modulus[i]:
                    prod[k - d + i] = base.sub(prod[k - d + i], base.scal(self.modulus[i], lead))
        return tuple(base.red(c, mod) for c in prod[:d])

    def frob(self, a, mod: int, times: int = 1):
        bf = self.base.frob
        return tuple(bf(x, mod, times) for x in a)

    def coords(self, a) -> list[int]:
        out = []
        for x in a:
            out.extend(self.base.coords(x))
        return out

    def from_coords(self, cs):
        r = self.base.rank
        return tuple(self.base.from_coords(cs[i * r:(i + 1) * r]) for i in range(self.degree))

    def content(self, a) -> float:
        return min((vp(c, self.p) for c in self.coords(a)), default=INF)

    def divp(self, a, e: int):
        return tuple(self.base.divp(x, e) for x in a)

    def power(self, a, e: int, mod: int):
        out, base = self.one, a
        while e:
            if e & 1:
                out = self.mul(out, base, mod)
            base = self.mul(base, base, mod)
            e >>= 1
        return self.red(out, mod)

    def basis(self):
        for i in range(self.rank):
            yield self.from_coords([int(i == j) for j in range(self.rank)])

    def mul_matrix(self, a, mod: int) -> list[list[int]]:
        """Matrix of ``y -> a*y`` in the flat Z_p-basis (rows index output coords)."""
        cols = [self.coords(self.mul(a, e, mod)) for e in self.basis()]
        return [list(r) for r in zip(*cols)]

    def is_unit(self, a) -> bool:
        return _arith.det_mod_p(self.mul_matrix(a, self.p), self.p) != 0

    def inverse(self, a, mod: int):
        """Inverse of a unit modulo ``mod``."""
        inv = _arith.inverse_mod(self.mul_matrix(a, mod), self.p, mod)
        one = self.coords(self.one)
        return self.from_coords(_arith.mat_vec(inv, one, mod))

    def describe(self) -> str:
        return f"{self.base.describe()}[x]/({self.modulus})"


# -- unramified extensions --------------------------------------------------

def _polymod_p(a: list[int], m: list[int], p: int) -> list[int]:
    a = [x % p for x in a]
    inv = pow(m[-1], -1, p)
    d = len(m) - 1
    for k in range(len(a) - 1, d - 1, -1):
        c = a[k] * inv % p
        if c:
            for i in range(d + 1):
                a[k - d + i] = (a[k - d + i] - c * m[i]) % p
    a = a[:d]
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymulmod_p(a, b, m, p):
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] += x * y
    return _polymod_p(prod, m, p)


def _polypowmod_p(a, e, m, p):
    out, base = [1], _polymod_p(a, m, p)
    while e:
        if e & 1:
            out = _polymulmod_p(out, base, m, p)
        base = _polymulmod_p(base, base, m, p)
        e >>= 1
    return out


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _is_primitive(poly: list[int], p: int) -> bool:
    f = len(poly) - 1
    if poly[0] % p == 0:
        return False
    order = p ** f - 1
    x = [0, 1]
    if _polypowmod_p(x, order, poly, p) != [1]:
        return False
    return all(_polypowmod_p(x, order // q, poly, p) != [1] for q in _prime_factors(order))


def _find_factor(poly: list[int], p: int):
    """A monic proper factor of ``poly`` over F_p, or None."""
    f = len(poly) - 1
    for deg in range(1, f // 2 + 1):
        for tail in product(range(p), repeat=deg):
            cand = list(reversed(tail)) + [1]
            if not _polymod_p(poly, cand, p):
                return cand
    return None


class UnramifiedField(ExtensionRing):
    """Ring of integers of the unramified extension of Q_p of degree ``f``.

    Elements are coordinate tuples in the power basis of a monic lift of an
    irreducible polynomial over F_p.  The arithmetic Frobenius is the
    Z_p-linear map sending ``x`` to the Hensel-lifted root of the defining
    polynomial congruent to ``x**p``.
    """

    def __init__(self, p: int, poly: list[int]):
        super().__init__(Zp(p), poly)
        self.f = self.degree
        self._frob_cache: dict = {}
        self._k_of: dict = {}

    def describe(self) -> str:
        return f"W(F_{self.p}^{self.f})"

    def _prec_of(self, mod: int) -> int:
        k = self._k_of.get(mod)
        if k is None:
            k, q = 0, 1
            while q < mod:
                q *= self.p
                k += 1
            if q != mod:
                raise ValueError("modulus is not a power of p")
            self._k_of[mod] = k
        return k

    def frobenius_root(self, k: int):
        """Root of the defining polynomial congruent to x^p, modulo p^k."""
        mod = self.p ** k
        r = self.power(self.gen, self.p, mod)
        deriv = [i * c for i, c in enumerate(self.modulus)][1:]
        prec = 1
        while True:
            val = self._horner(self.modulus, r, mod)
            if all(c % mod == 0 for c in val) and prec >= k:
                return r
            dval = self._horner(deriv, r, mod)
            r = self.red(self.sub(r, self.mul(val, self.inverse(dval, mod), mod)), mod)
            prec *= 2

    def _horner(self, poly, r, mod):
        acc = self.zero
        for c in reversed(poly):
            acc = self.add(self.mul(acc, r, mod), self.from_int(c))
        return self.red(acc, mod)

    def frob_matrix(self, k: int, times: int = 1) -> list[list[int]]:
        times %= self.f
        key = (k, times)
        if key not in self._frob_cache:
            mod = self.p ** k
            if times == 0:
                mat = [[int(i == j) for j in range(self.f)] for i in range(self.f)]
            elif times == 1:
                r = self.frobenius_root(k)
                cols, acc = [], self.one
                for _ in range(self.f):
                    cols.append(list(acc))
                    acc = self.mul(acc, r, mod)
                mat = [list(row) for row in zip(*cols)]
            else:
                mat = _arith.mat_mul(self.frob_matrix(k, 1), self.frob_matrix(k, times - 1), mod)
            self._frob_cache[key] = mat
        return self._frob_cache[key]

    def frob(self, a, mod: int, times: int = 1):
        if self.f == 1 or times % self.f == 0:
            return self.red(a, mod)
        k = self._prec_of(mod)
        return tuple(_arith.mat_vec(self.frob_matrix(k, times), a, mod))

    def trace_raw(self, a, mod: int, step: int = 1, count: int | None = None):
        """``sum_{i<count} sigma^{i*step}(a)``; default is the trace to Q_p."""
        count = self.f // step if count is None else count
        acc = self.zero
        for i in range(count):
            acc = self.add(acc, self.frob(a, mod, i * step))
        return self.red(acc, mod)

    def teichmuller_raw(self, residue: list[int], k: int):
        mod = self.p ** k
        y = self.red(tuple(residue), mod)
        q = self.p ** self.f
        for _ in range(k + 1):
            y = self.power(y, q, mod)
        return y

    def residues(self):
        """All residues of F_q, as coordinate tuples, in a fixed order."""
        for tail in product(range(self.p), repeat=self.f):
            yield tuple(reversed(tail))


def make_unramified(p: int, N: int, f: int, seed_poly: list[int] | None = None) -> UnramifiedField:
    """Unramified extension of Q_p of degree f with a deterministic model.

    Without ``seed_poly`` the defining polynomial is the first primitive
    monic polynomial over F_p when coefficient tuples ``(c_{f-1}, ..., c_0)``
    are enumerated lexicographically.  ``N`` is the precision at which the
    Frobenius is precomputed.
    """
    if f < 1:
        raise ValueError("degree f must be at least 1")
    if not is_prime(p) or p < 3:
        raise ValueError("p must be an odd prime")
    if seed_poly is not None:
        poly = [c % p for c in seed_poly]
        if len(poly) != f + 1 or poly[-1] != 1:
            raise ValueError("seed_poly must be monic of degree f")
        factor = _find_factor(poly, p)
        if factor is not None:
            raise ValueError(f"seed_poly is reducible mod {p}: factor {factor}")
    else:
        for tail in product(range(p), repeat=f):
            poly = list(reversed(tail)) + [1]
            if _is_primitive(poly, p):
                break
    field = UnramifiedField(p, poly)
    field.frob_matrix(N)
    return field


# -- cyclotomic rings -------------------------------------------------------

class CyclotomicRing(ExtensionRing):
    """Z_p[zeta_{p^n}] in the power basis of the p^n-th cyclotomic polynomial.

    All levels share one compatible system: ``zeta_n ** p == zeta_{n-1}``,
    realised by :meth:`embed`.  Level 0 is Z_p itself.
    """

    def __init__(self, p: int, level: int, base=None):
        self.level = level
        self.order = p ** level
        super().__init__(base if base is not None else Zp(p), _arith.cyclotomic_poly(self.order))

    def describe(self) -> str:
        return f"Zp[zeta_{self.p}^{self.level}]" if isinstance(self.base, Zp) else \
            f"{self.base.describe()}[zeta_{self.p}^{self.level}]"

    def zeta_power(self, e: int):
        """zeta^e as a raw element (exact, no reduction needed)."""
        e %= self.order
        if self.level == 0:
            return self.one
        coeffs = [self.base.zero] * (self.order)
        coeffs[e] = self.base.one
        return self._reduce_full(coeffs)

    def _reduce_full(self, coeffs):
        """Reduce a list of length p^n (a polynomial mod x^{p^n}-1) by the cyclotomic modulus."""
        d = self.degree
        base = self.base
        coeffs = list(coeffs)
        # x^{k} for k >= d: use x^{p^{n-1}(p-1)} = -sum_{i<p-1} x^{i p^{n-1}}
        step = self.order // self.p
        for k in range(len(coeffs) - 1, d - 1, -1):
            lead = coeffs[k]
            if lead != base.zero:
                coeffs[k] = base.zero
                off = k - d
                for i in range(self.p - 1):
                    coeffs[off + i * step] = base.sub(coeffs[off + i * step], lead)
        return tuple(coeffs[:d])

    def galois(self, a, s: int):
        """Apply zeta -> zeta^s (s prime to p)."""
        if self.level == 0:
            return a
        full = [self.base.zero] * self.order
        for i, c in enumerate(a):
            j = i * s % self.order
            full[j] = self.base.add(full[j], c)
        return self._reduce_full(full)

    def embed(self, a, source_level: int):
        """Image of an element of the level-``source_level`` ring under zeta_m -> zeta_n^{p^{n-m}}."""
        if source_level > self.level:
            raise ValueError("cannot embed a higher level into a lower one")
        if source_level == 0:
            return self.from_base(a[0] if isinstance(a, tuple) else a)
        shift = self.p ** (self.level - source_level)
        full = [self.base.zero] * self.order
        for i, c in enumerate(a):
            full[i * shift] = c
        return self._reduce_full(full)

    def mul_by_zeta_minus_one(self, a):
        """(zeta - 1) * a, exact."""
        shifted = (self.base.zero,) + tuple(a)
        if self.level == 0:
            return self.zero
        return self.sub(self._reduce_full(list(shifted) + [self.base.zero] * (self.order - len(shifted))), a)

    def trace_raw(self, a):
        """Trace to the base ring (sum over all Galois conjugates)."""
        out = self.base.zero
        if self.level == 0:
            return a[0]
        n, p = self.level, self.p
        for i, c in enumerate(a):
            if i % (p ** n) == 0:
                t = p ** (n - 1) * (p - 1)
            elif i % (p ** (n - 1)) == 0:
                t = -p ** (n - 1)
            else:
                continue
            out = self.base.add(out, self.base.scal(t, c))
        return out


def cyclotomic_ring(p: int, level: int) -> CyclotomicRing:
    return CyclotomicRing(p, level)


# -- wrapped elements -------------------------------------------------------

class RingElem:
    """An element ``raw / p**den`` of a coefficient ring, known mod ``p**prec``.

    ``valuation`` is the minimum over Z_p-coordinates, i.e. the largest
    ``v`` with the element in ``p**v`` times the lattice.
    """

    __slots__ = ("ring", "raw", "den", "prec")
    __hash__ = None

    def __init__(self, ring, raw, prec: int, den: int = 0):
        if prec + den < 0:
            raise PrecisionError("no significant digits left")
        p = ring.p
        mod = p ** (prec + den)
        raw = ring.red(raw, mod)
        if ring.content(raw) == INF:
            den = 0
        while den > 0 and ring.content(raw) >= 1:
            raw = ring.divp(raw, 1)
            den -= 1
        self.ring = ring
        self.raw = ring.red(raw, p ** (prec + den))
        self.den = den
        self.prec = prec

    @classmethod
    def from_int(cls, ring, c: int, prec: int):
        return cls(ring, ring.from_int(c), prec)

    @classmethod
    def from_scalar(cls, ring, s: PadicScalar):
        return cls(ring, ring.from_int(s.num), s.prec, s.den)

    @classmethod
    def from_coords(cls, ring, coords, prec: int):
        return cls(ring, ring.from_coords(list(coords)), prec)

    def _new(self, raw, prec, den=0):
        return type(self)(self.ring, raw, prec, den)

    def coords(self) -> list[int]:
        return self.ring.coords(self.raw)

    def scalar_coords(self) -> list[PadicScalar]:
        return [PadicScalar(self.ring.p, c, self.den, self.prec) for c in self.coords()]

    def valuation(self) -> float:
        c = self.ring.content(self.raw)
        return c if c == INF else c - self.den

    def is_zero(self) -> bool:
        return self.ring.content(self.raw) == INF

    def is_unit(self) -> bool:
        return self.den == 0 and self.ring.is_unit(self.raw)

    def _coerce(self, other):
        if isinstance(other, RingElem):
            if other.ring != self.ring:
                raise ValueError("elements of different rings")
            return other
        if isinstance(other, PadicScalar):
            return RingElem.from_scalar(self.ring, other)
        if isinstance(other, (int, Fraction)):
            s = PadicScalar.from_rational(self.ring.p, other, self.prec + self.den + 64)
            return RingElem.from_scalar(self.ring, s)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        D = max(self.den, other.den)
        p, r = self.ring.p, self.ring
        raw = r.add(r.scal(p ** (D - self.den), self.raw), r.scal(p ** (D - other.den), other.raw))
        return self._new(raw, min(self.prec, other.prec), D)

    __radd__ = __add__

    def __neg__(self):
        return self._new(self.ring.neg(self.raw), self.prec, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        va, vb = self.valuation(), other.valuation()
        va = self.prec if va == INF else va
        vb = other.prec if vb == INF else vb
        den = self.den + other.den
        prec = int(max(min(self.prec + vb, other.prec + va), -den))
        mod = self.ring.p ** (prec + den)
        return self._new(self.ring.mul(self.raw, other.raw, mod), prec, den)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = self._new(self.ring.one, self.prec + (abs(self.den) + 1) * e + 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return (self - other).is_zero()

    def with_prec(self, prec: int):
        return self._new(self.raw, min(prec, self.prec), self.den)

    def inverse(self):
        """Inverse, computed by solving the multiplication system over Q.

        The absolute precision of the result drops by the worst valuation
        appearing in the inverse matrix (first-order perturbation bound).
        """
        if self.is_zero():
            raise ZeroDivisionError("inverting zero")
        r, p = self.ring, self.ring.p
        if self.is_unit():
            mod = p ** self.prec
            return self._new(r.inverse(self.raw, mod), self.prec)
        mat = r.mul_matrix(self.raw, p ** (self.prec + self.den))
        inv = _arith.inverse_rational(mat)
        one = r.coords(r.one)
        sol = [sum(row[j] * one[j] for j in range(len(one))) for row in inv]
        loss = -min(_frac_val(x, p) for row in inv for x in row if x != 0)
        sol_val = min(_frac_val(x, p) for x in sol if x != 0)
        # value = p^den * sol
        den = max(0, -int(sol_val)) - self.den
        den = max(den, 0)
        scale = p ** (den + self.den)
        prec = int(self.prec - loss + min(0, sol_val) - self.den) - self.den
        raw_coords = []
        for x in sol:
            y = x * scale
            if y.denominator % p == 0:
                raise ArithmeticError("unexpected p in denominator")
            mod = p ** max(prec + den, 1)
            raw_coords.append(y.numerator * pow(y.denominator, -1, mod) % mod)
        return self._new(r.from_coords(raw_coords), prec, den)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def frobenius(self, times: int = 1):
        mod = self.ring.p ** (self.prec + self.den)
        return self._new(self.ring.frob(self.raw, mod, times), self.prec, self.den)

    def to_json(self) -> list[str]:
        return [s.digits() for s in self.scalar_coords()]

    def __repr__(self):
        return f"{type(self).__name__}({self.ring.describe()}, {self.coords()}/p^{self.den} + O(p^{self.prec}))"


def _frac_val(x: Fraction, p: int) -> int:
    return int(vp(x.numerator, p) - vp(x.denominator, p))


class UnramifiedElem(RingElem):
    __slots__ = ()

    @classmethod
    def teichmuller(cls, field: UnramifiedField, residue, prec: int):
        return cls(field, field.teichmuller_raw(list(residue), prec), prec)

    def trace(self) -> PadicScalar:
        """Trace to Q_p; lands in the constants."""
        f = self.ring
        t = f.trace_raw(self.raw, f.p ** (self.prec + self.den))
        if any(t[1:]):
            raise ArithmeticError("trace did not land in Z_p")
        return PadicScalar(f.p, t[0], self.den, self.prec)

    def relative_trace(self, sub_degree: int, top_degree: int | None = None):
        """Trace from the degree-``top_degree`` subfield down to the degree-``sub_degree`` one."""
        f = self.ring
        top = f.f if top_degree is None else top_degree
        if top % sub_degree:
            raise ValueError("subfield degrees are not nested")
        mod = f.p ** (self.prec + self.den)
        return self._new(f.trace_raw(self.raw, mod, sub_degree, top // sub_degree), self.prec, self.den)


class CyclotomicElem(RingElem):
    __slots__ = ()

    @classmethod
    def zeta(cls, ring: CyclotomicRing, prec: int, e: int = 1):
        return cls(ring, ring.zeta_power(e), prec)

    def galois(self, s: int):
        if s % self.ring.p == 0:
            raise ValueError("Galois elements are units mod p^n")
        return self._new(self.ring.galois(self.raw, s), self.prec, self.den)

    def embed(self, ring: CyclotomicRing):
        return CyclotomicElem(ring, ring.embed(self.raw, self.ring.level), self.prec, self.den)

    def trace(self):
        return RingElem(self.ring.base, self.ring.trace_raw(self.raw), self.prec, self.den)

    def norm_constant_term(self) -> int:
        """Constant term of the defining polynomial (for the zeta - 1 check)."""
        return self.ring.modulus[0]


def wrap(ring, raw, prec: int, den: int = 0) -> RingElem:
    if isinstance(ring, UnramifiedField):
        return UnramifiedElem(ring, raw, prec, den)
    if isinstance(ring, CyclotomicRing):
        return CyclotomicElem(ring, raw, prec, den)
    if isinstance(ring, Zp):
        return PadicScalar(ring.p, raw, den, prec)
    return RingElem(ring, raw, prec, den)
