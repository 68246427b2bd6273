"""Truncated power series over O_K with the (phi, psi, Gamma)-structure.

A :class:`PiSeries` holds ``c_0 .. c_{M-1}`` (numerators over ``p**den``)
known modulo ``p**prec``.  Two facts about the unseen tail drive the
precision rules:

* ``closed``: the stored coefficients are the whole series (a polynomial).
* otherwise ``tail_val``/``growth``: for k >= M, v(c_k) >= tail_val - growth*floor(log_p k).

phi, the Gamma-action, products, log and the derivative are pi-adically
sound on truncations.  psi and evaluation at roots of unity see every
coefficient, so on open series they carry explicit error bounds.
"""

from __future__ import annotations

from math import comb

from . import _series_kernel as K
from .logs import iwasawa_log
from .precision import INF, PrecisionError, ceil_log, floor_log, vp
from .rings import CyclotomicRing, RingElem, Zp, wrap
from .scalar import PadicScalar


def ring_name(ring) -> str:
    return ring.describe()


def _tail_min(M: int, p: int, slope_den: int, tail_val: float, growth: int, offset: int = 0) -> float:
    """min over k >= M of floor(k / slope_den) + offset + tail_val - growth*floor_log(k)."""
    if tail_val == INF:
        return INF
    best = INF
    k = max(M, 1)
    while True:
        val = k // slope_den + offset + tail_val - growth * floor_log(k, p)
        best = min(best, val)
        nxt = p ** (floor_log(k, p) + 1)
        # past the next power of p the penalty grows by `growth` once
        if growth == 0 or (nxt // slope_den - k // slope_den) > growth * 4 + 8:
            break
        k = nxt
    return best


class PiSeries:
    __slots__ = ("ring", "coeffs", "den", "prec", "closed", "tail_val", "growth")
    __hash__ = None

    def __init__(self, ring, coeffs, prec: int, den: int = 0, closed: bool = False,
                 tail_val: float = 0, growth: int = 0):
        p = ring.p
        if prec + den < 0:
            raise PrecisionError("no significant digits left")
        mod = p ** (prec + den)
        coeffs = [ring.red(c, mod) for c in coeffs]
        content = min((ring.content(c) for c in coeffs), default=INF)
        if content == INF:
            den = 0
        elif den > 0 and content >= 1:
            s = min(den, int(content))
            coeffs = [ring.divp(c, s) for c in coeffs]
            den -= s
            coeffs = [ring.red(c, p ** (prec + den)) for c in coeffs]
        self.ring = ring
        self.coeffs = tuple(coeffs)
        self.den = den
        self.prec = prec
        self.closed = closed
        self.tail_val = INF if closed else tail_val
        self.growth = 0 if closed else growth

    # -- construction -------------------------------------------------
    @classmethod
    def from_ints(cls, p: int, values, prec: int, M: int | None = None, closed: bool = False, den: int = 0):
        vals = list(values)
        if M is not None:
            closed = closed and len(vals) <= M
            vals = vals[:M] + [0] * max(0, M - len(vals))
        return cls(Zp(p), vals, prec, den, closed)

    @classmethod
    def constant(cls, ring, c, prec: int, M: int):
        raw = ring.from_int(c) if isinstance(c, int) else c
        return cls(ring, [raw] + [ring.zero] * (M - 1), prec, closed=True)

    @classmethod
    def pi(cls, ring, prec: int, M: int):
        return cls(ring, [ring.zero, ring.one] + [ring.zero] * (M - 2), prec, closed=True)

    @classmethod
    def one_plus_pi(cls, ring, prec: int, M: int):
        return cls(ring, [ring.one, ring.one] + [ring.zero] * (M - 2), prec, closed=True)

    @classmethod
    def binomial(cls, ring, c: int, prec: int, M: int):
        """(1+pi)^c for an integer c >= 0."""
        mod = ring.p ** prec
        vals = K.binomial_series(c, M, mod)
        return cls(ring, [ring.from_int(v) for v in vals], prec, closed=c < M)

    @classmethod
    def t(cls, ring, prec: int, M: int):
        """log(1+pi) = sum (-1)^{k+1} pi^k / k."""
        p = ring.p
        D = floor_log(M - 1, p) if M > 1 else 0
        mod = p ** (prec + D)
        vals = [0]
        for k in range(1, M):
            e = int(vp(k, p))
            u = k // p ** e
            v = p ** (D - e) * pow(u, -1, mod) % mod
            vals.append(v if k % 2 else -v)
        return cls(ring, [ring.from_int(v) for v in vals], prec, D, tail_val=0, growth=1)

    @classmethod
    def q(cls, ring, prec: int, M: int):
        """phi(pi)/pi = ((1+pi)^p - 1)/pi."""
        p = ring.p
        vals = [comb(p, k + 1) for k in range(p)]
        vals = vals[:M] + [0] * max(0, M - p)
        return cls(ring, [ring.from_int(v) for v in vals], prec, closed=p <= M)

    def _new(self, coeffs, prec=None, den=None, closed=None, tail_val=None, growth=None):
        return PiSeries(self.ring, coeffs, self.prec if prec is None else prec,
                        self.den if den is None else den,
                        self.closed if closed is None else closed,
                        self.tail_val if tail_val is None else tail_val,
                        self.growth if growth is None else growth)

    # -- inspection ---------------------------------------------------
    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def M(self) -> int:
        return len(self.coeffs)

    @property
    def mod(self) -> int:
        return self.p ** (self.prec + self.den)

    def coeff(self, k: int):
        raw = self.coeffs[k] if k < self.M else self.ring.zero
        return wrap(self.ring, raw, self.prec, self.den)

    def constant_term(self):
        return self.coeff(0)

    def vmin(self) -> float:
        """Minimum coordinate valuation over the stored coefficients."""
        c = min((self.ring.content(x) for x in self.coeffs), default=INF)
        return c if c == INF else c - self.den

    def degree(self) -> int:
        d = -1
        for k, c in enumerate(self.coeffs):
            if self.ring.content(c) != INF:
                d = k
        return d

    def tail_bound(self) -> tuple[float, int]:
        """(tail_val, growth) clipped by the stored coefficients, as used by products."""
        if self.closed:
            return INF, 0
        vm = self.vmin()
        return min(vm if vm != INF else self.tail_val, self.tail_val), self.growth

    def is_zero(self) -> bool:
        return self.vmin() == INF

    def truncate(self, M: int) -> "PiSeries":
        if M >= self.M:
            return self
        closed = self.closed and self.degree() < M
        tv, g = self.tail_bound()
        return self._new(self.coeffs[:M], closed=closed, tail_val=tv if not closed else INF, growth=g)

    def with_prec(self, prec: int) -> "PiSeries":
        return self._new(self.coeffs, prec=min(prec, self.prec))

    # -- coordinate plumbing -------------------------------------------
    def _columns(self) -> list[list[int]]:
        rows = [self.ring.coords(c) for c in self.coeffs]
        return [list(col) for col in zip(*rows)] if rows else [[] for _ in range(self.ring.rank)]

    def _from_columns(self, cols, **kw) -> "PiSeries":
        n = len(cols[0]) if cols else 0
        coeffs = [self.ring.from_coords([col[k] for col in cols]) for k in range(n)]
        return self._new(coeffs, **kw)

    # -- ring operations -------------------------------------------------
    def _align(self, other):
        if not isinstance(other, PiSeries):
            if isinstance(other, (int, PadicScalar, RingElem)):
                return self._scalar_series(other)
            return NotImplemented
        if other.ring != self.ring:
            raise ValueError("series over different rings")
        return other

    def _scalar_series(self, c) -> "PiSeries":
        if isinstance(c, int):
            return PiSeries.constant(self.ring, c, self.prec + self.den + 8, self.M)
        if isinstance(c, PadicScalar):
            return PiSeries(self.ring, [self.ring.from_int(c.num)] + [self.ring.zero] * (self.M - 1),
                            c.prec, c.den, closed=True)
        return PiSeries(c.ring, [c.raw] + [c.ring.zero] * (self.M - 1), c.prec, c.den, closed=True)

    def __add__(self, other):
        other = self._align(other)
        if other is NotImplemented:
            return other
        M = min(self.M, other.M)
        a, b = self.truncate(M), other.truncate(M)
        D = max(a.den, b.den)
        r, p = self.ring, self.p
        sa, sb = p ** (D - a.den), p ** (D - b.den)
        coeffs = [r.add(r.scal(sa, x), r.scal(sb, y)) for x, y in zip(a.coeffs, b.coeffs)]
        ta, ga = a.tail_bound()
        tb, gb = b.tail_bound()
        return self._new(coeffs, prec=min(a.prec, b.prec), den=D, closed=a.closed and b.closed,
                         tail_val=min(ta, tb), growth=max(ga, gb))

    __radd__ = __add__

    def __neg__(self):
        return self._new([self.ring.neg(c) for c in self.coeffs])

    def __sub__(self, other):
        other = self._align(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._align(other)
        if other is NotImplemented:
            return other
        M = min(self.M, other.M)
        a, b = self.truncate(M), other.truncate(M)
        va, vb = a.vmin(), b.vmin()
        va = a.prec if va == INF else va
        vb = b.prec if vb == INF else vb
        den = a.den + b.den
        prec = int(max(min(a.prec + vb, b.prec + va), -den))
        mod = self.p ** (prec + den)
        coeffs = K.series_mul(self.ring, list(a.coeffs), list(b.coeffs), M, mod)
        closed = a.closed and b.closed and a.degree() + b.degree() < M
        ta, ga = a.tail_bound()
        tb, gb = b.tail_bound()
        ca = va if a.closed else ta
        cb = vb if b.closed else tb
        return self._new(coeffs, prec=prec, den=den, closed=closed,
                         tail_val=min(ca, va) + min(cb, vb), growth=ga + gb)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers of series are not supported")
        out = PiSeries.constant(self.ring, 1, self.prec + self.den * e + 8, self.M)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __eq__(self, other):
        other = self._align(other)
        if other is NotImplemented:
            return other
        return (self - other).is_zero()

    def agree_digits(self, other) -> float:
        """Valuation of the difference (inf when equal at available precision)."""
        return (self - other).vmin()

    def scale_p(self, e: int) -> "PiSeries":
        """Multiply by p^e (e may be negative; then the denominator grows)."""
        if e >= 0:
            return self._new([self.ring.scal(self.p ** e, c) for c in self.coeffs], prec=self.prec + e)
        return self._new(self.coeffs, prec=self.prec + e, den=self.den - e,
                         tail_val=self.tail_val + e if not self.closed else INF)

    # -- Frobenius and psi -------------------------------------------------
    def frobenius_coeffs(self, times: int = 1) -> "PiSeries":
        mod = self.mod
        return self._new([self.ring.frob(c, mod, times) for c in self.coeffs])

    def phi(self) -> "PiSeries":
        """pi -> (1+pi)^p - 1, Frobenius on coefficients; keeps M terms."""
        p, M, mod = self.p, self.M, self.mod
        Y = [0] + [comb(p, k) for k in range(1, p + 1)]
        cols = [K.compose_int(col, Y, M, mod) for col in self._columns()]
        out = self._from_columns(cols)
        closed = self.closed and p * max(self.degree(), 0) < M
        tv, g = self.tail_bound()
        out = out._new(out.coeffs, closed=closed, tail_val=tv, growth=g)
        return out.frobenius_coeffs(1)

    def psi_error(self, m: int) -> float:
        """Lower bound for the valuation of the truncation error in coefficient m of psi."""
        if self.closed:
            return INF
        return _tail_min(self.M, self.p, self.p, self.tail_val, self.growth, -m)

    def psi(self, terms: int | None = None) -> "PiSeries":
        """The canonical left inverse of phi.

        Closed input: exact.  Open input: by default only the coefficients
        whose truncation error is at least ``prec`` are kept; ``terms``
        overrides this and lowers ``prec`` to what the bound certifies.
        """
        p, mod = self.p, self.mod
        cols = [K.psi_int(col, p, mod) for col in self._columns()]
        n = len(cols[0])
        if self.closed:
            out = self._from_columns(cols, closed=True)
            deg = out.degree()
            M_out = max(-(-self.M // p), deg + 1, 1)
            coeffs = list(out.coeffs[:M_out]) + [self.ring.zero] * (M_out - len(out.coeffs))
            return out._new(coeffs).frobenius_coeffs(-1)
        prec = self.prec
        if terms is None:
            terms = 0
            while terms < n and self.psi_error(terms) >= prec:
                terms += 1
            if terms == 0:
                terms = 1
                prec = int(min(prec, self.psi_error(0)))
        else:
            terms = min(terms, n)
            prec = int(min(prec, self.psi_error(terms - 1)))
        cols = [c[:terms] for c in cols]
        tv, g = self.tail_bound()
        out = self._from_columns(cols, prec=prec, closed=False, tail_val=tv - g, growth=g)
        return out.frobenius_coeffs(-1)

    def psi_vanishes(self) -> bool:
        """Whether sum_{zeta^p = 1} f(zeta(1+pi) - 1) vanishes to the known precision.

        The sum is formed in the level-1 cyclotomic ring: writing
        f(v - 1) = sum d_i v^i gives f(zeta u - 1) = sum d_i zeta^i u^i, and
        the conjugates of zeta are summed through the ring's trace.
        """
        return self.psi_defect()[0]

    def psi_defect(self) -> tuple[bool, float]:
        p, M, mod = self.p, self.M, self.mod
        cyc = CyclotomicRing(p, 1)
        tr = [1 + cyc.trace_raw(cyc.zeta_power(i)) for i in range(p)]  # p or 0
        worst = INF
        ok = True
        for col in self._columns():
            d = K.taylor_shift(col, -1, mod)
            s = [d[i] * tr[i % p] for i in range(M)]
            S = K.taylor_shift(s, 1, mod)
            for m in range(M):
                v = vp(S[m] % mod, p) - self.den
                bound = min(self.prec, _tail_min(M, p, p, self.tail_val, self.growth, 1 - m))
                if v < bound:
                    ok = False
                    worst = min(worst, v)
        return ok, worst

    # -- Gamma action, derivative, log -------------------------------------------
    def gamma_act(self, c) -> "PiSeries":
        """pi -> (1+pi)^c - 1 for a unit c in Z_p."""
        p = self.p
        if isinstance(c, PadicScalar):
            if not c.is_unit():
                raise ValueError("gamma_act needs a unit")
            level = self.prec + self.den + ceil_log(self.M, p)
            if c.prec < level:
                raise PrecisionError(f"character value needs {level} digits")
            cint = c.num % p ** level
        else:
            if c % p == 0:
                raise ValueError("gamma_act needs a unit")
            level = self.prec + self.den + ceil_log(self.M, p)
            cint = c % p ** level
        if cint == 1:
            return self
        M, mod = self.M, self.mod
        Y = list(K.binomial_series(cint, M, mod))
        Y[0] = 0
        cols = [K.compose_int(col, Y, M, mod) for col in self._columns()]
        tv, g = self.tail_bound()
        return self._from_columns(cols, closed=False, tail_val=tv, growth=g)

    def deriv(self) -> "PiSeries":
        """(1+pi) d/dpi; loses the top coefficient."""
        r, c = self.ring, self.coeffs
        out = [r.add(r.scal(k + 1, c[k + 1]), r.scal(k, c[k])) for k in range(self.M - 1)]
        tv, g = self.tail_bound()
        closed = self.closed and self.degree() < self.M - 1
        return self._new(out, closed=closed, tail_val=tv - g if tv != INF else INF, growth=g)

    def deriv_power(self, k: int) -> "PiSeries":
        out = self
        for _ in range(k):
            out = out.deriv()
        return out

    # -- evaluation at p-power roots of unity ----------------------------------------
    def eval_raw(self, level: int):
        """Horner evaluation at zeta_{p^level} - 1 with every stored digit kept."""
        Q = CyclotomicRing(self.p, level, base=self.ring)
        mod = self.mod
        acc = Q.zero
        for c in reversed(self.coeffs):
            acc = Q.red(Q.add(Q.mul_by_zeta_minus_one(acc), Q.from_base(c)), mod)
        return Q, acc

    def eval_zeta_minus_one(self, level: int, terms: int | None = None):
        """f(zeta_{p^level} - 1) in the level-``level`` cyclotomic ring over the coefficient ring.

        Returns (element, certified_prec); the truncation error has
        coordinate valuation at least floor(M / phi(p^level)) + tail.
        """
        f = self if terms is None else self.truncate(terms)
        p, M = f.p, f.M
        if level == 0:
            return wrap(f.ring, f.coeffs[0] if M else f.ring.zero, f.prec, f.den), f.prec
        Q, acc = f.eval_raw(level)
        phin = (p - 1) * p ** (level - 1)
        tv, g = f.tail_bound()
        prec = int(min(f.prec, _tail_min(M, p, phin, tv, g)))
        return wrap(Q, acc, prec, f.den), prec

    # -- serialization ------------------------------------------------------------------
    def to_json(self) -> dict:
        out = []
        for k in range(self.M):
            coords = self.coeff(k)
            if isinstance(coords, PadicScalar):
                out.append(coords.digits())
            else:
                out.append(coords.to_json())
        return {"ring": ring_name(self.ring), "p": self.p, "N": self.prec, "M": self.M,
                "coeffs": out}

    def __repr__(self):
        return f"PiSeries({ring_name(self.ring)}, M={self.M}, prec={self.prec}, den={self.den}, closed={self.closed})"


# -- module-level operator API ---------------------------------------------------------

def phi(f: PiSeries) -> PiSeries:
    return f.phi()


def psi(f: PiSeries, terms: int | None = None) -> PiSeries:
    return f.psi(terms)


def psi_vanishes(f: PiSeries) -> bool:
    return f.psi_vanishes()


def gamma_act(c, f: PiSeries) -> PiSeries:
    return f.gamma_act(c)


def deriv(f: PiSeries) -> PiSeries:
    return f.deriv()


def log_unit_series(g: PiSeries) -> PiSeries:
    """iwasawa_log(g(0)) + log(g/g(0)), integrated from g'/g.

    Internally works ``floor(log_p M)`` digits deeper so the 1/k factors
    cost nothing; the result is certified to g's precision.
    """
    ring, p, M, P = g.ring, g.p, g.M, g.prec
    if g.den:
        raise ValueError("log_unit_series needs an integral series")
    c0 = g.coeffs[0]
    if not ring.is_unit(c0):
        raise ValueError("constant term is not a unit")
    D = floor_log(M - 1, p) if M > 1 else 0
    modW = p ** (P + D)
    dg = [ring.scal(k + 1, g.coeffs[k + 1]) for k in range(M - 1)]
    q = K.series_mul(ring, dg, K.series_inverse(ring, list(g.coeffs), M - 1, modW), M - 1, modW)
    acc = [ring.zero] * M
    for k in range(1, M):
        e = int(vp(k, p))
        scale = p ** (D - e) * pow(k // p ** e, -1, modW) % modW
        acc[k] = ring.scal(scale, q[k - 1])
    lg = iwasawa_log(wrap(ring, c0, P))
    lg_raw = ring.from_int(lg.num) if isinstance(lg, PadicScalar) else lg.raw
    acc[0] = ring.scal(p ** D, lg_raw)
    return PiSeries(ring, acc, P, D, closed=False, tail_val=0, growth=1)
