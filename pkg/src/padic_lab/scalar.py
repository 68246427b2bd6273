"""Elements of Q_p at capped absolute precision.

A :class:`PadicScalar` stores ``num / p**den`` known modulo ``p**prec``.
The canonical text form is the base-``p`` digit string of ``num`` (least
significant digit first, ``prec + den`` digits) with a ``/p^den`` tag when
``den > 0``; every JSON payload in the CLI uses it.
"""

from __future__ import annotations

from fractions import Fraction

from .precision import INF, PrecisionError, vp

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


class PadicScalar:
    __slots__ = ("p", "num", "den", "prec")
    __hash__ = None

    def __init__(self, p: int, num: int, den: int = 0, prec: int = 20):
        if prec + den < 0:
            raise PrecisionError("no significant digits left")
        mod = p ** (prec + den)
        num %= mod
        if num == 0:
            den = 0
        while den > 0 and num % p == 0:
            num //= p
            den -= 1
        self.p = p
        self.num = num % p ** (prec + den)
        self.den = den
        self.prec = prec

    # -- construction -------------------------------------------------
    @classmethod
    def from_rational(cls, p: int, x, prec: int) -> "PadicScalar":
        x = Fraction(x)
        a, b = x.numerator, x.denominator
        den = 0
        while b % p == 0:
            b //= p
            den += 1
        mod = p ** (prec + den)
        return cls(p, a * pow(b, -1, mod) % mod, den, prec)

    @classmethod
    def from_digits(cls, p: int, text: str) -> "PadicScalar":
        den = 0
        if "/p^" in text:
            text, tag = text.split("/p^")
            den = int(tag)
        num = 0
        for d in reversed(text):
            num = num * p + _DIGITS.index(d)
        return cls(p, num, den, len(text) - den)

    def _coerce(self, other) -> "PadicScalar":
        if isinstance(other, PadicScalar):
            if other.p != self.p:
                raise ValueError("mixing different primes")
            return other
        if isinstance(other, (int, Fraction)):
            extra = 0 if other == 0 else abs(int(vp(Fraction(other).numerator, self.p)))
            return PadicScalar.from_rational(self.p, other, self.prec + self.den + extra + 1)
        return NotImplemented

    # -- inspection ---------------------------------------------------
    def valuation(self) -> float:
        if self.num == 0:
            return INF
        return vp(self.num, self.p) - self.den

    def is_zero(self) -> bool:
        return self.num == 0

    def is_unit(self) -> bool:
        return self.valuation() == 0

    def lift(self) -> Fraction:
        """Representative in Q with denominator a power of p."""
        return Fraction(self.num, self.p ** self.den)

    def residue(self) -> int:
        if self.den:
            raise ValueError("non-integral scalar has no residue")
        return self.num % self.p

    def with_prec(self, prec: int) -> "PadicScalar":
        return PadicScalar(self.p, self.num, self.den, min(prec, self.prec))

    def digits(self) -> str:
        n, out = self.num, []
        for _ in range(self.prec + self.den):
            n, d = divmod(n, self.p)
            out.append(_DIGITS[d])
        s = "".join(out)
        return s + (f"/p^{self.den}" if self.den else "")

    __str__ = digits

    def __repr__(self):
        return f"PadicScalar(p={self.p}, {self.lift()} + O(p^{self.prec}))"

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        D = max(self.den, other.den)
        p = self.p
        num = self.num * p ** (D - self.den) + other.num * p ** (D - other.den)
        return PadicScalar(p, num, D, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return PadicScalar(self.p, -self.num, self.den, self.prec)

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
        prec = int(min(self.prec + vb, other.prec + va))
        den = self.den + other.den
        return PadicScalar(self.p, self.num * other.num, den, max(prec, -den))

    __rmul__ = __mul__

    def inverse(self) -> "PadicScalar":
        v = self.valuation()
        if v == INF:
            raise ZeroDivisionError("inverting a p-adic zero")
        v = int(v)
        p = self.p
        unit = self.num // p ** vp(self.num, p)
        rel = self.prec - v
        if rel <= 0:
            raise PrecisionError("no relative precision to invert")
        mod = p ** rel
        inv = pow(unit, -1, mod)
        # 1/x = p^{-v} / unit, known to relative precision rel
        if v >= 0:
            return PadicScalar(p, inv, v, rel - v)
        return PadicScalar(p, inv * p ** (-v), 0, rel - v)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = PadicScalar(self.p, 1, 0, self.prec + (abs(self.den) + 1) * e + 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return (self - other).is_zero()
