"""Exact rational oracle, independent of every p-adic code path.

Used by the test-suite and by the ``kubota-leopoldt`` certificate.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .precision import vp


@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """B_k with B_1 = -1/2, from sum_{j<=k} binom(k+1, j) B_j = 0."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return Fraction(1)
    return -sum(comb(k + 1, j) * bernoulli(j) for j in range(k)) / (k + 1)


def _exp_series(a: int, n: int) -> list[Fraction]:
    return [Fraction(a ** i, factorial(i)) for i in range(n)]


def _div_series(num, den, n):
    out = []
    for i in range(n):
        c = num[i] - sum(out[j] * den[i - j] for j in range(i))
        out.append(c / den[0])
    return out


def _log_series(f, n):
    """log(f / f[0]) as a rational series."""
    u = [c / f[0] for c in f]
    # (log u)' = u'/u
    du = [(i + 1) * u[i + 1] for i in range(n - 1)]
    q = _div_series(du, u, n - 1)
    return [Fraction(0)] + [q[i] / (i + 1) for i in range(n - 1)]


def log_ga_taylor(a: int, n: int) -> list[Fraction]:
    """Taylor coefficients in t of log((e^{at}-1)/(e^t-1)) minus its constant term."""
    num = _exp_series(a, n + 1)[1:]
    den = _exp_series(1, n + 1)[1:]
    return _log_series(_div_series(num, den, n), n)


def kl_moment_series(p: int, a: int, k: int) -> Fraction:
    """k-th moment of (1 - phi/p) log g_a for k >= 1, via the Taylor expansion."""
    if k < 1:
        raise ValueError("rational oracle covers k >= 1")
    c = log_ga_taylor(a, k + 1)[k]
    return factorial(k) * c * (1 - Fraction(p) ** (k - 1))


def kl_moment_bernoulli(p: int, a: int, k: int) -> Fraction:
    """Closed form -(1 - p^{k-1})(a^k - 1) zeta(1-k) with zeta(1-k) = (-1)^{k+1} B_k / k."""
    if k < 1:
        raise ValueError("rational oracle covers k >= 1")
    zeta = Fraction((-1) ** (k + 1)) * bernoulli(k) / k
    return -(1 - Fraction(p) ** (k - 1)) * (a ** k - 1) * zeta


def log_series_rational(x: Fraction, terms: int) -> Fraction:
    """Partial sum of sum_{k>=1} (-1)^{k+1} x^k / k."""
    return sum(Fraction((-1) ** (k + 1)) * x ** k / k for k in range(1, terms + 1))


def reduce_mod(x: Fraction, p: int, digits: int) -> tuple[int, int]:
    """(num, den) with x = num / p^den + O(p^digits), num reduced mod p^(digits+den)."""
    den = max(0, -int(vp(x.numerator, p) - vp(x.denominator, p))) if x else 0
    y = x * p ** den
    mod = p ** (digits + den)
    return y.numerator * pow(y.denominator, -1, mod) % mod, den
