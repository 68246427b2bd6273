"""Precision bookkeeping shared by every module.

All quantities are exact integers modulo a power of ``p``.  A value is
known *absolutely* modulo ``p**prec``; negative valuations are carried by
an explicit denominator exponent rather than by any floating model.
"""

from __future__ import annotations

from dataclasses import dataclass

INF = float("inf")


class PrecisionError(ValueError):
    """Raised when an operation would need more p-adic digits than available."""


@dataclass(frozen=True)
class PrecisionProfile:
    """Working precision: results are promised modulo ``p**N``.

    ``guard`` extra digits are carried internally and are consumed by the
    operations that divide by powers of ``p`` (Mellin inversion, ``1/p``).
    """

    p: int
    N: int
    guard: int = 4

    def __post_init__(self):
        if self.p < 3 or not is_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.N < 1:
            raise ValueError("N must be positive")
        if self.guard < 0:
            raise ValueError("guard must be non-negative")

    @property
    def cap(self) -> int:
        return self.N + self.guard

    @property
    def modulus(self) -> int:
        return self.p ** self.cap


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def vp(n: int, p: int) -> float:
    """p-adic valuation of an integer; ``INF`` for zero."""
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_int(n: int, p: int, default: int) -> int:
    v = vp(n, p)
    return default if v == INF else int(v)


def ceil_log(n: int, p: int) -> int:
    """Smallest ``e`` with ``p**e >= n`` (0 for n <= 1)."""
    e, q = 0, 1
    while q < n:
        q *= p
        e += 1
    return e


def floor_log(n: int, p: int) -> int:
    """Largest ``e`` with ``p**e <= n`` (requires n >= 1)."""
    if n < 1:
        raise ValueError("floor_log needs n >= 1")
    e, q = 0, p
    while q <= n:
        q *= p
        e += 1
    return e
