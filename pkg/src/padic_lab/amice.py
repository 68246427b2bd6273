"""Mahler expansions and distributions of order (a, b) on Z_p^2.

Functions are handled through their Mahler coefficients (exact Fractions);
distributions through finite cell tables at a bi-level (n1, n2).
"""

from __future__ import annotations

import random as _random
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

from .precision import INF, vp


def ell_index(n: int, p: int) -> int:
    """Smallest m with p^m > n."""
    if n < 0:
        raise ValueError("n must be non-negative")
    m, q = 0, 1
    while q <= n:
        q *= p
        m += 1
    return m


def _vq(x: Fraction, p: int) -> float:
    if x == 0:
        return INF
    return vp(x.numerator, p) - vp(x.denominator, p)


def binom_poly(x: int, n: int) -> int:
    """binom(x, n) for any integer x (negative allowed)."""
    out = 1
    for i in range(n):
        out = out * (x - i)
    for i in range(1, n + 1):
        out //= i
    return out


# -- Mahler coefficients -------------------------------------------------------------

@dataclass
class MahlerCoeffs2D:
    """f(x1, x2) = sum a[n1][n2] binom(x1, n1) binom(x2, n2), exact rationals.

    ``scale`` = (a, b) fixes the scaled basis p^{[a l(n1)] + [b l(n2)]} binom binom
    used by :func:`order_norm`.
    """

    p: int
    coeffs: list
    scale: tuple = (Fraction(0), Fraction(0))

    def __post_init__(self):
        self.coeffs = [[Fraction(c) for c in row] for row in self.coeffs]
        self.scale = (Fraction(self.scale[0]), Fraction(self.scale[1]))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.coeffs), len(self.coeffs[0]) if self.coeffs else 0

    def get(self, n1: int, n2: int) -> Fraction:
        r, c = self.shape
        return self.coeffs[n1][n2] if n1 < r and n2 < c else Fraction(0)

    def __call__(self, x1: int, x2: int = 0) -> Fraction:
        acc = Fraction(0)
        for n1, row in enumerate(self.coeffs):
            b1 = binom_poly(x1, n1)
            if not b1:
                continue
            for n2, c in enumerate(row):
                if c:
                    acc += c * b1 * binom_poly(x2, n2)
        return acc

    def nonzero(self) -> dict:
        return {(i, j): c for i, row in enumerate(self.coeffs) for j, c in enumerate(row) if c}

    def __add__(self, other: "MahlerCoeffs2D") -> "MahlerCoeffs2D":
        r = max(self.shape[0], other.shape[0])
        c = max(self.shape[1], other.shape[1])
        return MahlerCoeffs2D(self.p, [[self.get(i, j) + other.get(i, j) for j in range(c)] for i in range(r)],
                              self.scale)

    def scaled(self, k: Fraction) -> "MahlerCoeffs2D":
        return MahlerCoeffs2D(self.p, [[k * c for c in row] for row in self.coeffs], self.scale)

    def __eq__(self, other):
        if not isinstance(other, MahlerCoeffs2D):
            return NotImplemented
        return self.nonzero() == other.nonzero()

    @classmethod
    def from_dict(cls, p: int, entries: dict, scale=(0, 0)) -> "MahlerCoeffs2D":
        r = max((i for i, _ in entries), default=0) + 1
        c = max((j for _, j in entries), default=0) + 1
        arr = [[Fraction(0)] * c for _ in range(r)]
        for (i, j), v in entries.items():
            arr[i][j] = Fraction(v)
        return cls(p, arr, scale)

    def to_json(self) -> dict:
        return {"p": self.p, "scale": [str(s) for s in self.scale],
                "coeffs": [[i, j, str(c)] for (i, j), c in sorted(self.nonzero().items())]}


def _diff_1d(vals: list[Fraction]) -> list[Fraction]:
    out, row = [], list(vals)
    while row:
        out.append(row[0])
        row = [b - a for a, b in zip(row, row[1:])]
    return out


def mahler_expand(values, cutoff: int | tuple[int, int] | None = None, p: int = 2, scale=(0, 0)) -> MahlerCoeffs2D:
    """Mahler coefficients from samples f(0..K) or f(0..K1, 0..K2) by iterated differences."""
    grid = [list(values)] if values and not isinstance(values[0], (list, tuple)) else [list(r) for r in values]
    one_var = values and not isinstance(values[0], (list, tuple))
    if one_var:
        grid = [[v] for v in values]
    K1, K2 = len(grid), len(grid[0]) if grid else 0
    if cutoff is not None:
        c1, c2 = (cutoff, 1) if isinstance(cutoff, int) else cutoff
        if c1 > K1 or c2 > K2:
            raise ValueError(f"need samples on {c1} x {c2}, have {K1} x {K2}")
        grid = [row[:c2] for row in grid[:c1]]
        K1, K2 = c1, c2
    grid = [[Fraction(v) for v in row] for row in grid]
    rows = [_diff_1d(row) for row in grid]
    cols = [_diff_1d([rows[i][j] for i in range(K1)]) for j in range(K2)]
    coeffs = [[cols[j][i] for j in range(K2)] for i in range(K1)]
    return MahlerCoeffs2D(p, coeffs, scale)


def basis_element(p: int, n1: int, n2: int, scale=(0, 0)) -> MahlerCoeffs2D:
    """c_{n1,n2} = p^{[a l(n1)] + [b l(n2)]} binom(x1, n1) binom(x2, n2)."""
    a, b = Fraction(scale[0]), Fraction(scale[1])
    e = floor(a * ell_index(n1, p)) + floor(b * ell_index(n2, p))
    return MahlerCoeffs2D.from_dict(p, {(n1, n2): Fraction(p) ** e}, (a, b))


def order_norm(f: MahlerCoeffs2D, scale=None) -> float:
    """min over stored coefficients of v(a_n) - [a l(n1)] - [b l(n2)].

    This is the valuation of the coefficients in the scaled basis, so each
    basis element has norm 0.
    """
    a, b = (f.scale if scale is None else (Fraction(scale[0]), Fraction(scale[1])))
    p = f.p
    best = INF
    for (n1, n2), c in f.nonzero().items():
        v = _vq(c, p) - floor(a * ell_index(n1, p)) - floor(b * ell_index(n2, p))
        best = min(best, v)
    return best


def _mahler_of_poly_fn(fn, degree: int, p: int) -> list[Fraction]:
    return _diff_1d([Fraction(fn(k)) for k in range(degree + 1)])


def shear_pullback(f: MahlerCoeffs2D, a: int) -> MahlerCoeffs2D:
    """Phi^* f for Phi(x1, x2) = (x1, a x1 + x2), exactly.

    binom(a x1 + x2, n2) = sum_{i<=n2} binom(a x1, n2 - i) binom(x2, i), and
    x1 -> binom(x1, n1) binom(a x1, n2 - i) is a polynomial of degree
    n1 + |a|(n2 - i), expanded by finite differences.
    """
    p = f.p
    out: dict = {}
    for (n1, n2), c in f.nonzero().items():
        for i in range(n2 + 1):
            j = n2 - i
            deg = n1 + abs(a) * j
            col = _mahler_of_poly_fn(lambda x: binom_poly(x, n1) * binom_poly(a * x, j), deg, p)
            for m1, d in enumerate(col):
                if d:
                    out[(m1, i)] = out.get((m1, i), Fraction(0)) + c * d
    return MahlerCoeffs2D.from_dict(p, {k: v for k, v in out.items() if v}, f.scale)


def shear_pullback_basis(p: int, n1: int, n2: int, a: int, h) -> MahlerCoeffs2D:
    """Phi^*(c_{n1,n2}) for the order-(0, h) basis."""
    return shear_pullback(basis_element(p, n1, n2, (0, h)), a)


# -- cell distributions ------------------------------------------------------------

@dataclass
class GrowthReport:
    C: float
    bounded: bool
    by_level: dict = field(default_factory=dict)
    single_order: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        def enc(x):
            return "-inf" if x == -INF else ("inf" if x == INF else str(x))
        return {"C": enc(self.C), "bounded": self.bounded,
                "by_level": {f"{k[0]},{k[1]}": enc(v) for k, v in sorted(self.by_level.items())},
                "single_order": {str(k): enc(v) for k, v in sorted(self.single_order.items())}}


class CellDistribution2D:
    """mu on cells (c1 + p^{n1} Z_p) x (c2 + p^{n2} Z_p) at one bi-level.

    Coarser bi-levels are obtained by summing (finite additivity).
    """

    __slots__ = ("p", "bilevel", "cells", "order")

    def __init__(self, p: int, bilevel, cells: dict, order=(0, 0)):
        n1, n2 = bilevel
        q1, q2 = p ** n1, p ** n2
        self.p = p
        self.bilevel = (n1, n2)
        self.cells = {}
        for (c1, c2), v in cells.items():
            v = Fraction(v)
            if v:
                key = (c1 % q1, c2 % q2)
                self.cells[key] = self.cells.get(key, Fraction(0)) + v
        self.order = (Fraction(order[0]), Fraction(order[1]))

    @classmethod
    def dirac(cls, p: int, bilevel, x=(0, 0)) -> "CellDistribution2D":
        return cls(p, bilevel, {tuple(x): 1})

    @classmethod
    def haar_type(cls, p: int, bilevel) -> "CellDistribution2D":
        """mu(cell) = p^{-n1-n2}: order (1, 1), not (a, b) with a < 1."""
        n1, n2 = bilevel
        v = Fraction(1, p ** (n1 + n2))
        return cls(p, bilevel, {(c1, c2): v for c1 in range(p ** n1) for c2 in range(p ** n2)}, (1, 1))

    @classmethod
    def dirac_times_haar(cls, p: int, bilevel) -> "CellDistribution2D":
        """delta_0 in x1 times Haar in x2: order (0, 1)."""
        n1, n2 = bilevel
        v = Fraction(1, p ** n2)
        return cls(p, bilevel, {(0, c2): v for c2 in range(p ** n2)}, (0, 1))

    @classmethod
    def random(cls, p: int, bilevel, order=(0, 0), rng=None, density: float = 0.5) -> "CellDistribution2D":
        """Random cell values with v(mu) >= -a n1 - b n2 at the finest level."""
        rng = rng or _random.Random(0)
        n1, n2 = bilevel
        a, b = Fraction(order[0]), Fraction(order[1])
        floor_v = -floor(a * n1 + b * n2)
        cells = {}
        for c1 in range(p ** n1):
            for c2 in range(p ** n2):
                if rng.random() < density:
                    e = floor_v + rng.randrange(0, 3)
                    cells[(c1, c2)] = Fraction(rng.randrange(1, p ** 3)) * Fraction(p) ** e
        return cls(p, bilevel, cells, order)

    def value(self, c1: int, c2: int, m1: int, m2: int) -> Fraction:
        return self.coarsen(m1, m2).cells.get((c1 % self.p ** m1, c2 % self.p ** m2), Fraction(0))

    def coarsen(self, m1: int, m2: int) -> "CellDistribution2D":
        n1, n2 = self.bilevel
        if m1 > n1 or m2 > n2:
            raise ValueError(f"cannot refine {self.bilevel} to {(m1, m2)} without finer data")
        q1, q2 = self.p ** m1, self.p ** m2
        out: dict = {}
        for (c1, c2), v in self.cells.items():
            key = (c1 % q1, c2 % q2)
            out[key] = out.get(key, Fraction(0)) + v
        return CellDistribution2D(self.p, (m1, m2), out, self.order)

    def total_mass(self) -> Fraction:
        return sum(self.cells.values(), Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, CellDistribution2D):
            return NotImplemented
        return self.p == other.p and self.bilevel == other.bilevel and self.cells == other.cells

    def to_json(self) -> dict:
        return {"p": self.p, "bilevel": list(self.bilevel),
                "cells": [[c1, c2, str(v)] for (c1, c2), v in sorted(self.cells.items())]}

    @classmethod
    def from_json(cls, data: dict) -> "CellDistribution2D":
        return cls(data["p"], tuple(data["bilevel"]),
                   {(c1, c2): Fraction(v) for c1, c2, v in data["cells"]})


def growth_constant(mu: CellDistribution2D, order, max_k: int = 0) -> GrowthReport:
    """Best C with v(moment) >= C - a m1 - b m2 over every cell of every coarser bi-level.

    Moments with k > 0 treat the finest cells as point masses at their
    representatives.  ``bounded`` is False when the minimum is still
    falling at the finest level (the scan cannot certify a constant).
    The single-order condition at equal levels is reported alongside.
    """
    p = mu.p
    a, b = Fraction(order[0]), Fraction(order[1])
    n1, n2 = mu.bilevel
    by_level = {}
    for m1 in range(n1 + 1):
        for m2 in range(n2 + 1):
            best = INF
            if max_k == 0:
                for v in mu.coarsen(m1, m2).cells.values():
                    best = min(best, _vq(v, p))
            else:
                best = _moment_scan(mu, m1, m2, max_k)
            by_level[(m1, m2)] = best + a * m1 + b * m2 if best != INF else INF
    C = min(by_level.values())
    inner = [v for (m1, m2), v in by_level.items() if m1 < n1 and m2 < n2]
    bounded = C != INF and (not inner or min(inner) <= C) if n1 and n2 else C != INF
    if C == INF:
        bounded = True
    single = {}
    h = max(a, b)
    for m in range(min(n1, n2) + 1):
        vals = [_vq(v, p) for v in mu.coarsen(m, m).cells.values()]
        single[m] = (min(vals) + h * m) if vals else INF
    return GrowthReport(C, bounded, by_level, single)


def _moment_scan(mu: CellDistribution2D, m1: int, m2: int, max_k: int) -> float:
    p = mu.p
    q1, q2 = p ** m1, p ** m2
    acc: dict = {}
    for (x1, x2), v in mu.cells.items():
        a1, a2 = x1 % q1, x2 % q2
        t1, t2 = Fraction(x1 - a1, q1), Fraction(x2 - a2, q2)
        for k1 in range(max_k + 1):
            for k2 in range(max_k + 1):
                key = (a1, a2, k1, k2)
                acc[key] = acc.get(key, Fraction(0)) + v * t1 ** k1 * t2 ** k2
    return min((_vq(v, p) for v in acc.values()), default=INF)


def convolve(mu1: CellDistribution2D, mu2: CellDistribution2D) -> CellDistribution2D:
    """Group-algebra product on (Z/p^{n1}) x (Z/p^{n2}); orders add."""
    if mu1.p != mu2.p or mu1.bilevel != mu2.bilevel:
        raise ValueError(f"bi-level mismatch: {mu1.bilevel} vs {mu2.bilevel}")
    out: dict = {}
    for (a1, a2), v in mu1.cells.items():
        for (b1, b2), w in mu2.cells.items():
            key = (a1 + b1, a2 + b2)
            out[key] = out.get(key, Fraction(0)) + v * w
    order = (mu1.order[0] + mu2.order[0], mu1.order[1] + mu2.order[1])
    return CellDistribution2D(mu1.p, mu1.bilevel, out, order)


def shear_pushforward(mu: CellDistribution2D, a: int, coordinate: int = 2) -> CellDistribution2D:
    """Image of mu under (x1, x2) -> (x1, a x1 + x2) (coordinate 2) or (x1 + a x2, x2) (coordinate 1).

    Exact on an equal bi-level (n, n), where the map permutes cells.
    """
    n1, n2 = mu.bilevel
    if n1 != n2:
        raise ValueError("shear_pushforward needs an equal bi-level")
    out = {}
    for (x1, x2), v in mu.cells.items():
        key = (x1, a * x1 + x2) if coordinate == 2 else (x1 + a * x2, x2)
        out[key] = v
    return CellDistribution2D(mu.p, mu.bilevel, out, mu.order)
