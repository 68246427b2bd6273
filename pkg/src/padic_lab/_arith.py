"""Integer polynomial and matrix kernels used by the ring layer.

Polynomials are little-endian lists of Python ints.  Products go through
Kronecker substitution (pack into one big integer, multiply once, unpack),
which keeps the hot loops inside CPython's bignum code.
"""

from __future__ import annotations

from fractions import Fraction


def _slot_bytes(bound: int, terms: int) -> int:
    bits = 2 * bound.bit_length() + terms.bit_length() + 1
    return (bits + 7) // 8


def _pack(xs, nbytes: int) -> int:
    return int.from_bytes(b"".join(x.to_bytes(nbytes, "little") for x in xs), "little")


def _unpack(z: int, n: int, nbytes: int) -> list[int]:
    raw = z.to_bytes(n * nbytes, "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") for i in range(n)]


def poly_mul(a: list[int], b: list[int], mod: int, trunc: int | None = None) -> list[int]:
    """Product of two polynomials with coefficients in [0, mod), reduced mod ``mod``."""
    if not a or not b:
        return []
    n = len(a) + len(b) - 1
    if trunc is not None:
        a, b = a[:trunc], b[:trunc]
        n = min(n, trunc)
    if len(a) * len(b) <= 64:
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return [c % mod for c in out[:n]]
    nb = _slot_bytes(mod, min(len(a), len(b)))
    z = _pack(a, nb) * _pack(b, nb)
    full = len(a) + len(b) - 1
    return [c % mod for c in _unpack(z, full, nb)[:n]]


def poly_reduce(c: list[int], modulus: list[int]) -> list[int]:
    """Remainder of ``c`` by a monic integer polynomial (no coefficient reduction)."""
    d = len(modulus) - 1
    c = list(c)
    for k in range(len(c) - 1, d - 1, -1):
        lead = c[k]
        if lead:
            base = k - d
            for i in range(d):
                if modulus[i]:
                    c[base + i] -= lead * modulus[i]
        c[k] = 0
    c = c[:d]
    return c + [0] * (d - len(c))


def poly_divexact(num: list[int], den: list[int]) -> list[int]:
    """Exact quotient of integer polynomials, ``den`` monic."""
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for k in range(len(q) - 1, -1, -1):
        c = num[k + len(den) - 1]
        q[k] = c
        for i, d in enumerate(den):
            num[k + i] -= c * d
    if any(num):
        raise ArithmeticError("division not exact")
    return q


def cyclotomic_poly(m: int) -> list[int]:
    """Integer coefficients of the m-th cyclotomic polynomial, low degree first."""
    poly = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            poly = poly_divexact(poly, cyclotomic_poly(d))
    return poly


# -- linear algebra ---------------------------------------------------------

def rank_mod_p(rows: list[list[int]], p: int) -> int:
    rows = [[x % p for x in r] for r in rows]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def det_mod_p(mat: list[list[int]], p: int) -> int:
    m = [[x % p for x in r] for r in mat]
    n, det = len(m), 1
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col]), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det = det * m[col][col] % p
        inv = pow(m[col][col], -1, p)
        for i in range(col + 1, n):
            if m[i][col]:
                f = m[i][col] * inv % p
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[col])]
    return det % p


def inverse_mod(mat: list[list[int]], p: int, mod: int) -> list[list[int]]:
    """Inverse of a matrix whose determinant is a p-adic unit, modulo ``mod``."""
    n = len(mat)
    a = [[x % mod for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] % p), None)
        if piv is None:
            raise ArithmeticError("matrix is not invertible over Z_p")
        a[col], a[piv] = a[piv], a[col]
        inv = pow(a[col][col], -1, mod)
        a[col] = [x * inv % mod for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                f = a[i][col]
                a[i] = [(x - f * y) % mod for x, y in zip(a[i], a[col])]
    return [row[n:] for row in a]


def inverse_rational(mat: list[list[int]]) -> list[list[Fraction]]:
    n = len(mat)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return [row[n:] for row in a]


def mat_vec(mat, vec, mod: int | None = None):
    out = [sum(x * y for x, y in zip(row, vec)) for row in mat]
    return out if mod is None else [x % mod for x in out]


def mat_mul(a, b, mod: int):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) % mod for col in bt] for row in a]
