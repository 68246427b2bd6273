"""Integer kernels for truncated power series in pi.

Everything here acts on one Z_p-coordinate at a time: a series is a list
of ints reduced into ``[0, mod)``.  Multi-coordinate rings go through
:func:`series_mul`, which nests Kronecker substitution through the tower of
extension rings.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

from . import _arith
from .rings import Zp

_LEAF = 16


def series_mul(ring, a, b, M: int, mod: int):
    """Truncated product of two series over ``ring`` (raw coefficient lists)."""
    if not a or not b or M <= 0:
        return [ring.zero] * max(M, 0)
    if isinstance(ring, Zp):
        out = _arith.poly_mul([x % mod for x in a], [y % mod for y in b], mod, trunc=M)
        return out + [0] * (M - len(out))
    d, base = ring.degree, ring.base
    s = 2 * d - 1
    A = [base.zero] * (len(a) * s)
    B = [base.zero] * (len(b) * s)
    for k, c in enumerate(a):
        A[k * s:k * s + d] = c
    for k, c in enumerate(b):
        B[k * s:k * s + d] = c
    C = series_mul(base, A, B, M * s, mod)
    out = []
    for k in range(M):
        out.append(reduce_chunk(ring, C[k * s:(k + 1) * s], mod))
    return out


def reduce_chunk(ring, chunk, mod):
    """Reduce a base-coefficient list of length <= 2d-1 by the ring's modulus."""
    base, d, m = ring.base, ring.degree, ring.modulus
    c = list(chunk) + [base.zero] * (2 * d - 1 - len(chunk))
    for k in range(2 * d - 2, d - 1, -1):
        lead = c[k]
        if lead != base.zero:
            for i in range(d):
                if m[i]:
                    c[k - d + i] = base.sub(c[k - d + i], base.scal(m[i], lead))
    return tuple(base.red(x, mod) for x in c[:d])


# -- composition f(Y) for integer f, Y ---------------------------------------

def _pack_bytes(mod: int, M: int) -> int:
    bits = 2 * mod.bit_length() + M.bit_length() + _LEAF.bit_length() + 2
    return (bits + 7) // 8


def compose_int(f: list[int], Y: list[int], M: int, mod: int) -> list[int]:
    """sum_k f[k] * Y^k mod (mod, pi^M), exact as a polynomial identity.

    Divide and conquer: f = lo + pi^h hi gives f(Y) = lo(Y) + Y^h hi(Y).
    Leaves are accumulated as packed big integers.
    """
    f = [x % mod for x in f]
    while f and f[-1] == 0:
        f.pop()
    if not f:
        return [0] * M
    Y = [y % mod for y in Y[:M]] + [0] * max(0, M - len(Y))
    nb = _pack_bytes(mod, M)
    leaf_pows = [[1] + [0] * (M - 1)]
    for _ in range(1, min(_LEAF, len(f))):
        leaf_pows.append(_arith.poly_mul(leaf_pows[-1], Y, mod, trunc=M))
    packed = [_arith._pack(_pad(q, M), nb) for q in leaf_pows]
    giant = {}

    def ypow(h):
        if h not in giant:
            if h == _LEAF:
                giant[h] = _pad(_arith.poly_mul(leaf_pows[-1], Y, mod, trunc=M), M)
            else:
                half = ypow(h // 2)
                giant[h] = _pad(_arith.poly_mul(half, half, mod, trunc=M), M)
        return giant[h]

    def rec(lo, hi):
        if hi - lo <= _LEAF:
            z = 0
            for k in range(lo, hi):
                if f[k]:
                    z += f[k] * packed[k - lo]
            return [c % mod for c in _arith._unpack(z, M, nb)]
        h = _LEAF
        while 2 * h < hi - lo:
            h *= 2
        low = rec(lo, lo + h)
        high = rec(lo + h, hi)
        prod = _arith.poly_mul(ypow(h), high, mod, trunc=M)
        return [(x + y) % mod for x, y in zip(low, _pad(prod, M))]

    return rec(0, len(f))


def _pad(xs, M):
    return list(xs[:M]) + [0] * max(0, M - len(xs))


@lru_cache(maxsize=64)
def binomial_series(c: int, M: int, mod: int) -> tuple[int, ...]:
    """(1+pi)^c mod (mod, pi^M) for an integer c >= 0."""
    out, b = [], 1
    for k in range(M):
        out.append(b % mod)
        b = b * (c - k) // (k + 1)
        if b == 0:
            out.extend([0] * (M - k - 1))
            break
    return tuple(out)


@lru_cache(maxsize=16)
def _phi_pi_powers(p: int, count: int, mod: int) -> tuple[tuple[int, ...], ...]:
    """((1+pi)^p - 1)^J for J < count, as exact polynomials mod ``mod``."""
    Y = [comb(p, k) % mod for k in range(p + 1)]
    Y[0] = 0
    pows = [(1,)]
    for _ in range(1, count):
        pows.append(tuple(_arith.poly_mul(list(pows[-1]), Y, mod)))
    return tuple(pows)


def psi_int(f: list[int], p: int, mod: int) -> list[int]:
    """The g_0 of the decomposition f = sum_{i<p} (1+pi)^i g_i((1+pi)^p - 1).

    Exact for the polynomial ``f``: back-substitution in the monic basis
    (1+pi)^i ((1+pi)^p - 1)^J, block by block from the top degree.
    """
    n = -(-len(f) // p) * p
    r = [x % mod for x in f] + [0] * (n - len(f))
    blocks = n // p
    pows = _phi_pi_powers(p, max(blocks, 1), mod)
    g0 = [0] * blocks
    for J in range(blocks - 1, -1, -1):
        YJ = pows[J]
        top = p * J
        A = [0] * p
        for s in range(p - 1, -1, -1):
            acc = r[top + s]
            for l in range(s + 1, min(p, top + s + 1)):
                acc -= A[l] * YJ[top + s - l]
            A[s] = acc % mod
        g0[J] = sum(a if l % 2 == 0 else -a for l, a in enumerate(A)) % mod
        prod = _arith.poly_mul(A, list(YJ), mod)
        for i, c in enumerate(prod):
            if c:
                r[i] = (r[i] - c) % mod
    return g0


def _taylor_shift_naive(c: list[int], a: int, mod: int) -> list[int]:
    n = len(c)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            c[j] = (c[j] + a * c[j + 1]) % mod
    return c


def taylor_shift(c: list[int], a: int, mod: int) -> list[int]:
    """Coefficients of c(x + a).

    Split c = lo + x^h hi, so c(x+a) = lo(x+a) + (x+a)^h hi(x+a); the
    products go through the packed big-int multiply.
    """
    c = [x % mod for x in c]
    n = len(c)
    if n <= 48:
        return _taylor_shift_naive(c, a, mod)
    h = n // 2
    lo = taylor_shift(c[:h], a, mod)
    hi = taylor_shift(c[h:], a, mod)
    pw = [comb(h, k) * pow(a, h - k, mod) % mod for k in range(h + 1)]
    out = _arith.poly_mul(hi, pw, mod)
    for i, x in enumerate(lo):
        out[i] = (out[i] + x) % mod
    return out[:n] + [0] * (n - len(out))


def series_inverse(ring, a, M: int, mod: int):
    """1/a mod pi^M for a series with unit constant term (Newton iteration)."""
    inv = [ring.inverse(a[0], mod)]
    n = 1
    two = ring.from_int(2)
    while n < M:
        n = min(2 * n, M)
        e = series_mul(ring, a[:n], inv, n, mod)
        e = [ring.sub(two, e[0])] + [ring.red(ring.scal(-1, c), mod) for c in e[1:]]
        inv = series_mul(ring, inv, e, n, mod)
    return inv[:M]
