"""Teichmüller lifts and the Iwasawa branch of the p-adic logarithm."""

from __future__ import annotations

from .precision import floor_log, vp
from .rings import RingElem, UnramifiedElem, UnramifiedField, Zp
from .scalar import PadicScalar


def log1p_raw(ring, x, prec: int):
    """log(1 + x) mod p^prec for raw ``x`` with every coordinate divisible by p."""
    p = ring.p
    if ring.content(x) < 1:
        raise ValueError("log series needs x in pO")
    # k - floor_log(k) >= prec bounds the number of terms
    K = 1
    while K - floor_log(K, p) < prec:
        K += 1
    extra = floor_log(K, p)
    mod = p ** (prec + extra)
    out_mod = p ** prec
    acc, power = ring.zero, ring.one
    for k in range(1, K + 1):
        power = ring.mul(power, x, mod)
        e = int(vp(k, p))
        unit = k // p ** e
        term = ring.scal(pow(unit, -1, out_mod), ring.divp(power, e))
        acc = ring.add(acc, term) if k % 2 else ring.sub(acc, term)
    return ring.red(acc, out_mod)


def teichmuller(p: int, residue: int, prec: int) -> PadicScalar:
    """The (p-1)-th root of unity congruent to ``residue`` mod p."""
    mod = p ** prec
    y = residue % p
    for _ in range(prec):
        y = pow(y, p, mod)
    return PadicScalar(p, y, 0, prec)


def iwasawa_log(u):
    """log(u^{q-1})/(q-1), the branch killing roots of unity and p.

    Accepts a unit ``PadicScalar`` or ``UnramifiedElem``.  No precision is
    lost: log is an isometry on 1 + pO for odd p.
    """
    if isinstance(u, PadicScalar):
        if not u.is_unit():
            raise ValueError("iwasawa_log needs a unit")
        p, prec = u.p, u.prec
        mod = p ** prec
        w = pow(u.num, p - 1, mod)
        val = log1p_raw(Zp(p), w - 1, prec)
        return PadicScalar(p, val * pow(p - 1, -1, mod), 0, prec)
    if isinstance(u, RingElem) and isinstance(u.ring, UnramifiedField):
        if not u.is_unit():
            raise ValueError("iwasawa_log needs a unit")
        F, prec = u.ring, u.prec
        p = F.p
        mod = p ** prec
        q = p ** F.f
        w = F.power(u.raw, q - 1, mod)
        val = log1p_raw(F, F.sub(w, F.one), prec)
        return UnramifiedElem(F, F.scal(pow(q - 1, -1, mod), val), prec)
    raise TypeError(f"unsupported element {type(u).__name__}")
