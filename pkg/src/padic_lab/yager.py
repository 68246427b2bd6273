"""The Yager module over finite unramified levels.

Every field in a tower F = F_0 ⊂ F_1 ⊂ ... is realised inside one ambient
unramified field A of degree f over Q_p: the subfield of degree d is the
fixed field of sigma^d, where sigma is the arithmetic Frobenius of A.  So
elements of all levels share one coordinate system and traces are sums of
Frobenius powers.

For K/F of relative degree m the group Gal(K/F) is cyclic, generated by
sigma_F = sigma^{deg F}; index k in a coefficient list stands for the group
element sigma_F^k.
"""

from __future__ import annotations

import random as _random
from dataclasses import dataclass, field

from . import _arith
from .measures import GroupAlgebraMeasure
from .precision import INF, PrecisionError
from .rings import CyclotomicRing, UnramifiedField
from .logs import teichmuller


def _check_degrees(amb: UnramifiedField, *degs: int):
    for d in degs:
        if d < 1 or amb.f % d:
            raise ValueError(f"degree {d} does not divide the ambient degree {amb.f}")
    for a, b in zip(degs, degs[1:]):
        if b % a:
            raise ValueError(f"fields of degree {a} and {b} are not nested")


def in_subfield(amb: UnramifiedField, x, d: int, mod: int) -> bool:
    return amb.frob(x, mod, d) == amb.red(x, mod)


def relative_trace(amb: UnramifiedField, x, d_small: int, d_big: int, mod: int):
    """Tr from the degree-``d_big`` subfield down to the degree-``d_small`` one."""
    return amb.trace_raw(x, mod, step=d_small, count=d_big // d_small)


# -- Yager elements --------------------------------------------------------------------

@dataclass
class YagerElement:
    """sum_k coeffs[k] [sigma_F^k] in O_K[Gal(K/F)], coefficients raw in the ambient field."""

    amb: UnramifiedField
    base_deg: int
    top_deg: int
    coeffs: list
    prec: int

    def __post_init__(self):
        _check_degrees(self.amb, self.base_deg, self.top_deg)
        if len(self.coeffs) != self.order:
            raise ValueError(f"expected {self.order} coefficients, got {len(self.coeffs)}")
        self.coeffs = [self.amb.red(c, self.mod) for c in self.coeffs]

    @property
    def order(self) -> int:
        return self.top_deg // self.base_deg

    @property
    def mod(self) -> int:
        return self.amb.p ** self.prec

    def _new(self, coeffs, top_deg=None):
        return YagerElement(self.amb, self.base_deg, self.top_deg if top_deg is None else top_deg,
                            coeffs, self.prec)

    def group_mul(self, g: int) -> "YagerElement":
        """[sigma_F^g] * y."""
        m = self.order
        return self._new([self.coeffs[(k - g) % m] for k in range(m)])

    def galois(self, g: int) -> "YagerElement":
        """y^g: sigma_F^g applied to every coefficient."""
        A, mod = self.amb, self.mod
        return self._new([A.frob(c, mod, g * self.base_deg) for c in self.coeffs])

    def __sub__(self, other: "YagerElement") -> "YagerElement":
        A = self.amb
        return self._new([A.sub(a, b) for a, b in zip(self.coeffs, other.coeffs)])

    def __add__(self, other: "YagerElement") -> "YagerElement":
        A = self.amb
        return self._new([A.add(a, b) for a, b in zip(self.coeffs, other.coeffs)])

    def __eq__(self, other):
        if not isinstance(other, YagerElement):
            return NotImplemented
        return (self.base_deg, self.top_deg) == (other.base_deg, other.top_deg) and \
            (self - other).valuation() >= min(self.prec, other.prec)

    def valuation(self) -> float:
        return min((self.amb.content(c) for c in self.coeffs), default=INF)

    def semilinearity_defect(self) -> float:
        """min over g of v(y^g - [g] y); inf means y lies in S_{K/F}."""
        return min((self.galois(g) - self.group_mul(g)).valuation() for g in range(self.order))

    def coefficients_in_top(self) -> bool:
        return all(in_subfield(self.amb, c, self.top_deg, self.mod) for c in self.coeffs)

    def to_json(self) -> dict:
        return {"base_degree": self.base_deg, "top_degree": self.top_deg, "prec": self.prec,
                "coeffs": [list(self.amb.coords(c)) for c in self.coeffs]}


def yager_map(x, amb: UnramifiedField, base_deg: int, top_deg: int, prec: int) -> YagerElement:
    """y_{K/F}(x) = sum_sigma x^sigma [sigma^{-1}]."""
    _check_degrees(amb, base_deg, top_deg)
    mod = amb.p ** prec
    if not in_subfield(amb, x, top_deg, mod):
        raise ValueError(f"x is not in the subfield of degree {top_deg}")
    m = top_deg // base_deg
    # coefficient of [sigma_F^k] is sigma_F^{-k}(x)
    coeffs = [amb.frob(x, mod, -k * base_deg) for k in range(m)]
    return YagerElement(amb, base_deg, top_deg, coeffs, prec)


def reduce_yager(y: YagerElement, to_deg: int) -> YagerElement:
    """Push y along Gal(L/F) -> Gal(K/F), K the subfield of degree ``to_deg``."""
    if to_deg % y.base_deg or y.top_deg % to_deg:
        raise ValueError(f"need {y.base_deg} | {to_deg} | {y.top_deg}")
    A = y.amb
    m = to_deg // y.base_deg
    out = [A.zero] * m
    for k, c in enumerate(y.coeffs):
        out[k % m] = A.add(out[k % m], c)
    return y._new(out, top_deg=to_deg)


def conjugate_matrix(y: YagerElement) -> list[list]:
    """Rows y([g] x)-coefficients, i.e. M[i][k] = sigma_F^{i-k}(x) for y = y(x)."""
    return [y.group_mul(i).coeffs for i in range(y.order)]


# -- normal bases ------------------------------------------------------------------

@dataclass
class NormalBasisCertificate:
    x: tuple
    rank: int
    needed: int
    det_mod_p: int | None = None

    @property
    def ok(self) -> bool:
        return self.rank == self.needed


def _residue_basis(amb: UnramifiedField, d: int) -> list:
    """An F_p-basis of the residue field of the degree-d subfield, greedy in residue order."""
    p = amb.p
    basis: list = []
    for r in amb.residues():
        if not any(r):
            continue
        if amb.frob(r, p, d) != amb.red(r, p):
            continue
        if _arith.rank_mod_p([list(amb.coords(b)) for b in basis] + [list(r)], p) > len(basis):
            basis.append(r)
            if len(basis) == d:
                break
    return basis


def normal_basis_certificate(x, amb: UnramifiedField, base_deg: int, top_deg: int) -> NormalBasisCertificate:
    """F_p-rank of {b * sigma_F^i(x)}: full rank top_deg means x generates a normal basis."""
    p = amb.p
    m = top_deg // base_deg
    conj = [amb.frob(amb.red(x, p), p, i * base_deg) for i in range(m)]
    rows = []
    for b in _residue_basis(amb, base_deg):
        for c in conj:
            rows.append(list(amb.coords(amb.mul(b, c, p))))
    rank = _arith.rank_mod_p(rows, p)
    det = None
    if top_deg == amb.f and base_deg == 1:
        det = _arith.det_mod_p(rows, p)
    return NormalBasisCertificate(tuple(x), rank, top_deg, det)


def find_normal_basis_gen(amb: UnramifiedField, base_deg: int, top_deg: int, prec: int):
    """First Teichmüller lift (in residue order) generating a normal integral basis of K/F."""
    _check_degrees(amb, base_deg, top_deg)
    p = amb.p
    for r in amb.residues():
        if not any(r) or amb.frob(r, p, top_deg) != amb.red(r, p):
            continue
        # the certificate only sees residues, so lift the winner alone
        cert = normal_basis_certificate(r, amb, base_deg, top_deg)
        if cert.ok:
            x = amb.teichmuller_raw(list(r), prec)
            cert.x = tuple(x)
            return x, cert
    raise ArithmeticError("no normal basis generator found")  # cannot happen


# -- periods --------------------------------------------------------------------

class CharacterHost:
    """Values of rho_j: sigma_F^k -> zeta_m^{jk} for a cyclic group of order m.

    m dividing p-1 uses Teichmüller roots in Z_p; m a power of p uses the
    cyclotomic ring over the ambient field.  Other orders are rejected.
    """

    def __init__(self, amb: UnramifiedField, m: int, prec: int):
        p = amb.p
        self.amb, self.m, self.prec = amb, m, prec
        self.mod = p ** prec
        if (p - 1) % m == 0:
            self.ring = amb
            g = _teich_generator(p, prec)
            self._root = pow(g, (p - 1) // m, self.mod)
            self.level = 0
        else:
            e, q = 0, 1
            while q < m:
                q *= p
                e += 1
            if q != m:
                raise ValueError(f"no value ring here hosts characters of order {m}")
            self.level = e
            self.ring = CyclotomicRing(p, e, base=amb) if e else amb

    def value(self, j: int, k: int):
        """rho_j(sigma_F^k) as a raw element of ``ring``."""
        e = (j * k) % self.m
        if self.level == 0:
            return self.amb.from_int(pow(self._root, e, self.mod)) if self.m > 1 else self.amb.one
        return self.ring.zeta_power(e)

    def embed(self, c):
        """O_K coefficient into the value ring."""
        return c if self.level == 0 else self.ring.from_base(c)

    def coeff_galois(self, v, times: int):
        """Frobenius on the O_K part only."""
        if self.level == 0:
            return self.amb.frob(v, self.mod, times)
        return tuple(self.amb.frob(c, self.mod, times) for c in v)

    def is_unit(self, v) -> bool:
        if self.level == 0:
            return self.amb.is_unit(v)
        # residue field of O_K[zeta] is that of O_K; reduce via zeta -> 1
        acc = self.amb.zero
        for c in v:
            acc = self.amb.add(acc, c)
        return self.amb.is_unit(acc)


def _teich_generator(p: int, prec: int) -> int:
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in _prime_divisors(p - 1)):
            return teichmuller(p, g, prec).num
    return teichmuller(p, 1, prec).num  # p = 2, 3


def _prime_divisors(n: int) -> list[int]:
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


def period(y: YagerElement, j: int, host: CharacterHost | None = None):
    """rho_j applied to the group part of y: sum_k c_k rho_j(sigma_F^k)."""
    host = host or CharacterHost(y.amb, y.order, y.prec)
    if host.m != y.order:
        raise ValueError("character host has the wrong group order")
    R, mod = host.ring, y.mod
    acc = R.zero
    for k, c in enumerate(y.coeffs):
        acc = R.add(acc, R.mul(host.embed(c), host.value(j, k), mod))
    return R.red(acc, mod)


def period_identity_defect(y: YagerElement, j: int, host: CharacterHost | None = None) -> float:
    """min over u of v(rho(omega)^u - rho(u) rho(omega)); inf when the crossed identity holds."""
    host = host or CharacterHost(y.amb, y.order, y.prec)
    R, mod = host.ring, y.mod
    w = period(y, j, host)
    worst = INF
    for u in range(y.order):
        lhs = host.coeff_galois(w, u * y.base_deg)
        rhs = R.mul(host.value(j, u), w, mod)
        worst = min(worst, R.content(R.red(R.sub(lhs, rhs), mod)))
    return worst


# -- two-variable towers ------------------------------------------------------------

def _subfield_element(amb: UnramifiedField, d: int, rng, mod: int):
    """A random element of the degree-d subfield (trace of a random ambient element)."""
    z = amb.from_coords([rng.randrange(mod) for _ in range(amb.rank)])
    return relative_trace(amb, z, d, amb.f, mod)


def assemble(amb: UnramifiedField, base_deg: int, top_deg: int, h: GroupAlgebraMeasure) -> GroupAlgebraMeasure:
    """sum_sigma h^sigma [sigma^{-1}] in O_K[Gal(K/F) x (Z/p^n)^x]; keys (k, g)."""
    _check_degrees(amb, base_deg, top_deg)
    if h.u_order:
        raise ValueError("expects a one-variable level measure")
    m = top_deg // base_deg
    mod = amb.p ** (h.prec + h.den)
    out = {}
    for g, c in h.entries.items():
        if not in_subfield(amb, c, top_deg, mod):
            raise ValueError(f"coefficient at {g} is not in the subfield of degree {top_deg}")
        for k in range(m):
            out[(k, g)] = amb.frob(c, mod, -k * base_deg)
    return GroupAlgebraMeasure(amb.p, h.level, out, h.prec, amb, h.den, u_order=m)


def reduce_u(mu: GroupAlgebraMeasure, order: int) -> GroupAlgebraMeasure:
    """Push a two-variable measure along Z/u_order -> Z/order."""
    if not mu.u_order or mu.u_order % order:
        raise ValueError(f"cannot reduce u-order {mu.u_order} to {order}")
    r = mu.ring
    out: dict = {}
    for (k, g), c in mu.entries.items():
        key = (k % order, g)
        out[key] = r.add(out.get(key, r.zero), c)
    return GroupAlgebraMeasure(mu.p, mu.level, out, mu.prec, r, mu.den, u_order=order)


@dataclass
class TwoVarMeasureTower:
    amb: UnramifiedField
    base_deg: int
    degrees: list
    levels: list          # one-variable measures h_K, coefficients in O_K
    assembled: list = field(default_factory=list)

    def __post_init__(self):
        _check_degrees(self.amb, self.base_deg, *self.degrees)
        if len(self.levels) != len(self.degrees):
            raise ValueError("one measure per level")
        if not self.assembled:
            self.assembled = [assemble(self.amb, self.base_deg, d, h)
                              for d, h in zip(self.degrees, self.levels)]

    def to_json(self) -> dict:
        A = self.amb
        out = []
        for d, h in zip(self.degrees, self.levels):
            out.append({"degree": d, "defining_poly": A.modulus, "level": h.level, "prec": h.prec,
                        "entries": {str(g): list(A.coords(c)) for g, c in h.entries.items()}})
        return {"p": A.p, "base_degree": self.base_deg, "levels": out}


def assemble_two_var(amb: UnramifiedField, base_deg: int, degrees, levels) -> TwoVarMeasureTower:
    return TwoVarMeasureTower(amb, base_deg, list(degrees), list(levels))


def check_tower_compat(tower: TwoVarMeasureTower) -> dict:
    """Reduce each level's assembly to the level below and compare.

    ``defect_valuation`` is the valuation of the difference (inf when none);
    ``defect_count`` counts group elements where it is nonzero at the
    available precision.
    """
    pairs = []
    for i in range(1, len(tower.degrees)):
        lo, hi = tower.assembled[i - 1], tower.assembled[i]
        red = reduce_u(hi, lo.u_order)
        diff = red - lo
        prec = min(lo.prec, hi.prec)
        count = sum(1 for c in diff.entries.values() if diff.ring.content(c) - diff.den < prec)
        v = diff.valuation()
        pairs.append({"from_degree": tower.degrees[i], "to_degree": tower.degrees[i - 1],
                      "defect_valuation": "inf" if v >= prec else int(v), "defect_count": count})
    return {"level_pairs": pairs, "compatible": all(p["defect_count"] == 0 for p in pairs)}


def lift_tower(amb: UnramifiedField, base_deg: int, degrees, h0: GroupAlgebraMeasure, rng=None) -> TwoVarMeasureTower:
    """Trace-compatible levels above h0, built by normal-basis lifting.

    For K ⊂ L with generator x of L/K, h_L = h_K x / Tr(x) + (z - sigma_K z) has
    Tr_{L/K} h_L = h_K for any z in O_L.
    """
    rng = rng or _random.Random(0)
    degrees = list(degrees)
    levels = [h0]
    prec = h0.prec + h0.den
    mod = amb.p ** prec
    for dK, dL in zip(degrees, degrees[1:]):
        x, cert = find_normal_basis_gen(amb, dK, dL, prec)
        tr = relative_trace(amb, x, dK, dL, mod)
        if not amb.is_unit(tr):
            raise PrecisionError("normal basis generator has non-unit trace")
        lift = amb.mul(x, amb.inverse(tr, mod), mod)
        hK = levels[-1]
        ent = {}
        for g, c in hK.entries.items():
            z = _subfield_element(amb, dL, rng, mod)
            noise = amb.sub(z, amb.frob(z, mod, dK))
            ent[g] = amb.add(amb.mul(c, lift, mod), noise)
        levels.append(GroupAlgebraMeasure(amb.p, hK.level, ent, hK.prec, amb, hK.den))
    return assemble_two_var(amb, base_deg, degrees, levels)


def corrupt_tower(tower: TwoVarMeasureTower, level_index: int) -> TwoVarMeasureTower:
    """Bump one coefficient of one level by p (keeping it in its field)."""
    h = tower.levels[level_index]
    A = tower.amb
    key = next(iter(h.entries))
    ent = dict(h.entries)
    ent[key] = A.add(ent[key], A.from_int(A.p ** (h.den + 1)))
    bad = GroupAlgebraMeasure(A.p, h.level, ent, h.prec, A, h.den)
    levels = list(tower.levels)
    levels[level_index] = bad
    return assemble_two_var(A, tower.base_deg, tower.degrees, levels)


# -- unramified twists -------------------------------------------------------------

def twist_two_var(mu: GroupAlgebraMeasure, j: int, host: CharacterHost | None = None) -> GroupAlgebraMeasure:
    """[u, gamma] -> varpi_j(u)^{-1} [u, gamma]."""
    if not mu.u_order:
        raise ValueError("twist_two_var needs a two-variable measure")
    amb = mu.ring if not isinstance(mu.ring, CyclotomicRing) else mu.ring.base
    host = host or CharacterHost(amb, mu.u_order, mu.prec + mu.den)
    R = host.ring
    mod = amb.p ** (mu.prec + mu.den)
    out = {}
    for (k, g), c in mu.entries.items():
        cv = c if mu.ring == R else host.embed(c)
        out[(k, g)] = R.mul(cv, host.value(-j, k), mod)
    return GroupAlgebraMeasure(mu.p, mu.level, out, mu.prec, R, mu.den, u_order=mu.u_order)


def eval_two_var(mu: GroupAlgebraMeasure, j: int, eta, host: CharacterHost | None = None):
    """sum mu_{u,g} rho_j(u) eta(g) for eta with values in Z_p (conductor <= 1)."""
    if eta.value_level:
        raise ValueError("eval_two_var supports characters with values in Z_p")
    amb = mu.ring if not isinstance(mu.ring, CyclotomicRing) else mu.ring.base
    host = host or CharacterHost(amb, mu.u_order, mu.prec + mu.den)
    R = host.ring
    work = mu.prec + mu.den
    mod = amb.p ** work
    acc = R.zero
    for (k, g), c in mu.entries.items():
        cv = c if mu.ring == R else host.embed(c)
        ev = eta.value_raw(g, mu.level, work)
        acc = R.add(acc, R.scal(ev, R.mul(cv, host.value(j, k), mod)))
    return R.red(acc, mod)
