"""Gauss sums, epsilon- and L-factors of Weil characters, and Gamma*.

A Weil character is kept in split form omega = chi^j * omega' with omega'
finitely ramified (a ``CharacterSpec`` of weight 0) and a Frobenius value
omega'(phi) for its unramified part.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from . import _arith
from .measures import CharacterSpec, gauss_sum_raw, lift_into, units, value_ring
from .precision import INF, PrecisionError, vp
from .rings import CyclotomicRing, wrap


@dataclass(frozen=True)
class WeilCharacter:
    finite: CharacterSpec
    weight: int = 0
    frob: Fraction = Fraction(1)

    def __post_init__(self):
        if self.finite.weight:
            object.__setattr__(self, "weight", self.weight + self.finite.weight)
            object.__setattr__(self, "finite", self.finite.finite_part())
        fr = Fraction(self.frob)
        if vp(fr.numerator, self.p) or vp(fr.denominator, self.p):
            raise ValueError("the Frobenius value must be a p-adic unit")
        object.__setattr__(self, "frob", fr)

    @property
    def p(self) -> int:
        return self.finite.p

    @property
    def conductor(self) -> int:
        return self.finite.conductor

    @classmethod
    def from_spec(cls, eta: CharacterSpec, frob=1) -> "WeilCharacter":
        return cls(eta.finite_part(), eta.weight, Fraction(frob))

    def to_json(self) -> dict:
        out = self.finite.to_json()
        out["weight"] = self.weight
        out["frob"] = str(self.frob)
        return out


def _unit_mod(x: Fraction, p: int, prec: int) -> int:
    mod = p ** prec
    return x.numerator * pow(x.denominator, -1, mod) % mod


def gauss_sum(omega, prec: int, zeta_exp: int = 1):
    """tau(omega', zeta^zeta_exp) = sum_a omega'(a)^{-1} zeta^(zeta_exp * a) in Z_p[zeta_{p^n}]."""
    eta = omega.finite if isinstance(omega, WeilCharacter) else omega.finite_part()
    n = eta.conductor
    if n == 0:
        raise ValueError("unramified character: no Gauss sum")
    if zeta_exp % eta.p == 0:
        raise ValueError("zeta_exp must be prime to p")
    # zeta -> zeta^gamma must not touch the character values, which may
    # themselves involve p-power roots of unity
    R, raw = gauss_sum_raw(eta, prec, zeta_exp)
    return wrap(R, raw, prec)


def omega_value(eta: CharacterSpec, a: int, R: CyclotomicRing, prec: int):
    """omega'(a) as a raw element of R."""
    src = value_ring(eta.p, eta.value_level)
    return lift_into(R, src, eta.finite_part().omega_raw(a, prec))


def _p_power_over(R: CyclotomicRing, tau_raw, n: int, prec: int):
    """p^n / tau by an exact rational solve of the multiplication matrix.

    The integer lift of tau is taken deep enough that the error stays below
    p^prec: the solve loses at most v(N(tau)) = n * [K:Q_p] / 2 digits.
    """
    p = R.p
    loss = -(-n * R.degree // 2)
    W = prec + loss + 1
    mat = R.mul_matrix(tau_raw, p ** W)
    inv = _arith.inverse_rational(mat)
    rhs = R.coords(R.from_int(p ** n))
    x = [sum(row[i] * rhs[i] for i in range(len(rhs))) for row in inv]
    mod = p ** prec
    out = []
    for c in x:
        if vp(c.denominator, p):
            raise ArithmeticError("p^n / tau is not integral: Gauss sum is wrong")
        out.append(c.numerator * pow(c.denominator, -1, mod) % mod)
    return R.from_coords(out)


@dataclass
class EpsilonResult:
    closed: object
    direct: object
    agree: bool

    def to_json(self) -> dict:
        return {"closed": self.closed.to_json(), "direct": self.direct.to_json(), "agree": self.agree}


def epsilon_factor(omega: WeilCharacter, prec: int) -> EpsilonResult:
    """epsilon(omega^{-1}) by the closed form and by the direct additive-character sum.

    closed: p^{n(1+j)} omega'(phi)^n / tau(omega', zeta)
    direct: p^{nj} omega'(phi)^n sum_a omega'(a) zeta^{-a}
    """
    p, n, j = omega.p, omega.conductor, omega.weight
    if n == 0:
        R = CyclotomicRing(p, 0)
        one = wrap(R, R.one, prec)
        return EpsilonResult(one, one, True)
    eta = omega.finite
    R, tau = gauss_sum_raw(eta, prec + n)
    if R.content(tau) == INF:
        raise ArithmeticError("Gauss sum vanished")
    mod = p ** prec
    fr = pow(_unit_mod(omega.frob, p, prec), n, mod)
    base = _p_power_over(R, tau, n, prec)
    acc = R.zero
    for a in units(p, n):
        acc = R.add(acc, R.mul(omega_value(eta, a, R, prec), R.zeta_power(-a), mod))
    e = n * j
    den = max(0, -e)
    shift = p ** max(e, 0)
    # raw values are known mod p^prec, so p^{-den} costs den absolute digits
    if den >= prec:
        raise PrecisionError(f"epsilon at weight {j} needs more than {den} digits")
    closed = wrap(R, R.scal(fr * shift, base), prec - den, den)
    direct = wrap(R, R.scal(fr * shift, acc), prec - den, den)
    agree = (closed - direct).valuation() >= prec - den
    if not agree:
        raise ArithmeticError("epsilon closed form disagrees with the direct sum")
    return EpsilonResult(closed, direct, agree)


def l_factor(omega: WeilCharacter) -> list:
    """Coefficients [1, -u] of 1 - uX, or [1] when omega' is ramified.

    u = p^{-j} omega'(Frob)^{-1}, with the stored Frobenius value.
    """
    if omega.conductor:
        return [Fraction(1)]
    u = Fraction(1, 1) / (Fraction(omega.p) ** omega.weight * omega.frob)
    return [Fraction(1), -u]


def gamma_star(j: int) -> Fraction:
    """Leading Taylor coefficient of Gamma at 1 + j."""
    if j >= 0:
        return Fraction(factorial(j))
    m = -j - 1
    return Fraction((-1) ** m, factorial(m))


def gauss_product_check(eta: CharacterSpec, prec: int) -> bool:
    """tau(omega) tau(omega^{-1}) = omega(-1) p^n."""
    R, t1 = gauss_sum_raw(eta, prec)
    _, t2 = gauss_sum_raw(eta.finite_part().inverse(), prec)
    mod = eta.p ** prec
    lhs = R.mul(t1, t2, mod)
    rhs = R.from_int(eta.omega_minus_one() * eta.p ** eta.conductor)
    return R.red(R.sub(lhs, rhs), mod) == R.zero
