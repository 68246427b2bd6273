from fractions import Fraction

import pytest

from padic_lab.epsilon import (WeilCharacter, epsilon_factor, gamma_star, gauss_product_check, gauss_sum,
                               l_factor, omega_value)
from padic_lab.measures import CharacterSpec, characters_up_to
from padic_lab.rings import wrap

PREC = 10


def primitive(p, n):
    return [e for e in characters_up_to(p, n) if e.conductor == n]


def test_quadratic_gauss_sum_squared():
    tau = gauss_sum(CharacterSpec(5, 2), PREC)
    R = tau.ring
    sq = wrap(R, R.mul(tau.raw, tau.raw, 5 ** PREC), PREC)
    assert (sq - wrap(R, R.from_int(5), PREC)).is_zero()


@pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 1), (5, 2)])
def test_gauss_product_identity(p, n):
    chars = primitive(p, n)
    assert chars
    assert all(gauss_product_check(e, PREC) for e in chars)


@pytest.mark.parametrize("gamma", [2, 3, 7])
def test_gauss_sum_changes_by_character_value(gamma):
    eta = CharacterSpec(5, 1, 2, 0, 1)
    tau = gauss_sum(eta, PREC)
    tg = gauss_sum(eta, PREC, zeta_exp=gamma)
    R = tau.ring
    w = omega_value(eta, gamma, R, PREC)
    assert (tg - wrap(R, R.mul(w, tau.raw, 5 ** PREC), PREC)).is_zero()


def test_gauss_sum_rejects_unramified():
    with pytest.raises(ValueError):
        gauss_sum(CharacterSpec(5, 0), PREC)


def test_unramified_epsilon_is_one():
    res = epsilon_factor(WeilCharacter(CharacterSpec(5), 3, Fraction(2)), PREC)
    assert res.agree
    assert (res.closed - 1).is_zero()


@pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 1), (5, 2)])
@pytest.mark.parametrize("j", [-1, 0, 2])
def test_epsilon_closed_equals_direct(p, n, j):
    for eta in primitive(p, n):
        res = epsilon_factor(WeilCharacter(eta, j, Fraction(1)), PREC)
        assert res.agree
        assert (res.closed - res.direct).valuation() >= res.closed.prec


def test_epsilon_with_frobenius_value():
    om = WeilCharacter(CharacterSpec(5, 2), 0, Fraction(3, 2))
    assert epsilon_factor(om, PREC).agree
    with pytest.raises(ValueError):
        WeilCharacter(CharacterSpec(5, 2), 0, Fraction(5))


def test_epsilon_weight_shift_is_p_power():
    eta = CharacterSpec(5, 1, 2, 0, 1)
    e0 = epsilon_factor(WeilCharacter(eta, 0), PREC).closed
    e1 = epsilon_factor(WeilCharacter(eta, 1), PREC).closed
    assert (e1 - e0 * 25).valuation() >= min(e1.prec, e0.prec)


def test_finite_weight_is_folded():
    om = WeilCharacter(CharacterSpec(5, 1, 0, 3))
    assert om.weight == 3 and om.finite.weight == 0


def test_l_factors():
    assert l_factor(WeilCharacter(CharacterSpec(5, 1))) == [1]
    assert l_factor(WeilCharacter(CharacterSpec(5))) == [1, -1]
    for j in (-2, 1, 3):
        assert l_factor(WeilCharacter(CharacterSpec(5), j)) == [1, -Fraction(1, 5) ** j]
    assert l_factor(WeilCharacter(CharacterSpec(5), 0, Fraction(2))) == [1, Fraction(-1, 2)]


@pytest.mark.parametrize("j,val", [(0, 1), (-1, 1), (-2, -1), (3, 6), (-4, Fraction(-1, 6))])
def test_gamma_star(j, val):
    assert gamma_star(j) == val
