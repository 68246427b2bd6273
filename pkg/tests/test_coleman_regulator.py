from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padic_lab.coleman import (ColemanSeries, coleman_norm, coleman_to_measure, cyclotomic_unit,
                               interpolation_check, kubota_leopoldt, moment, regulator_series)
from padic_lab.logs import iwasawa_log
from padic_lab.measures import CharacterSpec, eval_character
from padic_lab.oracle import bernoulli, kl_moment_bernoulli, kl_moment_series
from padic_lab.precision import INF, PrecisionError
from padic_lab.rings import Zp
from padic_lab.scalar import PadicScalar
from padic_lab.series import PiSeries

P = 5


def test_cyclotomic_unit_coefficients():
    g = cyclotomic_unit(5, 3, 8, 10)
    assert [g.coeffs[k] for k in range(4)] == [3, 3, 1, 0]


def test_norm_fixes_cyclotomic_unit():
    g = cyclotomic_unit(P, 2, 10, 40)
    Ng = coleman_norm(g)
    assert Ng.truncate(40) == g.truncate(40)
    assert ColemanSeries.cyclotomic(P, 2, 10, 40).norm_defect() == INF


def test_norm_of_constant_is_p_th_power():
    c = PiSeries.constant(Zp(P), 7, 10, 8)
    assert coleman_norm(c).coeffs[0] == pow(7, P, P ** 10)


@given(st.lists(st.integers(0, 5 ** 6), min_size=2, max_size=4),
       st.lists(st.integers(0, 5 ** 6), min_size=2, max_size=4))
def test_norm_is_multiplicative(a, b):
    a[0] = a[0] * 5 + 1
    b[0] = b[0] * 5 + 2
    f = PiSeries.from_ints(P, a, 6, 40, closed=True)
    g = PiSeries.from_ints(P, b, 6, 40, closed=True)
    assert coleman_norm(f * g) == coleman_norm(f) * coleman_norm(g)


def test_non_norm_fixed_series_is_detected():
    cs = ColemanSeries(PiSeries.from_ints(P, [2, 1, 1], 8, 30, closed=True))
    assert cs.norm_defect() < INF
    with pytest.raises(ValueError):
        coleman_to_measure(cs, 1)


def test_cyclotomic_rejects_p_multiple():
    with pytest.raises(ValueError):
        ColemanSeries.cyclotomic(5, 10, 8, 20)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_interpolation_exact(n):
    assert interpolation_check(cyclotomic_unit(P, 2, 10, 40), 2, n) == INF
    assert interpolation_check(cyclotomic_unit(P, 1, 10, 40), 1, n) == INF


def test_interpolation_flags_perturbation():
    vals = [2, 1, 0, 0, 0, 1]
    g = PiSeries.from_ints(P, vals, 10, 40, closed=True)
    res = [interpolation_check(g, 2, n) for n in (1, 2, 3)]
    assert all(r < INF for r in res)


def test_regulator_series_is_psi_zero():
    w = regulator_series(cyclotomic_unit(P, 2, 12, 200))
    assert w.psi_vanishes()


def test_low_moments():
    w = regulator_series(cyclotomic_unit(P, 2, 12, 64))
    assert moment(w, 1).valuation() >= moment(w, 1).prec
    m0 = moment(w, 0)
    expect = iwasawa_log(PadicScalar(P, 2, 0, 12)) * PadicScalar.from_rational(P, Fraction(4, 5), 14)
    assert (m0 - expect).valuation() >= m0.prec - 1


def test_moment_of_simple_series():
    R = Zp(P)
    opp = PiSeries.one_plus_pi(R, 10, 20)
    for k in range(6):
        assert (moment(opp, k) - 1).is_zero()
    t = PiSeries.t(R, 10, 20)
    assert (moment(t, 1) - 1).is_zero()
    for k in (0, 2, 3):
        assert moment(t, k).is_zero()


def test_moment_needs_terms():
    with pytest.raises(PrecisionError):
        moment(PiSeries.one_plus_pi(Zp(P), 10, 8), 5)


# frozen: -(1 - p^{k-1})(a^k - 1) zeta(1 - k), zeta(1 - k) = -B_k / k
@pytest.mark.parametrize("k,val", [(2, Fraction(-1)), (3, Fraction(0)), (4, Fraction(31, 2))])
def test_kl_spot_values(k, val):
    assert kl_moment_bernoulli(5, 2, k) == val
    r = kubota_leopoldt(5, 2, k, 12, 64)
    assert r["certified"]
    x = PadicScalar.from_rational(5, val, r["digits"])
    assert r["value"] == x.digits()


def test_kl_digit_strings_frozen():
    assert kubota_leopoldt(5, 2, 2, 12, 64)["value"] == "44444444"
    assert kubota_leopoldt(5, 2, 4, 12, 64)["value"] == "30322222"


@pytest.mark.parametrize("p,a", [(3, 2), (5, 3), (7, 2), (7, 3)])
def test_two_oracles_agree(p, a):
    for k in range(1, 9):
        assert kl_moment_series(p, a, k) == kl_moment_bernoulli(p, a, k)


def test_bernoulli_oracle_formula():
    p, a, k = 7, 3, 6
    zeta_1_minus_k = -bernoulli(k) / k
    assert kl_moment_bernoulli(p, a, k) == -(1 - Fraction(p) ** (k - 1)) * (a ** k - 1) * zeta_1_minus_k


def test_regulator_factorization():
    out = coleman_to_measure(ColemanSeries.cyclotomic(P, 2, 12, 500), 2)
    for j in range(7):
        eta = CharacterSpec(P, 0, 0, j)
        lhs, lp = out.L.evaluate(eta)
        rhs = eval_character(out.h, eta)
        diff = lhs - rhs * j
        assert diff.valuation() >= min(lp, rhs.prec)
    assert set(out.guard) == {"log_and_phi_over_p", "mellin_inverse", "ell_0"}
