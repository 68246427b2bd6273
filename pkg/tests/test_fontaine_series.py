import random

import pytest
from hypothesis import given, strategies as st

from padic_lab.coleman import cyclotomic_unit
from padic_lab.logs import iwasawa_log
from padic_lab.precision import INF
from padic_lab.rings import UnramifiedElem, Zp, make_unramified
from padic_lab.scalar import PadicScalar
from padic_lab.series import PiSeries, log_unit_series

P, N, M = 5, 10, 64


def rand_series(rng, p=P, prec=N, M=M, closed=False, unit=False, ring=None):
    ring = ring or Zp(p)
    mod = p ** prec
    cs = [ring.from_coords([rng.randrange(mod) for _ in range(ring.rank)]) for _ in range(M)]
    if unit:
        cs[0] = ring.from_coords([rng.randrange(1, p)] + [0] * (ring.rank - 1))
    return PiSeries(ring, cs, prec, closed=closed)


def agree_on(f, g, m):
    """f = g on the first m coefficients, to their common precision."""
    return f.truncate(m).agree_digits(g.truncate(m)) >= min(f.prec, g.prec)


def test_phi_of_pi():
    R = Zp(P)
    f = PiSeries.pi(R, N, 12).phi()
    expect = PiSeries.binomial(R, P, N, 12) - PiSeries.constant(R, 1, N, 12)
    assert f == expect


def test_phi_t_is_p_t():
    t = PiSeries.t(Zp(P), N, M)
    assert agree_on(t.phi(), t.scale_p(1), M - P)


def test_phi_on_unramified_constant():
    F = make_unramified(3, 8, 2)
    c = F.from_coords([2, 1])
    f = PiSeries.constant(F, c, 8, 4).phi()
    assert f.coeffs[0] == F.frob(c, 3 ** 8)


@pytest.mark.parametrize("seed", range(10))
def test_psi_phi_identity_open(seed):
    f = rand_series(random.Random(seed))
    g = f.phi().psi()
    assert g.M >= 1
    assert agree_on(g, f, g.M)


@given(st.lists(st.integers(0, 5 ** 8), min_size=1, max_size=12))
def test_psi_phi_identity_closed(vals):
    f = PiSeries.from_ints(5, vals, 8, 64, closed=True)
    assert f.phi().psi().truncate(len(vals)) == f.truncate(len(vals))


def test_psi_values():
    R = Zp(P)
    assert PiSeries.one_plus_pi(R, N, 8).psi().is_zero()
    one = PiSeries.constant(R, 1, N, 8)
    assert one.psi().truncate(1) == one.truncate(1)
    assert PiSeries.one_plus_pi(R, N, 8).psi_vanishes()
    assert not one.psi_vanishes()


def test_gamma_act_identity_and_t():
    R = Zp(P)
    t = PiSeries.t(R, N, M)
    assert t.gamma_act(1) == t
    c = 7
    lhs = t.gamma_act(c)
    assert agree_on(lhs, t * PadicScalar(P, c, 0, N + 4), M - P)


@pytest.mark.parametrize("seed", range(5))
def test_gamma_act_composes(seed):
    rng = random.Random(seed)
    f = rand_series(rng, M=24)
    a, b = 2, 3
    assert agree_on(f.gamma_act(a).gamma_act(b), f.gamma_act(a * b), 24)


def test_deriv_examples():
    R = Zp(P)
    opp = PiSeries.one_plus_pi(R, N, 12)
    assert opp.deriv() == opp.truncate(11)
    t = PiSeries.t(R, N, M)
    one = PiSeries.constant(R, 1, N, M - 1)
    assert agree_on(t.deriv(), one, M - 2)


@pytest.mark.parametrize("seed", range(5))
def test_deriv_leibniz(seed):
    rng = random.Random(seed)
    f, g = rand_series(rng, M=20, closed=True), rand_series(rng, M=20, closed=True)
    lhs = (f * g).deriv()
    rhs = f.truncate(19) * g.deriv() + g.truncate(19) * f.deriv()
    assert agree_on(lhs, rhs, 19)


def test_log_of_one_plus_pi_is_t():
    R = Zp(P)
    assert agree_on(log_unit_series(PiSeries.one_plus_pi(R, N, M)), PiSeries.t(R, N, M), M)


def test_log_constant_term_is_iwasawa_log():
    for a in (2, 3, 4):
        g = cyclotomic_unit(P, a, N, 16)
        lg = log_unit_series(g)
        c0 = PadicScalar(P, lg.coeffs[0], lg.den, lg.prec)
        assert (c0 - iwasawa_log(PadicScalar(P, a, 0, N))).is_zero()


@pytest.mark.parametrize("seed", range(5))
def test_log_is_multiplicative(seed):
    rng = random.Random(seed)
    f = rand_series(rng, M=40, unit=True)
    g = rand_series(rng, M=40, unit=True)
    assert agree_on(log_unit_series(f * g), log_unit_series(f) + log_unit_series(g), 40)


def test_log_over_unramified_ring():
    F = make_unramified(3, 8, 2)
    rng = random.Random(3)
    f = rand_series(rng, p=3, prec=8, M=20, unit=True, ring=F)
    g = rand_series(rng, p=3, prec=8, M=20, unit=True, ring=F)
    assert agree_on(log_unit_series(f * g), log_unit_series(f) + log_unit_series(g), 20)
    c = UnramifiedElem(F, f.coeffs[0], 8)
    lg = log_unit_series(f)
    assert F.red(F.sub(F.scal(1, lg.coeffs[0]), F.scal(3 ** lg.den, iwasawa_log(c).raw)), 3 ** (8 + lg.den)) == F.zero


def test_psi_bound_is_honest():
    # a tail-limited open series: psi keeps only the certified head
    f = rand_series(random.Random(9), M=30)
    g = f.psi()
    assert all(f.psi_error(m) >= g.prec for m in range(g.M))
    assert f.psi_error(29) < INF
