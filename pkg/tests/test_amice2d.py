import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padic_lab.amice import (CellDistribution2D, MahlerCoeffs2D, basis_element, binom_poly, convolve,
                             ell_index, growth_constant, mahler_expand, order_norm, shear_pullback,
                             shear_pullback_basis, shear_pushforward)
from padic_lab.precision import INF


@pytest.mark.parametrize("n,p,m", [(0, 3, 0), (1, 3, 1), (3, 2, 2), (8, 3, 2), (9, 3, 3), (24, 5, 2), (25, 5, 3)])
def test_ell_index(n, p, m):
    assert ell_index(n, p) == m


def test_mahler_one_variable_examples():
    assert mahler_expand([7] * 5).nonzero() == {(0, 0): 7}
    assert mahler_expand(list(range(6))).nonzero() == {(1, 0): 1}
    assert mahler_expand([k * k for k in range(6)]).nonzero() == {(1, 0): 1, (2, 0): 2}


def test_mahler_sample_shortfall():
    with pytest.raises(ValueError):
        mahler_expand([0, 1, 2], cutoff=5)


@given(st.lists(st.lists(st.integers(-50, 50), min_size=4, max_size=4), min_size=4, max_size=4))
def test_mahler_two_variable_round_trip(grid):
    f = mahler_expand(grid, p=3)
    for x1 in range(4):
        for x2 in range(4):
            assert f(x1, x2) == grid[x1][x2]
    # expand o eval = identity on coefficient arrays
    g = mahler_expand([[f(x1, x2) for x2 in range(4)] for x1 in range(4)], p=3)
    assert g == f


def test_order_norm_examples():
    for n1, n2 in [(0, 0), (2, 5), (9, 3)]:
        assert order_norm(basis_element(3, n1, n2, (Fraction(1, 2), Fraction(2, 3)))) == 0
    f = mahler_expand([k for k in range(4)], p=5)
    assert order_norm(f, (0, 0)) == 0
    assert order_norm(f.scaled(5), (0, 0)) == 1


def test_growth_constant_examples():
    assert growth_constant(CellDistribution2D.dirac(3, (2, 2)), (0, 0)).C == 0
    H = CellDistribution2D.haar_type(3, (3, 3))
    rep = growth_constant(H, (1, 1))
    assert rep.C == 0 and rep.bounded
    for a in (Fraction(0), Fraction(1, 2), Fraction(3, 4)):
        bad = growth_constant(H, (a, 1))
        assert not bad.bounded
        assert bad.C <= -(1 - a) * 3


def test_growth_constant_reports_single_order_scan():
    rep = growth_constant(CellDistribution2D.haar_type(3, (3, 3)), (1, 1))
    # single-h condition with h = 1 at equal levels: v = -2n, so -2n + n = -n
    assert rep.single_order == {0: 0, 1: -1, 2: -2, 3: -3}


def test_cells_additivity():
    mu = CellDistribution2D.random(3, (2, 3), (Fraction(1, 2), 0), random.Random(1))
    assert mu.coarsen(0, 0).cells.get((0, 0), 0) == mu.total_mass()
    c = mu.coarsen(1, 2)
    assert c.coarsen(0, 1) == mu.coarsen(0, 1)
    with pytest.raises(ValueError):
        mu.coarsen(3, 3)


def test_cell_json_round_trip():
    mu = CellDistribution2D.random(3, (1, 2), (0, 0), random.Random(2))
    d = mu.to_json()
    assert set(d) == {"p", "bilevel", "cells"}
    assert CellDistribution2D.from_json(d) == mu


def test_shear_examples():
    f = basis_element(3, 2, 3, (0, 1))
    assert shear_pullback(f, 0) == f
    assert shear_pullback_basis(3, 0, 1, 1, 0).nonzero() == {(1, 0): 1, (0, 1): 1}


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("a", [1, 2])
def test_shear_integrality(p, a):
    for h in (Fraction(1, 3), Fraction(1, 2), Fraction(1)):
        for n1 in range(7):
            for n2 in range(7):
                assert order_norm(shear_pullback_basis(p, n1, n2, a, h)) >= 0


@given(st.integers(0, 4), st.integers(0, 4), st.integers(-2, 3), st.integers(-2, 3))
def test_shear_group_law(n1, n2, a, b):
    f = basis_element(3, n1, n2, (0, 1))
    assert shear_pullback(shear_pullback(f, a), b) == shear_pullback(f, a + b)


@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 3), st.integers(-6, 6), st.integers(-6, 6))
def test_shear_pullback_is_substitution(n1, n2, a, x1, x2):
    f = basis_element(5, n1, n2)
    g = shear_pullback(f, a)
    assert g(x1, x2) == binom_poly(x1, n1) * binom_poly(a * x1 + x2, n2)


def test_wrong_coordinate_shear_breaks_order_0_1():
    D = CellDistribution2D.dirac_times_haar(3, (4, 4))
    assert growth_constant(D, (0, 1)).C == 0
    ok = growth_constant(shear_pushforward(D, 2, coordinate=2), (0, 1))
    assert ok.bounded and ok.C == 0
    bad = growth_constant(shear_pushforward(D, 1, coordinate=1), (0, 1))
    assert not bad.bounded and bad.C <= -4


def test_convolution_of_diracs():
    a = CellDistribution2D.dirac(3, (2, 2), (1, 5))
    b = CellDistribution2D.dirac(3, (2, 2), (8, 7))
    assert convolve(a, b) == CellDistribution2D.dirac(3, (2, 2), (0, 3))


def test_convolution_rejects_mismatch():
    with pytest.raises(ValueError):
        convolve(CellDistribution2D.dirac(3, (2, 2)), CellDistribution2D.dirac(3, (2, 1)))


@pytest.mark.parametrize("seed", range(5))
def test_convolution_commutative_associative(seed):
    rng = random.Random(seed)
    x, y, z = (CellDistribution2D.random(3, (2, 2), (0, 0), rng) for _ in range(3))
    assert convolve(x, y) == convolve(y, x)
    assert convolve(convolve(x, y), z) == convolve(x, convolve(y, z))


@pytest.mark.parametrize("seed", range(10))
def test_convolution_growth_superadditive(seed):
    rng = random.Random(seed)
    o1 = (Fraction(rng.randrange(4), 4), Fraction(rng.randrange(4), 4))
    o2 = (Fraction(rng.randrange(4), 4), Fraction(rng.randrange(4), 4))
    m1 = CellDistribution2D.random(3, (2, 2), o1, rng)
    m2 = CellDistribution2D.random(3, (2, 2), o2, rng)
    prod = convolve(m1, m2)
    assert prod.order == (o1[0] + o2[0], o1[1] + o2[1])
    c = growth_constant(prod, prod.order).C
    assert c >= growth_constant(m1, o1).C + growth_constant(m2, o2).C


def test_moment_scan_on_dirac():
    rep = growth_constant(CellDistribution2D.dirac(3, (2, 2)), (0, 0), max_k=2)
    assert rep.C == 0


def test_mahler_json():
    f = MahlerCoeffs2D.from_dict(3, {(1, 2): Fraction(1, 3)})
    assert f.to_json()["coeffs"] == [[1, 2, "1/3"]]
    assert order_norm(MahlerCoeffs2D(3, [[0]])) == INF
