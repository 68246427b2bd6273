import random

import pytest

from padic_lab.measures import CharacterSpec, GroupAlgebraMeasure
from padic_lab.precision import INF
from padic_lab.rings import make_unramified
from padic_lab.yager import (CharacterHost, assemble, check_tower_compat, corrupt_tower, eval_two_var,
                             find_normal_basis_gen, in_subfield, lift_tower, normal_basis_certificate,
                             period, period_identity_defect, reduce_u, reduce_yager, relative_trace,
                             twist_two_var, yager_map)

PREC = 8


@pytest.fixture(scope="module")
def amb9():
    return make_unramified(3, PREC, 9)


def sub_elem(amb, d, rng):
    mod = amb.p ** PREC
    z = amb.from_coords([rng.randrange(mod) for _ in range(amb.rank)])
    return relative_trace(amb, z, d, amb.f, mod)


def test_trivial_extension(amb9):
    x = sub_elem(amb9, 3, random.Random(0))
    y = yager_map(x, amb9, 3, 3, PREC)
    assert y.order == 1 and y.coeffs[0] == amb9.red(x, 3 ** PREC)


def test_yager_map_rejects_element_outside_subfield(amb9):
    with pytest.raises(ValueError):
        yager_map(amb9.gen, amb9, 1, 3, PREC)


@pytest.mark.parametrize("base,top", [(1, 3), (3, 9), (1, 9)])
def test_semilinearity(amb9, base, top):
    rng = random.Random(base * 10 + top)
    mod = 3 ** PREC
    for _ in range(3):
        x = sub_elem(amb9, top, rng)
        y = yager_map(x, amb9, base, top, PREC)
        assert y.semilinearity_defect() == INF
        for g in range(y.order):
            xg = amb9.frob(x, mod, g * base)
            assert yager_map(xg, amb9, base, top, PREC) == y.group_mul(g)


def test_reduce_is_yager_of_trace(amb9):
    rng = random.Random(5)
    mod = 3 ** PREC
    for _ in range(5):
        x = sub_elem(amb9, 9, rng)
        red = reduce_yager(yager_map(x, amb9, 1, 9, PREC), 3)
        assert red == yager_map(relative_trace(amb9, x, 3, 9, mod), amb9, 1, 3, PREC)
        assert red.coefficients_in_top()
        same = yager_map(x, amb9, 1, 9, PREC)
        assert reduce_yager(same, 9) == same


def test_normal_basis_certificates(amb9):
    assert not normal_basis_certificate(amb9.one, amb9, 1, 3).ok
    x, cert = find_normal_basis_gen(amb9, 1, 9, PREC)
    assert cert.ok and cert.det_mod_p not in (None, 0)
    # any lift of the residue generates too
    z = amb9.scal(3, sub_elem(amb9, 9, random.Random(1)))
    assert normal_basis_certificate(amb9.add(x, z), amb9, 1, 9).ok


def test_normal_basis_p5_f2():
    F = make_unramified(5, PREC, 2)
    x, cert = find_normal_basis_gen(F, 1, 2, PREC)
    assert cert.ok and cert.det_mod_p % 5
    y = yager_map(x, F, 1, 2, PREC)
    assert F.is_unit(F.sub(F.mul(y.coeffs[0], y.coeffs[0], 5), F.mul(y.coeffs[1], y.coeffs[1], 5)))


def test_trivial_period_is_trace(amb9):
    x = sub_elem(amb9, 9, random.Random(2))
    y = yager_map(x, amb9, 3, 9, PREC)
    host = CharacterHost(amb9, y.order, PREC)
    w = period(y, 0, host)
    # order 3 = p: values sit in the level-1 cyclotomic ring over the ambient field
    assert all(c == amb9.zero for c in w[1:])
    assert w[0] == relative_trace(amb9, x, 3, 9, 3 ** PREC)
    assert in_subfield(amb9, w[0], 3, 3 ** PREC)


def test_period_identity_p5_f2():
    F = make_unramified(5, PREC, 2)
    x, _ = find_normal_basis_gen(F, 1, 2, PREC)
    y = yager_map(x, F, 1, 2, PREC)
    host = CharacterHost(F, 2, PREC)
    for j in range(2):
        assert period_identity_defect(y, j, host) == INF
    assert host.is_unit(period(y, 1, host))


def test_periods_of_degree_nine_level(amb9):
    x, _ = find_normal_basis_gen(amb9, 1, 9, PREC)
    y = yager_map(x, amb9, 1, 9, PREC)
    host = CharacterHost(amb9, 9, PREC)
    for j in range(9):
        assert period_identity_defect(y, j, host) == INF
        assert host.is_unit(period(y, j, host))


def test_character_host_rejects_mixed_order(amb9):
    with pytest.raises(ValueError):
        CharacterHost(amb9, 6, PREC)


def _h0(amb, rng, level=2):
    z = GroupAlgebraMeasure.random(3, level, PREC, 3, rng)
    return GroupAlgebraMeasure(3, level, {g: amb.from_int(c) for g, c in z.entries.items()}, PREC, amb)


def test_single_level_assembly_is_semilinear(amb9):
    rng = random.Random(3)
    h0 = _h0(amb9, rng)
    tower = lift_tower(amb9, 1, [1, 3], h0, rng)
    A = tower.assembled[1]
    mod = 3 ** PREC
    for u in range(3):
        # A^u = [u] A on the u-variable
        lhs = {k: amb9.frob(c, mod, u) for k, c in A.entries.items()}
        rhs = {((k + u) % 3, g): c for (k, g), c in A.entries.items()}
        assert lhs == rhs


def test_tower_compat_and_corruption(amb9):
    rng = random.Random(4)
    tower = lift_tower(amb9, 1, [1, 3, 9], _h0(amb9, rng), rng)
    rep = check_tower_compat(tower)
    assert rep["compatible"]
    assert all(p["defect_count"] == 0 and p["defect_valuation"] == "inf" for p in rep["level_pairs"])
    for i in (1, 2):
        bad = check_tower_compat(corrupt_tower(tower, i))
        assert not bad["compatible"]
        assert sum(p["defect_count"] for p in bad["level_pairs"]) >= 1
        assert all(p["defect_valuation"] == "inf" or 1 <= p["defect_valuation"] < PREC
                   for p in bad["level_pairs"])


def test_assemble_rejects_coefficients_outside_level(amb9):
    h = GroupAlgebraMeasure(3, 1, {1: amb9.gen}, PREC, amb9)
    with pytest.raises(ValueError):
        assemble(amb9, 1, 3, h)


def test_twists(amb9):
    rng = random.Random(6)
    tower = lift_tower(amb9, 1, [1, 3], _h0(amb9, rng), rng)
    A = tower.assembled[1]
    host = CharacterHost(amb9, 3, PREC)
    base = twist_two_var(A, 0, host)
    assert base.entries == {k: host.embed(c) for k, c in A.entries.items()}
    for j in (1, 2):
        assert twist_two_var(twist_two_var(A, j, host), -j, host) == base
    # group-element image [u] -> varpi(u)^{-1} [u]
    d = GroupAlgebraMeasure(3, 2, {(1, 1): amb9.one}, PREC, amb9, u_order=3)
    tw = twist_two_var(d, 1, host)
    assert tw.entries[(1, 1)] == host.ring.red(host.value(-1, 1), 3 ** PREC)


def test_twist_intertwines_evaluation(amb9):
    rng = random.Random(7)
    tower = lift_tower(amb9, 1, [1, 3], _h0(amb9, rng), rng)
    A = tower.assembled[1]
    host = CharacterHost(amb9, 3, PREC)
    eta = CharacterSpec(3, 1, 0, 1)
    lhs = eval_two_var(twist_two_var(A, 1, host), 2, eta, host)
    rhs = eval_two_var(A, 1, eta, host)
    assert lhs == rhs


def test_reduce_u_to_trivial_group_is_trace(amb9):
    rng = random.Random(8)
    h0 = _h0(amb9, rng)
    tower = lift_tower(amb9, 1, [1, 3], h0, rng)
    assert reduce_u(tower.assembled[1], 1).entries == {(0, g): c for g, c in h0.entries.items()}
