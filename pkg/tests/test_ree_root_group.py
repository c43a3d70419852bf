import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ree_unital import ree_root_group as rr
from ree_unital.finite_fields import make_field
from ree_unital.ree_root_group import (
    INF,
    DomainError,
    InvolutionParam,
    XiElt,
    commutator,
    commutator_word,
    eta,
    involution_fixed_points,
    norm,
    omega,
    xi_cube,
    xi_inv,
    xi_mul,
)


def rand_xi(F, rng):
    return XiElt.from_codes(F, *(rng.randrange(F.q) for _ in range(3)))


def test_mul_examples(gf3):
    x = XiElt.of(gf3, 1, 0, 0)
    assert xi_mul(x, XiElt.of(gf3, 0, 1, 0)) == XiElt.of(gf3, 1, 1, 1)
    o = XiElt.identity(gf3)
    for xi in (x, XiElt.of(gf3, 2, 1, 2)):
        assert o * xi == xi * o == xi
        assert xi * xi_inv(xi) == o


def test_context_mismatch(gf3, gf27):
    with pytest.raises(ValueError):
        xi_mul(XiElt.identity(gf3), XiElt.identity(gf27))
    with pytest.raises(ValueError):
        XiElt(gf3.one, gf27.one, gf3.one)


@pytest.mark.parametrize("n", [1, 3, 5, 9])
def test_associativity_vectorized(n):
    F = make_field(n)
    rng = np.random.default_rng(n)
    a, b, c = (rng.integers(0, F.q, (3, 10_000)) for _ in range(3))
    ab = rr.mul_codes(F, *a, *b)
    lhs = rr.mul_codes(F, *ab, *c)
    rhs = rr.mul_codes(F, *a, *rr.mul_codes(F, *b, *c))
    for u, v in zip(lhs, rhs):
        assert np.array_equal(u, v)


def test_inverse_and_cube(gf3, gf27):
    assert xi_inv(XiElt.of(gf3, -1, 0, 1)) == XiElt.of(gf3, 1, 1, -1)
    # the group law gives <1,0,0>^3 = <0,0,-1>, so the cube is <0,0,-a^(t+2)>
    assert xi_cube(XiElt.of(gf3, 1, 0, 0)) == XiElt.of(gf3, 0, 0, -1)
    assert XiElt.of(gf3, 1, 0, 0) ** 3 != XiElt.of(gf3, 0, 0, 1)
    rng = random.Random(5)
    for _ in range(1000):
        xi = rand_xi(gf27, rng)
        assert xi_cube(xi) == xi * xi * xi
        assert xi_inv(xi) * xi == XiElt.identity(gf27)
        assert (xi**9).is_identity()


def test_norm_examples(gf3, gf27):
    assert norm(XiElt.of(gf3, 0, 1, 1)) == -1
    for c in gf27.elements():
        assert norm(XiElt(gf27.zero, gf27.zero, c)) == c * c
    rng = random.Random(7)
    for _ in range(300):
        xi = rand_xi(gf27, rng)
        s = gf27(rng.randrange(1, 27))
        scale = s.theta() * s.theta() * s**4
        assert norm(eta(s, xi)) == scale * norm(xi)


@pytest.mark.parametrize("n", [1, 3])
def test_norm_nonzero_off_identity(n):
    F = make_field(n)
    ids = np.arange(2, F.q**3 + 1)
    assert np.all(rr.norm_codes(F, *rr.decode(F, ids)) != 0)


def test_omega_examples(gf3):
    assert omega(XiElt.of(gf3, 0, 0, -1)) == XiElt.of(gf3, -1, 0, 1)
    assert omega(XiElt.of(gf3, 0, 1, 1)) == XiElt.of(gf3, 0, 1, 1)
    assert omega(INF, gf3) == XiElt.identity(gf3)
    assert omega(XiElt.identity(gf3)) is INF


def test_omega_simplified_formula_for_prime_field(gf3):
    # For |K| = 3 (theta = id): N = -ac - a^2b^2 + b^2 + c^2 - a^2 and
    # omega = 1/(ac + a^2b^2 - b^2 - c^2 + a^2) <ab - c + ab^2 + bc - a, a^2b - ac + b - a^2, c>
    for a in range(3):
        for b in range(3):
            for c in range(3):
                if (a, b, c) == (0, 0, 0):
                    continue
                n = (-a * c - a * a * b * b + b * b + c * c - a * a) % 3
                k = pow(-n % 3, -1, 3)
                want = XiElt.of(gf3, k * (a * b - c + a * b * b + b * c - a), k * (a * a * b - a * c + b - a * a), k * c)
                assert omega(XiElt.of(gf3, a, b, c)) == want


@pytest.mark.parametrize("n", [1, 3])
def test_omega_is_an_involution_on_points(n):
    F = make_field(n)
    ids = rr.all_ids(F)
    w = rr.omega_ids(F, ids)
    assert np.array_equal(rr.omega_ids(F, w), ids)
    assert w[rr.INF_ID] == rr.ORIGIN_ID and w[rr.ORIGIN_ID] == rr.INF_ID


def test_omega_inverts_eta_prime_field(gf3):
    ids = rr.all_ids(gf3)
    for s in (1, 2):
        lhs = rr.omega_ids(gf3, rr.eta_ids(gf3, rr.omega_ids(gf3, ids), s))
        assert np.array_equal(lhs, rr.eta_ids(gf3, ids, int(gf3.inv(s))))


def test_omega_inverts_eta_gf27(gf27):
    ids = rr.all_ids(gf27)
    for s in random.Random(3).sample(range(1, 27), 20):
        lhs = rr.omega_ids(gf27, rr.eta_ids(gf27, rr.omega_ids(gf27, ids), s))
        assert np.array_equal(lhs, rr.eta_ids(gf27, ids, int(gf27.inv(s))))


def test_norm_zero_raises(gf3):
    with pytest.raises(DomainError):
        rr.omega_codes(gf3, 0, 0, 0)


def test_eta(gf3, gf27):
    for F in (gf3, gf27):
        rng = random.Random(F.q)
        m1 = F.from_int(-1)
        for _ in range(200):
            xi, chi = rand_xi(F, rng), rand_xi(F, rng)
            s = F(rng.randrange(1, F.q))
            assert eta(F.one, xi) == xi
            assert eta(m1, xi) == XiElt(-xi.a, xi.b, -xi.c)
            assert eta(s, xi * chi) == eta(s, xi) * eta(s, chi)
        assert eta(F.one, INF) is INF
        with pytest.raises(ValueError):
            eta(F.zero, XiElt.identity(F))


def test_commutator_closed_form_agrees_with_word(gf27):
    rng = random.Random(11)
    for _ in range(500):
        a, x = rand_xi(gf27, rng), rand_xi(gf27, rng)
        assert commutator(a, x) == commutator_word(a, x)
        assert commutator(a, a).is_identity()


def test_commutator_special_cases(gf3, gf27):
    one = XiElt.of(gf27, 1, 0, 0)
    for x in gf27.elements():
        got = commutator(one, XiElt(x, gf27.zero, gf27.zero))
        assert got == XiElt(gf27.zero, x.theta() - x, (x - 1) * (x + x.theta()))
    # with the group law as given, [<1,0,0>, <0,y,0>] = <0,0,-y>
    for y in gf3.elements():
        assert commutator(XiElt.of(gf3, 1, 0, 0), XiElt(gf3.zero, y, gf3.zero)) == XiElt(gf3.zero, gf3.zero, -y)


def test_sign_swapped_commutator_form_disagrees_with_word(gf3):
    # the variant with a y - b x in the last slot is not the commutator
    a, x = XiElt.of(gf3, 1, 0, 0), XiElt.of(gf3, 0, 1, 0)
    assert commutator_word(a, x) != XiElt.of(gf3, 0, 0, 1)


def test_fixed_point_examples(gf3, gf27):
    for F in (gf3, gf27):
        fs = involution_fixed_points(rr.sigma(F))
        assert fs[0] is INF
        assert set(fs[1:]) == {XiElt(F.zero, y, F.zero) for y in F.elements()}
        ft = involution_fixed_points(rr.tau(F))
        assert set(ft[1:]) == {XiElt(F.zero, y, F.from_int(-1)) for y in F.elements()}


@pytest.mark.parametrize("n", [1, 3])
def test_fixed_points_match_brute_force(n):
    F = make_field(n)
    ids = rr.all_ids(F)
    rng = random.Random(n)
    params = [(a, c) for a in range(F.q) for c in range(F.q)]
    if F.q > 3:
        params = rng.sample(params, 60)
    for a, c in params:
        iv = InvolutionParam(F(a), F(c))
        img = iv.apply_ids(ids)
        assert np.array_equal(iv.apply_ids(img), ids)  # an involution
        assert np.array_equal(np.flatnonzero(img == ids), np.sort(rr.involution_fixed_ids(iv)))


@pytest.mark.parametrize("n", [1, 3])
def test_fixed_point_sets_partition_xi(n):
    F = make_field(n)
    codes = F.codes()
    sets = rr.fixed_point_codes(F, np.repeat(codes, F.q), np.tile(codes, F.q))
    assert sets.shape == (F.q**2, F.q)
    assert np.array_equal(np.sort(sets.ravel()), np.arange(1, F.q**3 + 1))


def test_point_ids_and_text(gf27):
    rng = random.Random(2)
    for _ in range(100):
        xi = rand_xi(gf27, rng)
        assert rr.point_from_id(gf27, xi.id) == xi
        assert rr.parse_point(gf27, str(xi)) == xi
    assert rr.point_id(INF) == 0 and rr.point_from_id(gf27, 0) is INF
    assert rr.parse_point(gf27, "inf") is INF
    assert str(XiElt.of(gf27, 1, 0, 2)) == "(100,000,200)"
    with pytest.raises(ValueError):
        rr.point_from_id(gf27, 27**3 + 1)


@pytest.mark.parametrize("q", [3, 27])
def test_structural_checks(q):
    from ree_unital.finite_fields import field_for_order

    rep = rr.structural_checks(field_for_order(q))
    assert rep.ok, [i for i in rep.items if not i[1]]


def test_structural_checks_reject_large_q():
    with pytest.raises(ValueError):
        rr.structural_checks(make_field(5))


def test_stabilizer_commutator_set_prime_field(gf3):
    j = {XiElt(a, -(a * a), c) for a in gf3.elements() for c in gf3.elements()}
    assert all(x * y in j for x in j for y in j)
    m1 = gf3.from_int(-1)
    assert {eta(m1, x) for x in j} == j


def test_ree3_permutation_group(gf3):
    g = rr.ree3_permutation_group(gf3)
    assert len(g) == 1512
    assert rr.is_doubly_transitive(g, 28)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 3**5 - 1), min_size=6, max_size=6))
def test_gf243_group_law_properties(v):
    F = make_field(5)
    xi, chi = XiElt.from_codes(F, *v[:3]), XiElt.from_codes(F, *v[3:])
    assert xi_inv(xi * chi) == xi_inv(chi) * xi_inv(xi)
    assert xi_cube(xi) == xi * xi * xi
    if not xi.is_identity():
        assert omega(omega(xi)) == xi
