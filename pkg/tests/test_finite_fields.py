import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import GF, Poly, symbols
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p, gf_mul, gf_rem

from ree_unital.finite_fields import (
    F8_ONE,
    F8_ZERO,
    F8Elt,
    F3nCtx,
    f8_elements,
    field_for_order,
    make_field,
    select_modulus,
)

# --- GF(8) -------------------------------------------------------------------


def f8_poly_mul(x: int, y: int) -> int:
    """Schoolbook carry-less product reduced by u^3 = u + 1."""
    r = 0
    for i in range(3):
        if (y >> i) & 1:
            r ^= x << i
    for deg in (4, 3):
        if r >> deg & 1:
            r ^= 0b1011 << (deg - 3)
    return r


def test_f8_mul_matches_schoolbook():
    for x in f8_elements():
        for y in f8_elements():
            assert (x * y).bits == f8_poly_mul(x.bits, y.bits)


def test_f8_power_table():
    u = F8Elt.from_power(1)
    assert u * F8Elt.from_power(2) == F8Elt.from_power(3) == u + F8_ONE
    assert F8Elt.from_power(4) == F8Elt.from_power(2) + u
    assert F8Elt.from_power(6) == F8Elt.from_power(2) + F8_ONE
    assert F8Elt.from_power(0) == F8_ONE
    assert u**7 == F8_ONE
    assert F8Elt.from_power(None) == F8_ZERO


def test_f8_nonzero_elements_have_order_dividing_7():
    for x in f8_elements():
        if x:
            assert x**7 == F8_ONE
            assert x * x.inv() == F8_ONE
        assert x + x == F8_ZERO


def test_f8_roots_of_defining_polynomial():
    roots = {x for x in f8_elements() if x**3 + x + F8_ONE == F8_ZERO}
    assert roots == {F8Elt.from_power(k) for k in (1, 2, 4)}


def test_f8_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        F8_ZERO.inv()


def test_f8_text_round_trip():
    for x in f8_elements():
        assert F8Elt.parse(str(x)) == x
    assert str(F8_ZERO) == "0"
    assert str(F8Elt.from_power(5)) == "u^5"


# --- GF(3^n) -----------------------------------------------------------------


def sympy_mul(F: F3nCtx, x: int, y: int) -> int:
    """Independent product: sympy's dense GF(p)[X] arithmetic, reduced mod the modulus."""
    def big(code):
        d = [(code // 3**i) % 3 for i in range(F.n)]
        return [ZZ(c) for c in reversed(d)]

    mod = [ZZ(c) for c in reversed(F.modulus)]
    r = gf_rem(gf_mul(big(x), big(y), 3, ZZ), mod, 3, ZZ)
    r = [int(c) % 3 for c in reversed(r)]
    return sum(c * 3**i for i, c in enumerate(r))


@pytest.mark.parametrize("n", [1, 3, 5, 7, 9])
def test_modulus_is_irreducible_by_sympy(n):
    mod = [ZZ(c) for c in reversed(select_modulus(n))]
    assert gf_irreducible_p(mod, 3, ZZ)
    F = make_field(n)
    assert F.theta_exponent == (n + 1) // 2
    assert F.header.startswith(f"GF(3^{n}) mod ")


def test_documented_moduli():
    got = {n: make_field(n).modulus_str for n in (1, 3, 5, 7, 9)}
    assert got == {1: "x", 3: "x^3+2x+1", 5: "x^5+2x+1", 7: "x^7+x^2+2", 9: "x^9+x^4+2"}


@pytest.mark.parametrize("n", [1, 3])
def test_mul_exhaustive_against_sympy(n):
    F = make_field(n)
    xs = F.codes()
    table = F.mul(xs[:, None], xs[None, :])
    for x in range(F.q):
        for y in range(F.q):
            assert table[x, y] == sympy_mul(F, x, y)


@pytest.mark.parametrize("n", [5, 7, 9])
def test_mul_random_against_sympy(n):
    F = make_field(n)
    rng = random.Random(n)
    for _ in range(400):
        x, y = rng.randrange(F.q), rng.randrange(F.q)
        assert int(F.mul(x, y)) == sympy_mul(F, x, y)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_add_is_digitwise_mod_3(n):
    F = make_field(n)
    xs = F.codes()
    s = F.add(xs[:, None], xs[None, :])
    dx = np.stack([(xs // 3**i) % 3 for i in range(n)])
    want = sum(((dx[i][:, None] + dx[i][None, :]) % 3) * 3**i for i in range(n))
    assert np.array_equal(s, want)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_theta_is_additive_multiplicative_and_squares_to_frobenius(n):
    F = make_field(n)
    xs = F.codes()
    X, Y = xs[:, None], xs[None, :]
    assert np.array_equal(F.theta(F.mul(X, Y)), F.mul(F.theta(X), F.theta(Y)))
    assert np.array_equal(F.theta(F.add(X, Y)), F.add(F.theta(X), F.theta(Y)))
    assert np.array_equal(F.theta(F.theta(xs)), F.frobenius(xs))
    assert np.array_equal(F.frobenius(xs), F.pow(xs, 3))


@pytest.mark.parametrize("n", [7, 9])
def test_theta_random_large_fields(n):
    F = make_field(n)
    rng = np.random.default_rng(n)
    x, y = rng.integers(0, F.q, 2000), rng.integers(0, F.q, 2000)
    assert np.array_equal(F.theta(F.mul(x, y)), F.mul(F.theta(x), F.theta(y)))
    assert np.array_equal(F.theta(F.add(x, y)), F.add(F.theta(x), F.theta(y)))
    assert np.array_equal(F.theta(F.theta(x)), F.frobenius(x))
    # theta against a repeated-squaring power oracle
    assert np.array_equal(F.theta(x), F.pow(x, 3**F.theta_exponent))


def test_theta_is_identity_on_prime_field(gf3):
    assert [int(gf3.theta(x)) for x in range(3)] == [0, 1, 2]


def test_frobenius_order_exhaustive(gf27):
    xs = gf27.codes()
    assert np.array_equal(gf27.pow(xs, 27), xs)
    assert np.array_equal(gf27.theta(xs), gf27.pow(xs, 9))


@pytest.mark.parametrize("n", [3, 5])
def test_theta_minus_one_times_theta_plus_one_is_squaring(n):
    # x^((t-1)(t+1)) = x^(t^2 - 1) = x^2 in the multiplicative group
    F = make_field(n)
    x = F.codes()[1:]
    y = F.div(F.theta(x), x)  # x^(t-1)
    assert np.array_equal(F.mul(F.theta(y), y), F.mul(x, x))  # y^(t+1)


def test_field_axioms_small(gf27):
    for x in gf27.elements():
        assert x + x + x == gf27.zero
        if x:
            assert x * x.inv() == gf27.one


def test_inverse_of_zero_raises(gf27):
    with pytest.raises(ZeroDivisionError):
        gf27.zero.inv()
    with pytest.raises(ZeroDivisionError):
        gf27.inv(np.array([1, 0]))


@pytest.mark.parametrize("n", [0, 2, -1, 4, 11])
def test_make_field_rejects_bad_degree(n):
    with pytest.raises(ValueError):
        F3nCtx(n)


def test_context_mismatch(gf3, gf27):
    with pytest.raises(ValueError):
        gf3.one + gf27.one


def test_field_for_order():
    assert field_for_order(243) is make_field(5)
    with pytest.raises(ValueError):
        field_for_order(81 * 2)


def test_element_text_form(gf27):
    x = gf27.parse("120")
    assert x.code == 1 + 2 * 3
    assert str(x) == "120"
    with pytest.raises(ValueError):
        gf27.parse("12")


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 3**9 - 1), st.integers(1, 3**9 - 1), st.integers(0, 3**9 - 1))
def test_gf3_9_distributive_and_division(x, y, z):
    F = make_field(9)
    assert F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z))
    assert F.mul(F.div(x, y), y) == x
    assert F.sub(F.add(x, z), z) == x
