"""
Tests for polynomials over a tower level: ring operations, irreducibility,
orbit polynomials and the prescribed-trace searches.
"""

import pytest

from logic_layer.errors import NotMonic, NoSuchPolynomial, PreconditionViolated, WitnessInvalid
from logic_layer.fields import FFElement, field_of_order, prime_field
from logic_layer.polyring import (
    KPowerWitness,
    Poly,
    canonical_extension,
    field_trace,
    find_irreducible_with_trace,
    find_kpower_irreducible_with_trace,
    frobenius_orbit,
    is_irreducible,
    is_cohen_exception,
    is_primitive,
    kpower_guaranteed,
    orbit_period,
    orbit_poly,
    poly_gcd,
    poly_suite,
    poly_trace,
    smallest_irreducible,
)

F2 = prime_field(2)
F3 = prime_field(3)
F9 = canonical_extension(F3, 2)


def poly(field, *coeffs):
    return Poly(field, coeffs)


# =====================================
# Ring Operations
# =====================================

def test_trailing_zeros_are_stripped():
    p = poly(F3, 1, 2, 0, 0)
    assert p.coeffs == (1, 2)
    assert p.degree == 1
    assert Poly(F3).degree == -1


def test_poly_suite_over_f3():
    f = poly(F3, 1, 0, 1)        # X^2 + 1
    g = poly(F3, 1, 1)           # X + 1
    suite = poly_suite(f, g)
    assert suite['add'] == poly(F3, 2, 1, 1)
    assert suite['mul'] == poly(F3, 1, 1, 1, 1)
    quotient, remainder = suite['divmod']
    assert quotient == poly(F3, 2, 1)
    assert remainder == poly(F3, 2)
    assert suite['gcd'] == poly(F3, 1)
    assert suite['eval_f_at_1'] == 2


def test_gcd_is_monic():
    f = poly(F3, 2, 0, 1)                 # (X - 1)(X + 1)
    g = poly(F3, 2, 2)                    # 2(X + 1)
    assert poly_gcd(f, g) == poly(F3, 1, 1)


def test_powmod_matches_repeated_multiplication():
    modulus = poly(F3, 2, 2, 1)
    x = Poly.x(F3)
    assert x.powmod(5, modulus) == (x ** 5) % modulus


def test_repr_is_readable():
    assert repr(poly(F3, 2, 1, 1)) == "Poly(X^2 + X + 2)"


# =====================================
# Trace & Irreducibility
# =====================================

def test_poly_trace_convention():
    # X^2 + 2X + 2 = X^2 - 1*X - 1, trace 1
    assert poly_trace(poly(F3, 2, 2, 1)) == FFElement(F3, 1)
    with pytest.raises(NotMonic):
        poly_trace(poly(F3, 1, 2))


@pytest.mark.parametrize("coeffs, expected", [
    ((1, 0, 1), True),        # X^2 + 1
    ((2, 0, 1), False),       # X^2 - 1
    ((2, 2, 1), True),
    ((1, 2, 1), False),       # (X + 1)^2
    ((1, 2, 0, 1), True),     # X^3 + 2X + 1
    ((0, 1), True),
])
def test_is_irreducible_over_f3(coeffs, expected):
    assert is_irreducible(Poly(F3, coeffs)) is expected


def test_is_primitive():
    assert is_primitive(poly(F3, 2, 2, 1))      # X has order 8
    assert not is_primitive(poly(F3, 1, 0, 1))  # X has order 4


def test_smallest_irreducible():
    assert smallest_irreducible(F2, 3) == poly(F2, 1, 1, 0, 1)
    assert smallest_irreducible(F3, 2) == poly(F3, 1, 0, 1)
    assert smallest_irreducible(F2, 1) == poly(F2, 0, 1)


def test_irreducible_with_prescribed_trace():
    P = find_irreducible_with_trace(F3, 2, 1)
    assert P == poly(F3, 2, 2, 1)
    assert poly_trace(P).index == 1


def test_primitive_trace_zero_exception():
    with pytest.raises(NoSuchPolynomial) as info:
        find_irreducible_with_trace(F2, 2, 0, require_primitive=True)
    assert not info.value.guaranteed
    with pytest.raises(NoSuchPolynomial):
        find_irreducible_with_trace(F3, 2, 0, require_primitive=True)
    assert is_cohen_exception(4, 3, 0)
    assert not is_cohen_exception(4, 3, 1)
    assert not is_cohen_exception(3, 3, 0)


@pytest.mark.parametrize("q, n", [(2, 3), (3, 3), (4, 2), (5, 2)])
def test_every_trace_has_an_irreducible(q, n):
    field = field_of_order(q)
    for t in range(q):
        P = find_irreducible_with_trace(field, n, t)
        assert P.degree == n and is_irreducible(P)
        assert poly_trace(P).index == t


# =====================================
# Frobenius Orbits
# =====================================

def test_orbit_of_generator():
    x = F9.element(3)
    assert frobenius_orbit(x) == [3, 6]
    assert orbit_period(x) == 2
    assert orbit_poly(x) == poly(F3, 1, 0, 1)
    assert field_trace(x).index == 0


def test_orbit_of_base_element_repeats():
    two = F9.element(2)
    assert orbit_period(two) == 1
    assert orbit_poly(two) == poly(F3, 1, 2, 1)     # (X - 2)^2


def test_orbit_poly_has_base_coefficients():
    for a in range(F9.order):
        P = orbit_poly(F9.element(a))
        assert P.field == F3 and P.degree == 2


def test_orbit_poly_rejects_wrong_base():
    F4 = field_of_order(4)
    with pytest.raises(PreconditionViolated):
        orbit_poly(F4.element(2), base=F3)


# =====================================
# k-Power Polynomials
# =====================================

def test_kpower_search_squares_over_f3():
    witness = find_kpower_irreducible_with_trace(F9, 2, 0)
    assert witness.a.index == 4
    assert witness.P == poly(F3, 1, 0, 1)
    assert witness.validate()


@pytest.mark.parametrize("t", [1, 2])
def test_kpower_search_small_degree_can_fail(t):
    # the non-base squares of F_9 are x and 2x, both of trace 0
    with pytest.raises(NoSuchPolynomial) as info:
        find_kpower_irreducible_with_trace(F9, 2, t)
    assert not info.value.guaranteed


def test_kpower_search_degree_seven():
    top = canonical_extension(F3, 7)
    for t in range(3):
        witness = find_kpower_irreducible_with_trace(top, 2, t)
        assert orbit_period(witness.a ** 2) == 7
        assert poly_trace(witness.P).index == t
        assert is_irreducible(witness.P)


def test_invalid_witness():
    with pytest.raises(WitnessInvalid):
        KPowerWitness(poly(F3, 1, 0, 1), F9.element(3), 2).validate()


def test_kpower_guarantee_region():
    assert kpower_guaranteed(3, 7, 2)
    assert not kpower_guaranteed(3, 6, 2)
    assert not kpower_guaranteed(3, 7, 3)
