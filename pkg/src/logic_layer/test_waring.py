"""
Tests for the decomposition engine: parameter gates, the building blocks and
the three-power / two-power constructions, each result re-verified.
"""

import random

import pytest

from logic_layer.certificate import verify
from logic_layer.errors import (
    NoDecomposition,
    OrderNotCoprime,
    PreconditionViolated,
    SingularGeometricSum,
    TraceMismatch,
)
from logic_layer.fields import field_of_order, prime_field
from logic_layer.matlin import FFMatrix, bordered, char_min_poly, companion, random_matrix
from logic_layer.polyring import (
    Poly,
    canonical_extension,
    find_irreducible_with_trace,
    find_kpower_irreducible_with_trace,
)
from logic_layer.selftest import random_block_instance
from logic_layer.waring import (
    block_root,
    decompose,
    exhaustive_fallback,
    hypotheses,
    irreducible_decompose,
    kpower_companion_root,
    pad_with_zero_term,
    scalar_decompose,
    split_nonscalar,
    split_unipotent,
    three_powers,
    two_powers,
    unipotent_root,
)

F2 = prime_field(2)
F3 = prime_field(3)
F5 = prime_field(5)


def M(field, *rows):
    return FFMatrix(field, rows)


def assert_certified(certificate, A, k, r):
    assert certificate.target == A
    assert certificate.k == k
    assert certificate.r == r
    assert certificate.power_sum() == A
    ok, reasons = verify(certificate)
    assert ok, reasons


# =====================================
# Parameter Gates
# =====================================

@pytest.mark.parametrize("q, n, k, three, two", [
    (3, 2, 2, True, False),
    (3, 2, 3, False, False),      # p | k
    (2, 5, 3, True, False),
    (2, 4, 3, False, False),      # 2^4 = (3-1)^4
    (2, 5, 2, False, False),      # even k over F_2
    (3, 7, 2, True, True),
    (3, 7, 3, False, False),
    (5, 7, 3, True, True),
    (4, 7, 3, True, True),
    (3, 6, 2, True, False),
])
def test_hypotheses(q, n, k, three, two):
    gate = hypotheses(q, n, k)
    assert gate.three_powers_ok is three
    assert gate.two_powers_ok is two
    if not three:
        assert gate.three_reason != "ok"


def test_gate_errors_from_decompose():
    A = M(F3, [1, 2], [0, 1])
    with pytest.raises(PreconditionViolated):
        decompose(A, 3)
    with pytest.raises(PreconditionViolated):
        decompose(A, 2, terms='2')


# =====================================
# Building Blocks
# =====================================

def test_block_root_small():
    R = block_root(M(F5, [2]), [1], 1, 2)
    assert R == M(F5, [2, 2], [0, 1])
    assert R ** 2 == bordered(M(F5, [4]), [1], 1)


def test_block_root_singular_sum():
    # 1 + D with D = -1
    with pytest.raises(SingularGeometricSum):
        block_root(M(F5, [4]), [1], 1, 2)
    with pytest.raises(PreconditionViolated):
        block_root(M(F5, [2]), [1], 0, 2)


def test_block_root_two_by_two():
    # M = D + I = [[1, 4], [1, 0]], M^-1 (1, 0) = (0, 4)
    D_root = M(F5, [0, 4], [1, 4])
    R = block_root(D_root, [1, 0], 1, 2)
    assert R == M(F5, [0, 4, 0], [1, 4, 4], [0, 0, 1])
    assert R ** 2 == bordered(D_root ** 2, [1, 0], 1)


def test_block_root_first_power_is_the_bordered_matrix():
    D_root = M(F5, [0, 4], [1, 4])
    assert block_root(D_root, [3, 2], 4, 1) == bordered(D_root, [3, 2], 4)


@pytest.mark.parametrize("q", [3, 4, 5, 7])
def test_block_root_random_grid(q):
    field = field_of_order(q)
    rng = random.Random(f"block-grid-{q}")
    checked = 0
    while checked < 40:
        instance = random_block_instance(field, rng)
        if instance is None:
            continue
        D_root, d, t, k, R = instance
        assert 2 <= D_root.n <= 5 and 1 <= k <= 6
        assert R ** k == bordered(D_root ** k, d, field.pow(t, k))
        checked += 1
        checked += 1


def test_unipotent_root_over_f2():
    B = M(F2, [1, 1], [0, 1])
    assert unipotent_root(B, 3) == B
    with pytest.raises(OrderNotCoprime):
        unipotent_root(B, 2)


def test_kpower_companion_root():
    witness = find_kpower_irreducible_with_trace(canonical_extension(F3, 2), 2, 0)
    E = kpower_companion_root(witness)
    assert E ** 2 == companion(witness.P)


def test_irreducible_decompose():
    A = companion(Poly(F3, (1, 0, 1)))
    first, second = irreducible_decompose(A, 2)
    assert first ** 2 + second ** 2 == A


@pytest.mark.parametrize("q, n, k", [(3, 2, 2), (5, 3, 2), (7, 1, 2), (5, 2, 3), (4, 2, 2)])
def test_scalar_decompose(q, n, k):
    field = field_of_order(q)
    for alpha in range(q):
        first, second = scalar_decompose(alpha, n, k, field)
        assert first ** k + second ** k == FFMatrix.scalar(field, n, alpha)


def test_split_rejects_wrong_trace():
    A = M(F5, [1, 2], [3, 4])
    P = Poly(F5, (1, 1))                  # X - 4
    Q = Poly(F5, (2, 0, 1))
    # Tr(A) - Tr(P) - 1 = 0, but X^2 + X + 2 has trace 4
    with pytest.raises(TraceMismatch):
        split_nonscalar(A, P, 1, Poly(F5, (2, 1, 1)))
    with pytest.raises(PreconditionViolated):
        split_nonscalar(FFMatrix.scalar(F5, 2, 3), P, 1, Q)


def test_split_unipotent_small():
    P = Poly(F2, (1, 1, 1))               # X^2 + X + 1, trace 1 = Tr(A) - 2
    A = companion(P)
    B, C_prime, conjugator, completion = split_unipotent(A, P)
    assert char_min_poly(B)[0] == Poly(F2, (1, 0, 1))      # (X - 1)^2
    assert char_min_poly(C_prime)[0] == P
    assert conjugator.conjugate(B + C_prime) == A
    assert completion.check()


def test_split_unipotent_rejects_wrong_trace():
    A = companion(Poly(F2, (1, 1, 1)))
    with pytest.raises(TraceMismatch):
        split_unipotent(A, Poly(F2, (1, 0, 1)))
    with pytest.raises(PreconditionViolated):
        split_unipotent(FFMatrix.identity(F2, 2), Poly(F2, (1, 1, 1)))
    with pytest.raises(PreconditionViolated):
        split_unipotent(A, Poly(F2, (1, 1)))


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_split_unipotent_part_is_unipotent(n):
    rng = random.Random(f"unipotent-{n}")
    unipotent = Poly(F2, (1, 1)) ** n
    checked = 0
    while checked < 5:
        A = random_matrix(F2, n, rng)
        if A.is_scalar():
            continue
        P = find_irreducible_with_trace(F2, n, F2.sub(A.trace(), n % 2))
        B, C_prime, conjugator, _ = split_unipotent(A, P)
        assert char_min_poly(B)[0] == unipotent
        assert char_min_poly(C_prime)[0] == P
        assert conjugator.conjugate(B + C_prime) == A
        checked += 1


# =====================================
# Three Powers
# =====================================

def test_first_powers_shortcut():
    A = M(F3, [1, 2], [0, 1])
    certificate = decompose(A, 1)
    assert certificate.method == 'identity'
    assert_certified(certificate, A, 1, 2)


def test_scalar_target():
    A = FFMatrix.scalar(F3, 2, 2)
    certificate = three_powers(A, 2)
    assert certificate.method == 'scalar'
    assert_certified(certificate, A, 2, 3)


def test_all_of_m2_f3_as_three_squares():
    for code in range(3 ** 4):
        A = FFMatrix.decode(F3, 2, code)
        assert_certified(three_powers(A, 2), A, 2, 3)


@pytest.mark.parametrize("q, n, k", [(5, 2, 2), (7, 2, 3), (3, 3, 2), (9, 2, 2), (4, 3, 3), (5, 3, 3)])
def test_three_powers_random(q, n, k):
    field = field_of_order(q)
    rng = random.Random(f"three-{q}-{n}-{k}")
    for _ in range(8):
        A = random_matrix(field, n, rng)
        assert_certified(three_powers(A, k), A, k, 3)


def test_three_powers_nonscalar_uses_construction():
    A = M(F5, [1, 2], [3, 4])
    certificate = three_powers(A, 2)
    assert certificate.method == 'three_powers'
    steps = [record['step'] for record in certificate.provenance]
    assert steps[:2] == ['orbit_polynomial', 'companion_polynomial']
    assert 'block_root' in steps


@pytest.mark.parametrize("q, samples", [(8, 60), (16, 30)])
def test_three_cubes_in_even_characteristic(q, samples):
    # no irreducible quadratic has trace 0 here, so some corners must be skipped
    field = field_of_order(q)
    rng = random.Random(f"even-cubes-{q}")
    for _ in range(samples):
        A = random_matrix(field, 2, rng)
        assert_certified(three_powers(A, 3), A, 3, 3)


def test_rejected_corner_is_recorded():
    F8 = field_of_order(8)
    A = M(F8, [5, 3], [3, 7])
    certificate = three_powers(A, 3)
    assert_certified(certificate, A, 3, 3)
    assert certificate.method == 'three_powers'
    steps = [record['step'] for record in certificate.provenance]
    assert steps[:2] == ['orbit_polynomial', 'corner_rejected']
    assert 'companion_polynomial' in steps


def test_no_corner_falls_back_with_provenance():
    A = M(F3, [1, 2], [0, 1])
    certificate = three_powers(A, 2)
    assert certificate.method == 'exhaustive_fallback'
    steps = [record['step'] for record in certificate.provenance]
    assert steps == ['orbit_polynomial', 'exhaustive_fallback']


def test_binary_odd_cubes():
    rng = random.Random("binary-cubes")
    for _ in range(6):
        A = random_matrix(F2, 5, rng)
        certificate = three_powers(A, 3)
        assert_certified(certificate, A, 3, 3)
        if not A.is_scalar():
            assert certificate.method == 'three_powers_binary'


# =====================================
# Exhaustive Fallback
# =====================================

def test_fallback_reports_counterexample():
    # cubes in F_7 are {0, 1, 6}; 3 is not a sum of two of them
    with pytest.raises(NoDecomposition):
        exhaustive_fallback(M(prime_field(7), [3]), 3, 2)


def test_fallback_through_decompose():
    A = M(prime_field(7), [2])
    certificate = decompose(A, 3, terms='2', allow_fallback=True)
    assert certificate.method == 'exhaustive_fallback'
    assert_certified(certificate, A, 3, 2)


# =====================================
# Two Powers
# =====================================

@pytest.mark.slow
@pytest.mark.parametrize("q, k", [(3, 2), (5, 3), (4, 2), (4, 3)])
def test_two_powers_degree_seven(q, k):
    field = field_of_order(q)
    rng = random.Random(f"two-{q}-{k}")
    A = random_matrix(field, 7, rng)
    certificate = two_powers(A, k)
    assert certificate.method == 'two_powers'
    assert_certified(certificate, A, k, 2)


@pytest.mark.slow
def test_decompose_auto_prefers_two_powers():
    A = random_matrix(F3, 7, random.Random("auto"))
    assert decompose(A, 2).r == 2


def test_two_powers_scalar():
    A = FFMatrix.scalar(F3, 7, 1)
    assert_certified(two_powers(A, 2), A, 2, 2)


def test_three_terms_padded_when_p_divides_k():
    F4 = field_of_order(4)
    A = FFMatrix.scalar(F4, 7, 2)
    assert not hypotheses(4, 7, 2).three_powers_ok
    certificate = decompose(A, 2, terms='3')
    assert_certified(certificate, A, 2, 3)
    assert certificate.terms[2].is_zero()
    assert certificate.provenance[-1]['step'] == 'zero_term'


def test_pad_with_zero_term():
    A = FFMatrix.scalar(F3, 7, 2)
    padded = pad_with_zero_term(two_powers(A, 2))
    assert_certified(padded, A, 2, 3)
    assert padded.terms[2] == FFMatrix.zeros(F3, 7)


@pytest.mark.slow
def test_three_terms_padded_for_random_matrix():
    F4 = field_of_order(4)
    A = random_matrix(F4, 7, random.Random("padded"))
    certificate = decompose(A, 2, terms='3')
    assert certificate.method == 'two_powers'
    assert_certified(certificate, A, 2, 3)
