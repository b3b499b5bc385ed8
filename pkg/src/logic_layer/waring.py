"""
Matrix Waring Architect - Decomposition Engine

Writes a square matrix A over F_q as a sum of k-th powers:

* three_powers: three terms when gcd(k, q) = 1 and q^n > (k-1)^4, or over F_2
  with k odd and 2^n > (k-1)^4.
* two_powers: two terms when n >= 7 and k < q.
* exhaustive_fallback: meet-in-the-middle over the enumerated k-th power set,
  for the tiny parameters the constructions do not reach.

Every construction brings A to its Frobenius form, splits that form into a
bordered block part and a companion part, takes roots of each part separately
and conjugates the roots back. Each step is recorded in the certificate's
provenance.
"""

import logging
from dataclasses import dataclass, replace
from math import gcd

from .certificate import WaringCertificate, step, witness_step
from .config import TWO_POWERS_MIN_DIMENSION
from .errors import (
    BudgetExceeded,
    CharPolyViolation,
    FallbackExhausted,
    NoDecomposition,
    NoSuchPolynomial,
    NotIrreducible,
    NotSimilar,
    OrderNotCoprime,
    PreconditionViolated,
    ShapeViolation,
    SingularGeometricSum,
    SingularMatrix,
    TheoremContradiction,
    TraceMismatch,
    WitnessInvalid,
)
from .fields import FFElement, extension_field, order_from_multiple
from .matlin import (
    FFMatrix,
    bordered,
    block_diagonal,
    char_min_poly,
    companion,
    complete_prescribed_columns,
    cyclic_similarity,
    frobenius_form,
    poly_at_matrix,
)
from .polyring import (
    KPowerWitness,
    Poly,
    canonical_extension,
    find_irreducible_with_trace,
    find_kpower_irreducible_with_trace,
    is_irreducible,
    orbit_period,
    orbit_poly,
    poly_trace,
    smallest_irreducible,
)

logger = logging.getLogger(__name__)


# =====================================
# Parameter Gates
# =====================================

@dataclass(frozen=True)
class GateReport:
    """Which constructions apply to (q, n, k), and why not when they do not."""

    q: int
    n: int
    k: int
    three_powers_ok: bool
    two_powers_ok: bool
    three_reason: str
    two_reason: str
    small_exponent_regime: bool

    @property
    def reason(self):
        return f"three powers: {self.three_reason}; two powers: {self.two_reason}"


def hypotheses(q, n, k):
    """
    Evaluate the hypotheses of the three-power and two-power constructions.

    Args:
        q: Order of the coefficient field
        n: Matrix size
        k: Exponent

    Returns:
        GateReport
    """
    if q == 2:
        three_ok = k % 2 == 1 and 2 ** n > (k - 1) ** 4
        three_reason = "ok" if three_ok else (
            "over F_2 the exponent k must be odd" if k % 2 == 0 else f"2^n = {2 ** n} must exceed (k-1)^4 = {(k - 1) ** 4}"
        )
    else:
        three_ok = gcd(k, q) == 1 and q ** n > (k - 1) ** 4
        three_reason = "ok" if three_ok else (
            f"gcd(k, q) = {gcd(k, q)} must be 1" if gcd(k, q) != 1
            else f"q^n = {q ** n} must exceed (k-1)^4 = {(k - 1) ** 4}"
        )

    two_ok = n >= TWO_POWERS_MIN_DIMENSION and k < q
    two_reason = "ok" if two_ok else (
        f"n = {n} must be at least {TWO_POWERS_MIN_DIMENSION}" if n < TWO_POWERS_MIN_DIMENSION
        else f"k = {k} must be smaller than q = {q}"
    )
    return GateReport(q, n, k, three_ok, two_ok, three_reason, two_reason,
                      k < q and n >= 4 and gcd(k, q) == 1)


# =====================================
# Building Blocks
# =====================================

@dataclass(frozen=True)
class SplitResult:
    """
    U^-1 A U = S + E with S = [[D, d], [0, corner]] and E similar to C_Q.

    conjugator: U^-1 A U = A_frob
    d_witness: U_D^-1 C_P U_D = D
    e_witness: U_E^-1 C_Q U_E = E
    """

    S: FFMatrix
    E: FFMatrix
    D: FFMatrix
    column: list
    corner: int
    conjugator: object
    d_witness: object
    e_witness: object
    P: Poly
    Q: Poly


def _least_non_binary(field):
    """Least element outside {0, 1}; index 2 whenever the field has one."""
    if field.order <= 2:
        raise PreconditionViolated("the block split needs a field with more than two elements")
    return 2


def _multiple_of_one(field, n):
    total = 0
    for _ in range(n % field.characteristic):
        total = field.add(total, 1)
    return total


def kpower_companion_root(witness):
    """
    E with E^k = C_P for a k-power witness (P = Phi_{a^k}).

    G = C_{Phi_a} has G^k similar to C_P; conjugating G by that similarity gives E.
    """
    witness.validate()
    C = companion(witness.P)
    if witness.k == 1:
        return C
    G = companion(orbit_poly(witness.a))
    try:
        similarity = cyclic_similarity(C, G ** witness.k)
    except NotSimilar as e:
        raise WitnessInvalid(f"C_Phi_a^k is not similar to C_P: {e}") from None
    U_inv = similarity.U.inverse()
    E = U_inv * G * similarity.U
    if E ** witness.k != C:
        raise TheoremContradiction("k-power companion root does not power back")
    return E


def block_root(D_root, d, t, k):
    """
    R = [[D_root, x], [0, t]] with R^k = [[D_root^k, d], [0, t^k]].

    x solves (sum_i t^(k-1-i) D_root^i) x = d.
    """
    field = D_root.field
    t = t.index if isinstance(t, FFElement) else t
    if t == 0:
        raise PreconditionViolated("the corner scalar must be non-zero")
    size = D_root.n
    M = FFMatrix.zeros(field, size)
    power = FFMatrix.identity(field, size)
    for i in range(k):
        M = M + power.scale(field.pow(t, k - 1 - i))
        power = power * D_root
    try:
        x = M.inverse().apply(d)
    except SingularMatrix:
        raise SingularGeometricSum(f"t^k = {field.pow(t, k)} is an eigenvalue of D_root^k") from None

    R = bordered(D_root, x, t)
    if R ** k != bordered(D_root ** k, d, field.pow(t, k)):
        raise TheoremContradiction("block root does not power back to the bordered matrix")
    return R


def split_nonscalar(A, P, corner, Q):
    """
    Split the Frobenius form of a non-scalar A as S + E.

    S is bordered with top-left block D similar to C_P (subdiagonal filled with the
    least element outside {0, 1}) and the given corner; E is similar to C_Q.
    """
    field = A.field
    n = A.n
    corner = corner.index if isinstance(corner, FFElement) else corner
    if A.is_scalar():
        raise PreconditionViolated("split_nonscalar needs a non-scalar matrix")
    if P.degree != n - 1 or Q.degree != n:
        raise PreconditionViolated(f"need deg P = {n - 1} and deg Q = {n}")
    expected = field.sub(field.sub(A.trace(), poly_trace(P).index), corner)
    if poly_trace(Q).index != expected:
        raise TraceMismatch(f"Tr(Q) must be Tr(A) - Tr(P) - corner = {expected}")
    fill = _least_non_binary(field)

    form = frobenius_form(A)
    A_frob = form.matrix

    m = n - 1
    columns = [[fill if i == j + 1 else 0 for i in range(m)] for j in range(m - 1)]
    D, d_witness = complete_prescribed_columns(companion(P), columns)

    target = A_frob - block_diagonal(field, [D, FFMatrix(field, [[corner]])])
    E, e_witness = complete_prescribed_columns(companion(Q), target.columns()[:n - 1])
    S = A_frob - E

    top_left = S.submatrix(range(n - 1), range(n - 1))
    if top_left != D or any(S[n - 1, j] for j in range(n - 1)) or S[n - 1, n - 1] != corner:
        logger.error("[SPLIT] block part lost its shape for A = %s", A.to_lists())
        raise ShapeViolation("S is not [[D, d], [0, corner]]")
    column = [S[i, n - 1] for i in range(n - 1)]
    return SplitResult(S, E, D, column, corner, form.witness, d_witness, e_witness, P, Q)


def split_unipotent(A, P):
    """
    U^-1 A U = B + C' with C' similar to C_P and char(B) = (X - 1)^n.

    Returns:
        tuple: (B, C', conjugator witness, completion witness)
    """
    field = A.field
    n = A.n
    if A.is_scalar():
        raise PreconditionViolated("split_unipotent needs a non-scalar matrix")
    if P.degree != n:
        raise PreconditionViolated(f"need deg P = {n}")
    expected = field.sub(A.trace(), _multiple_of_one(field, n))
    if poly_trace(P).index != expected:
        raise TraceMismatch(f"Tr(P) must be Tr(A) - n = {expected}")

    form = frobenius_form(A)
    A_frob = form.matrix
    rows = [[0] * n for _ in range(n)]
    offset = 0
    sizes = form.sizes
    for b, factor in enumerate(form.factors):
        size = sizes[b]
        last = offset + size - 1
        for i in range(size):
            rows[offset + i][offset + i] = 1
        for i in range(size - 1):
            rows[offset + i][last] = field.neg(factor.coefficient(i))
        if b + 1 < len(sizes):
            rows[last + 1][last] = field.neg(1)
        offset += size
    D = FFMatrix(field, rows)

    C_prime, completion = complete_prescribed_columns(companion(P), (A_frob - D).columns()[:n - 1])
    B = A_frob - C_prime
    unipotent = Poly(field, [field.neg(1), 1]) ** n
    if char_min_poly(B)[0] != unipotent:
        logger.error("[SPLIT] unipotent part has the wrong characteristic polynomial for A = %s", A.to_lists())
        raise CharPolyViolation("char(A_frob - C') is not (X - 1)^n")
    return B, C_prime, form.witness, completion


def matrix_order(B, multiple):
    """Multiplicative order of an invertible matrix, given a multiple of it."""
    identity = FFMatrix.identity(B.field, B.n)
    if B ** multiple != identity:
        raise PreconditionViolated(f"{multiple} is not a multiple of the matrix order")
    return order_from_multiple(B, multiple, lambda M, e: M ** e, identity)


def _known_order_multiple(B):
    field = B.field
    n = B.n
    nilpotent = B - FFMatrix.identity(field, n)
    if (nilpotent ** n).is_zero():
        bound = 1
        while bound < n:
            bound *= field.characteristic
        return bound
    char, _ = char_min_poly(B)
    if is_irreducible(char):
        return field.order ** n - 1
    raise PreconditionViolated("no order multiple known for this matrix; pass one explicitly")


def unipotent_root(B, k, multiple=None):
    """
    V = B^(k^-1 mod ord B), so V^k = B.

    Args:
        B: Invertible matrix
        k: Exponent coprime to the order of B
        multiple: Known multiple of the order (default: p-power for unipotent B,
                  q^n - 1 for irreducible characteristic polynomial)
    """
    if multiple is None:
        multiple = _known_order_multiple(B)
    order = matrix_order(B, multiple)
    if gcd(k, order) != 1:
        raise OrderNotCoprime(f"k = {k} is not coprime to the order {order}")
    V = B ** (pow(k, -1, order) if order > 1 else 0)
    if V ** k != B:
        raise TheoremContradiction("unipotent root does not power back")
    return V


def _lift(field, F, index, A):
    """Evaluate the polynomial whose coefficients are the coordinates of index at A."""
    return poly_at_matrix(Poly(field, F.coefficients(index)), A)


def irreducible_decompose(A, k):
    """
    (E_1, E_2) with E_1^k + E_2^k = A for A with irreducible characteristic polynomial.

    F_q[A] is the field F_q[X]/(char A) with A as the class of X; the field-level
    decomposition of that class lifts back to polynomials in A.
    """
    field = A.field
    n = A.n
    zero = FFMatrix.zeros(field, n)
    if k == 1:
        return A, zero
    char, _ = char_min_poly(A)
    if not is_irreducible(char):
        raise NotIrreducible("the characteristic polynomial is reducible")

    if n == 1:
        x, y = field.two_kth_powers(A[0, 0], k)
        first, second = FFMatrix(field, [[y]]), FFMatrix(field, [[x]])
    else:
        F = extension_field(field, char.coeffs)
        x, y = F.two_kth_powers(field.order, k)
        first, second = _lift(field, F, y, A), _lift(field, F, x, A)
    if first ** k + second ** k != A:
        raise TheoremContradiction("field-level decomposition did not lift to A")
    return first, second


def scalar_decompose(alpha, n, k, field=None):
    """
    (E_1, E_2) with E_1^k + E_2^k = alpha * I_n.

    Uses F_q[C_h] for the canonical irreducible h of degree n.
    """
    if isinstance(alpha, FFElement):
        field, alpha = alpha.field, alpha.index
    zero = FFMatrix.zeros(field, n)
    if alpha == 0:
        return zero, zero
    if n == 1:
        x, y = field.two_kth_powers(alpha, k)
        return FFMatrix(field, [[y]]), FFMatrix(field, [[x]])
    h = smallest_irreducible(field, n)
    F = canonical_extension(field, n)
    C_h = companion(h)
    x, y = F.two_kth_powers(alpha, k)
    first, second = _lift(field, F, y, C_h), _lift(field, F, x, C_h)
    if first ** k + second ** k != FFMatrix.scalar(field, n, alpha):
        raise TheoremContradiction("scalar decomposition did not lift")
    return first, second


# =====================================
# Constructions
# =====================================

def _certificate(A, k, terms, provenance, method):
    cert = WaringCertificate(A.field, k, tuple(terms), A, tuple(provenance), method)
    if cert.power_sum() != A:
        logger.error("[WARING] %s produced an unsound decomposition: %s", method, provenance)
        raise TheoremContradiction(f"{method} terms do not sum to A", provenance)
    logger.debug("[WARING] %s: %d terms for a %dx%d matrix", method, len(terms), A.n, A.n)
    return cert


def _shortcut(A, k, r):
    if k != 1:
        return None
    zero = FFMatrix.zeros(A.field, A.n)
    terms = [A] + [zero] * (r - 1)
    return _certificate(A, k, terms, [step('first_power_shortcut')], 'identity')


def _scalar_certificate(A, k, r):
    alpha = A[0, 0]
    first, second = scalar_decompose(alpha, A.n, k, A.field)
    terms = [first, second] + [FFMatrix.zeros(A.field, A.n)] * (r - 2)
    provenance = [step('scalar', alpha=alpha, modulus=smallest_irreducible(A.field, A.n) if A.n > 1 else None)]
    return _certificate(A, k, terms, provenance, 'scalar')


def _orbit_block(field, n, k, provenance):
    """P = Phi_{b^k} of degree n for the least primitive b of F_q^n, with its witness."""
    low = canonical_extension(field, n)
    b = FFElement(low, low.primitive_element())
    b_power = b ** k
    if orbit_period(b_power, field) != n:
        raise TheoremContradiction(f"orbit of b^{k} in GF({field.order}^{n}) is short")
    P = orbit_poly(b_power, field)
    provenance.append(step('orbit_polynomial', degree=n, b=b, P=P,
                           modulus=smallest_irreducible(field, n) if n > 1 else None))
    return P, KPowerWitness(P, b, k)


def _root_of_companion_part(witness, field):
    if witness.P.degree == 1:
        # Degree one: C_P = [b^k], the root is [b] itself.
        return FFMatrix(field, [[witness.a.index]])
    return kpower_companion_root(witness)


def _corner_and_companion(A, P, k, provenance):
    """
    Least corner root t (P(t^k) != 0) whose trace leaves room for an irreducible Q.

    Returns:
        tuple: (t, t^k, Q), or None when every admissible t is rejected
    """
    field = A.field
    n = A.n
    tried = set()
    for t in range(1, field.order):
        corner = field.pow(t, k)
        if corner in tried or P.evaluate(corner) == 0:
            continue
        tried.add(corner)
        trace = field.sub(field.sub(A.trace(), poly_trace(P).index), corner)
        try:
            Q = find_irreducible_with_trace(field, n, trace)
        except NoSuchPolynomial:
            provenance.append(step('corner_rejected', corner_root=t, corner=corner, trace=trace))
            continue
        provenance.append(step('companion_polynomial', Q=Q, corner=corner, corner_root=t))
        return t, corner, Q
    return None


def _three_powers_fallback(A, k, provenance, budget=None):
    try:
        cert = exhaustive_fallback(A, k, 3, budget)
    except BudgetExceeded as e:
        logger.error("[WARING] no corner scalar and no room to enumerate: %s", provenance)
        raise TheoremContradiction(f"no admissible corner scalar and {e}", provenance) from None
    return replace(cert, provenance=tuple(provenance) + cert.provenance)


def three_powers(A, k, budget=None):
    """
    Certificate for A = E_1^k + E_2^k + E_3^k.

    budget caps the exhaustive search used when no corner scalar is admissible.

    Raises:
        PreconditionViolated: (q, n, k) outside the hypotheses
        FallbackExhausted: the exhaustive fallback found nothing (never expected)
    """
    field = A.field
    q, n = field.order, A.n
    shortcut = _shortcut(A, k, 3)
    if shortcut is not None:
        return shortcut
    gate = hypotheses(q, n, k)
    if not gate.three_powers_ok:
        raise PreconditionViolated(f"three powers: {gate.three_reason}")
    if A.is_scalar():
        return _scalar_certificate(A, k, 3)

    if q == 2:
        return _three_powers_binary(A, k)

    provenance = []
    P, p_witness = _orbit_block(field, n - 1, k, provenance)
    choice = _corner_and_companion(A, P, k, provenance)
    if choice is None:
        logger.info("[WARING] no corner scalar for (q, n, k) = (%d, %d, %d); using the exhaustive search", q, n, k)
        return _three_powers_fallback(A, k, provenance, budget)
    corner_root, corner, Q = choice

    split = split_nonscalar(A, P, corner, Q)
    provenance.append(witness_step('frobenius_form', split.conjugator))
    provenance.append(witness_step('block_completion', split.d_witness))
    provenance.append(witness_step('companion_completion', split.e_witness))

    E_P = _root_of_companion_part(p_witness, field)
    U_D = split.d_witness.U
    D_root = U_D.inverse() * E_P * U_D
    R = block_root(D_root, split.column, corner_root, k)
    provenance.append(step('block_root', root_check={'E': R.to_lists(), 'C': split.S.to_lists(), 'k': k}))

    second, third = irreducible_decompose(split.E, k)
    terms = [split.conjugator.conjugate(X) for X in (R, second, third)]
    return _certificate(A, k, terms, provenance, 'three_powers')


def _three_powers_binary(A, k):
    field = A.field
    n = A.n
    provenance = []
    P = find_irreducible_with_trace(field, n, field.sub(A.trace(), _multiple_of_one(field, n)))
    provenance.append(step('companion_polynomial', Q=P))
    B, C_prime, conjugator, completion = split_unipotent(A, P)
    provenance.append(witness_step('frobenius_form', conjugator))
    provenance.append(witness_step('companion_completion', completion))

    V = unipotent_root(B, k)
    provenance.append(step('unipotent_root', root_check={'E': V.to_lists(), 'C': B.to_lists(), 'k': k}))
    second, third = irreducible_decompose(C_prime, k)
    terms = [conjugator.conjugate(X) for X in (V, second, third)]
    return _certificate(A, k, terms, provenance, 'three_powers_binary')


def two_powers(A, k):
    """
    Certificate for A = E_1^k + E_2^k (n >= 7, k < q).

    k = p^a * k' is handled by building a k'-th root of the companion part and
    then taking its p^a-th root through the group order, which divides q^n - 1.
    """
    field = A.field
    q, n = field.order, A.n
    shortcut = _shortcut(A, k, 2)
    if shortcut is not None:
        return shortcut
    gate = hypotheses(q, n, k)
    if not gate.two_powers_ok:
        raise PreconditionViolated(f"two powers: {gate.two_reason}")
    if A.is_scalar():
        return _scalar_certificate(A, k, 2)

    p = field.characteristic
    p_exponent, coprime = 0, k
    while coprime % p == 0:
        coprime //= p
        p_exponent += 1

    provenance = [step('exponent_split', p=p, a=p_exponent, k_coprime=coprime)]
    P, p_witness = _orbit_block(field, n - 1, k, provenance)
    trace = field.sub(field.sub(A.trace(), poly_trace(P).index), 1)
    top = canonical_extension(field, n)
    q_witness = find_kpower_irreducible_with_trace(top, coprime, trace)
    Q = q_witness.P
    provenance.append(step('kpower_polynomial', Q=Q, a=q_witness.a, k=coprime,
                           modulus=smallest_irreducible(field, n)))

    split = split_nonscalar(A, P, 1, Q)
    provenance.append(witness_step('frobenius_form', split.conjugator))
    provenance.append(witness_step('block_completion', split.d_witness))
    provenance.append(witness_step('companion_completion', split.e_witness))

    E_P = kpower_companion_root(p_witness)
    U_D = split.d_witness.U
    R = block_root(U_D.inverse() * E_P * U_D, split.column, 1, k)
    provenance.append(step('block_root', root_check={'E': R.to_lists(), 'C': split.S.to_lists(), 'k': k}))

    E_coprime = kpower_companion_root(q_witness)
    if p_exponent:
        order = matrix_order(E_coprime, q ** n - 1)
        E_full = E_coprime ** pow(p ** p_exponent, -1, order)
        provenance.append(step('p_part_root', order=order))
    else:
        E_full = E_coprime
    U_E = split.e_witness.U
    second = U_E.inverse() * E_full * U_E
    provenance.append(step('companion_root', root_check={'E': second.to_lists(), 'C': split.E.to_lists(), 'k': k}))

    terms = [split.conjugator.conjugate(X) for X in (R, second)]
    return _certificate(A, k, terms, provenance, 'two_powers')


def exhaustive_fallback(A, k, r, budget=None):
    """
    Least-encoding decomposition found by enumerating every k-th power in M_n(F_q).

    Raises:
        BudgetExceeded: q^(n^2) above the enumeration budget
        FallbackExhausted: no decomposition inside a proven region
        NoDecomposition: no decomposition (a genuine counterexample elsewhere)
    """
    from .census import enumerate_powers, find_power_sum

    field = A.field
    S = enumerate_powers(field, A.n, k, budget)
    found = find_power_sum(S, A, r)
    if found is None:
        gate = hypotheses(field.order, A.n, k)
        proven = gate.three_powers_ok if r == 3 else gate.two_powers_ok
        message = f"{A.to_lists()} is not a sum of {r} {k}-th powers over GF({field.order})"
        if proven:
            logger.error("[WARING] %s", message)
            raise FallbackExhausted(message)
        raise NoDecomposition(message)
    terms = [S.matrix(S.root_of(code)) for code in found]
    provenance = [step('exhaustive_fallback', r=r, power_set_size=len(S), members=list(found))]
    return _certificate(A, k, terms, provenance, 'exhaustive_fallback')


def pad_with_zero_term(certificate):
    """The same decomposition with a zero matrix appended as the last term."""
    zero = FFMatrix.zeros(certificate.field, certificate.n)
    return replace(certificate, terms=certificate.terms + (zero,),
                   provenance=certificate.provenance + (step('zero_term'),))


def decompose(A, k, terms='auto', allow_fallback=False, budget=None):
    """
    Route A to the strongest applicable construction.

    Args:
        A: Target matrix
        k: Exponent
        terms: '2', '3' or 'auto' (two powers first, then three)
        allow_fallback: Use the exhaustive search when no construction applies
        budget: Enumeration budget for any exhaustive search (default: ENUMERATION_BUDGET)
    """
    terms = str(terms)
    gate = hypotheses(A.field.order, A.n, k)
    if terms in ('2', 'auto') and (gate.two_powers_ok or k == 1):
        return two_powers(A, k)
    if terms in ('3', 'auto') and (gate.three_powers_ok or k == 1):
        return three_powers(A, k, budget)
    if terms == '3' and gate.two_powers_ok:
        logger.info("[WARING] three powers: %s; padding a two-power decomposition", gate.three_reason)
        return pad_with_zero_term(two_powers(A, k))
    if allow_fallback:
        try:
            return exhaustive_fallback(A, k, 2 if terms == '2' else 3, budget)
        except BudgetExceeded as e:
            raise PreconditionViolated(f"{gate.reason}; fallback refused: {e}") from None
    raise PreconditionViolated(gate.reason if terms == 'auto' else
                               (gate.two_reason if terms == '2' else gate.three_reason))
