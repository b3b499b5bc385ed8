"""
Matrix Waring Architect - Polynomial Ring Module

Univariate polynomials over one tower level, irreducibility and primitivity
tests, Frobenius orbit polynomials, and the ascending searches for irreducible
and k-power irreducible polynomials with a prescribed trace.

Trace convention: for P = X^n - a_{n-1} X^{n-1} - ... - a_0 the trace is
a_{n-1}, the negated coefficient of X^{n-1} (the sum of the roots).
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .config import COHEN_EXCEPTIONAL_DEGREE, COHEN_EXCEPTIONS, TWO_POWERS_MIN_DIMENSION
from .errors import (
    CoefficientNotInBase,
    DivisionByZero,
    NotMonic,
    NoSuchPolynomial,
    PreconditionViolated,
    TheoremContradiction,
    WitnessInvalid,
)
from .fields import FFElement, factor_group_order

logger = logging.getLogger(__name__)


def _strip(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class Poly:
    """
    A polynomial over one tower level.

    Coefficients are field indices, little-endian, with trailing zeros removed,
    so the zero polynomial has an empty tuple and degree -1.
    """

    field: object
    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'coeffs', _strip(self.coeffs))

    # --- constructors ---------------------------------------------------

    @classmethod
    def constant(cls, field, c):
        return cls(field, (c,))

    @classmethod
    def x(cls, field):
        return cls(field, (0, 1))

    @classmethod
    def linear(cls, field, root):
        """X - root."""
        return cls(field, (field.neg(root), 1))

    # --- shape ----------------------------------------------------------

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self):
        return not self.coeffs

    def is_monic(self):
        return self.leading == 1

    def coefficient(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def encoding(self):
        """Little-endian coefficient vector read as a base-Q integer."""
        index = 0
        for c in reversed(self.coeffs):
            index = index * self.field.order + c
        return index

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            power = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            if not power:
                terms.append(str(c))
            else:
                terms.append(power if c == 1 else f"{c}*{power}")
        return "Poly(" + " + ".join(terms) + ")"

    # --- ring operations ------------------------------------------------

    def _check(self, other):
        if self.field != other.field:
            raise PreconditionViolated("polynomials over different tower levels")

    def __add__(self, other):
        self._check(other)
        f = self.field
        size = max(len(self.coeffs), len(other.coeffs))
        return Poly(f, [f.add(self.coefficient(i), other.coefficient(i)) for i in range(size)])

    def __neg__(self):
        return Poly(self.field, [self.field.neg(c) for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        f = self.field
        if self.is_zero() or other.is_zero():
            return Poly(f)
        product = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    product[i + j] = f.add(product[i + j], f.mul(a, b))
        return Poly(f, product)

    def scale(self, c):
        return Poly(self.field, [self.field.mul(c, a) for a in self.coeffs])

    def __divmod__(self, other):
        self._check(other)
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        f = self.field
        remainder = list(self.coeffs)
        lead_inv = f.inv(other.leading)
        shift_max = len(remainder) - len(other.coeffs)
        quotient = [0] * max(shift_max + 1, 0)
        for shift in range(shift_max, -1, -1):
            c = remainder[shift + other.degree]
            if c == 0:
                continue
            factor = f.mul(c, lead_inv)
            quotient[shift] = factor
            for i, b in enumerate(other.coeffs):
                if b:
                    remainder[shift + i] = f.sub(remainder[shift + i], f.mul(factor, b))
        return Poly(f, quotient), Poly(f, remainder)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __pow__(self, exponent):
        result = Poly.constant(self.field, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def monic(self):
        if self.is_zero():
            return self
        return self.scale(self.field.inv(self.leading))

    def evaluate(self, a):
        """Horner evaluation at a field index."""
        f = self.field
        value = 0
        for c in reversed(self.coeffs):
            value = f.add(f.mul(value, a), c)
        return value

    def powmod(self, exponent, modulus):
        """self^exponent mod modulus by square-and-multiply."""
        result = Poly.constant(self.field, 1) % modulus
        base = self % modulus
        while exponent:
            if exponent & 1:
                result = (result * base) % modulus
            base = (base * base) % modulus
            exponent >>= 1
        return result


def poly_gcd(f, g):
    """Monic gcd (zero only when both inputs are zero)."""
    while not g.is_zero():
        f, g = g, f % g
    return f.monic()


def poly_suite(f, g):
    """
    Every basic ring operation on a pair of same-level polynomials.

    Returns:
        dict: add, sub, mul, divmod (None for g = 0), gcd, eval_f_at_1 and
              x_pow_q_mod_g (X^Q mod g, None unless deg g >= 1)
    """
    field = f.field
    return {
        'add': f + g,
        'sub': f - g,
        'mul': f * g,
        'divmod': None if g.is_zero() else divmod(f, g),
        'gcd': poly_gcd(f, g),
        'eval_f_at_1': f.evaluate(1),
        'x_pow_q_mod_g': Poly.x(field).powmod(field.order, g) if g.degree >= 1 else None,
    }


def poly_trace(P):
    """Negated X^(n-1) coefficient of a monic polynomial of degree >= 1."""
    if P.degree < 1 or not P.is_monic():
        raise NotMonic(f"{P!r} is not monic of degree >= 1")
    return FFElement(P.field, P.field.neg(P.coefficient(P.degree - 1)))


# =====================================
# Irreducibility & Primitivity
# =====================================

def is_irreducible(P):
    """
    Rabin's test: X^(Q^d) = X mod P and gcd(X^(Q^(d/r)) - X, P) = 1 for prime r | d.
    """
    d = P.degree
    if d < 1:
        return False
    if d == 1:
        return True
    P = P.monic()
    if P.coefficient(0) == 0:
        return False

    field = P.field
    x = Poly.x(field)
    checkpoints = {d // r for r in factor_group_order(d)}
    power = x
    for j in range(1, d + 1):
        power = power.powmod(field.order, P)
        if j in checkpoints and poly_gcd(power - x, P).degree > 0:
            return False
    return power == x % P


def is_primitive(P):
    """True iff P is irreducible and X has order Q^d - 1 modulo P."""
    if not is_irreducible(P):
        return False
    P = P.monic()
    if P.coefficient(0) == 0:
        return False
    group = P.field.order ** P.degree - 1
    x = Poly.x(P.field)
    one = Poly.constant(P.field, 1)
    return all(x.powmod(group // r, P) != one for r in factor_group_order(group))


@lru_cache(maxsize=None)
def smallest_irreducible(field, degree):
    """
    The canonical modulus: least monic irreducible of the given degree by encoding.
    """
    if degree < 1:
        raise PreconditionViolated(f"degree must be >= 1, got {degree}")
    Q = field.order
    for free in range(Q ** degree):
        coeffs = []
        for _ in range(degree):
            free, c = divmod(free, Q)
            coeffs.append(c)
        candidate = Poly(field, coeffs + [1])
        if is_irreducible(candidate):
            return candidate
    raise TheoremContradiction(f"no irreducible polynomial of degree {degree} over {field!r}")


# =====================================
# Frobenius Orbits
# =====================================

def _relative_degree(field, base):
    degree = 1
    size = base.order
    while size < field.order:
        size *= base.order
        degree += 1
    if size != field.order:
        raise PreconditionViolated(f"{base!r} is not a subfield level of {field!r}")
    return degree


def _coefficient_level(a, base):
    if base is not None:
        return base
    return a.field.base if a.field.base is not None else a.field


def orbit_period(a, base=None):
    """
    Least u >= 1 with phi^u(a) = a, phi(x) = x^q for q the order of the base level.

    Args:
        a: FFElement at the top level
        base: Coefficient level (default: the level a's field extends)
    """
    base = _coefficient_level(a, base)
    field = a.field
    n = _relative_degree(field, base)
    x = field.pow(a.index, base.order)
    period = 1
    while x != a.index:
        x = field.pow(x, base.order)
        period += 1
    if n % period:
        raise TheoremContradiction(f"orbit period {period} does not divide {n}")
    return period


def frobenius_orbit(a, base=None):
    """Indices a, phi(a), ..., phi^(n-1)(a) (full length n, repetitions kept)."""
    base = _coefficient_level(a, base)
    field = a.field
    sequence = [a.index]
    for _ in range(_relative_degree(field, base) - 1):
        sequence.append(field.pow(sequence[-1], base.order))
    return sequence


def orbit_poly(a, base=None):
    """
    Phi_a = (X - a)(X - phi(a))...(X - phi^(n-1)(a)) as a polynomial over the base level.
    """
    base = _coefficient_level(a, base)
    field = a.field
    product = Poly.constant(field, 1)
    for root in frobenius_orbit(a, base):
        product = product * Poly.linear(field, root)
    stray = [c for c in product.coeffs if c >= base.order]
    if stray:
        logger.error("[POLY] orbit polynomial of %r has coefficients outside the base: %s", a, stray)
        raise CoefficientNotInBase(f"orbit polynomial of {a!r} left the base level")
    return Poly(base, product.coeffs)


def field_trace(a, base=None):
    """a + phi(a) + ... + phi^(n-1)(a), returned as a base-level element."""
    base = _coefficient_level(a, base)
    field = a.field
    total = 0
    for x in frobenius_orbit(a, base):
        total = field.add(total, x)
    return FFElement(base, total)


# =====================================
# Prescribed-Trace Searches
# =====================================

def is_cohen_exception(q, n, t):
    """Trace-0 primitive polynomials are missing in degree 2 and for (q, n) = (4, 3)."""
    return t == 0 and (n == COHEN_EXCEPTIONAL_DEGREE or (q, n) in COHEN_EXCEPTIONS)


def find_irreducible_with_trace(field, n, t, require_primitive=False, enforce_exceptions=True):
    """
    Least monic degree-n polynomial over the field with trace t passing the test.

    The X^(n-1) coefficient is pinned to -t and the remaining free coefficients
    are enumerated by ascending base-Q encoding.

    Args:
        field: Coefficient level (F_q)
        n: Degree >= 1
        t: Trace as a field index or FFElement
        require_primitive: Also require is_primitive
        enforce_exceptions: Reject the known trace-0 primitive exceptions up front

    Returns:
        Poly: The least passing polynomial
    """
    t = t.index if isinstance(t, FFElement) else t
    if n < 1:
        raise PreconditionViolated(f"degree must be >= 1, got {n}")
    Q = field.order
    exceptional = is_cohen_exception(Q, n, t)
    if require_primitive and exceptional and enforce_exceptions:
        raise NoSuchPolynomial(
            f"no primitive polynomial of degree {n} with trace 0 exists over GF({Q})"
        )

    test = is_primitive if require_primitive else is_irreducible
    pinned = field.neg(t)
    free_count = n - 1
    for free in range(Q ** free_count):
        coeffs = []
        for _ in range(free_count):
            free, c = divmod(free, Q)
            coeffs.append(c)
        if n >= 2 and coeffs[0] == 0:
            continue
        candidate = Poly(field, coeffs + [pinned, 1])
        if test(candidate):
            return candidate

    guaranteed = not exceptional and (n > 1 or not require_primitive or field.is_primitive_element(t))
    if guaranteed:
        logger.error("[POLY] exhausted degree-%d search over GF(%d) for trace %d", n, Q, t)
    raise NoSuchPolynomial(
        f"no {'primitive' if require_primitive else 'irreducible'} polynomial of degree {n} "
        f"with trace {t} over GF({Q})",
        guaranteed=guaranteed,
    )


@dataclass(frozen=True)
class KPowerWitness:
    """P = Phi_{a^k}, irreducible of degree n, with its top-level witness a."""

    P: Poly
    a: FFElement
    k: int

    def validate(self, base=None):
        """Raise WitnessInvalid unless the orbit of a^k has full length n."""
        b = self.a ** self.k
        n = _relative_degree(self.a.field, _coefficient_level(self.a, base))
        if orbit_period(b, base) != n or orbit_poly(b, base) != self.P:
            raise WitnessInvalid(f"{self!r} is not a k-power witness")
        return True


def kpower_guaranteed(q, n, k):
    """Parameters where a k-power irreducible with any trace is known to exist."""
    return n >= TWO_POWERS_MIN_DIMENSION and gcd(k, q) == 1 and k < q


def find_kpower_irreducible_with_trace(top, k, t, base=None):
    """
    First a (ascending index) with orbit_period(a^k) = n and trace(Phi_{a^k}) = t.

    Args:
        top: The top level F_{q^n}
        k: Exponent
        t: Target trace, index or FFElement of the base level
        base: Coefficient level (default: the level top extends)

    Returns:
        KPowerWitness: (Phi_{a^k}, a, k)
    """
    t = t.index if isinstance(t, FFElement) else t
    zero = FFElement(top, 0)
    base = _coefficient_level(zero, base)
    n = _relative_degree(top, base)
    for index in range(top.order):
        b = FFElement(top, top.pow(index, k))
        if orbit_period(b, base) != n:
            continue
        if field_trace(b, base).index != t:
            continue
        return KPowerWitness(orbit_poly(b, base), FFElement(top, index), k)

    guaranteed = kpower_guaranteed(base.order, n, k)
    if guaranteed:
        logger.error("[POLY] no %d-power irreducible of degree %d with trace %d over GF(%d)",
                     k, n, t, base.order)
    raise NoSuchPolynomial(
        f"no {k}-power irreducible polynomial of degree {n} with trace {t} over GF({base.order})",
        guaranteed=guaranteed,
    )


def canonical_extension(field, degree):
    """field[X]/(h) for the canonical irreducible h of the degree (the field itself for degree 1)."""
    from .fields import extension_field

    if degree == 1:
        return field
    return extension_field(field, smallest_irreducible(field, degree).coeffs)
