"""
Matrix Waring Architect - Finite Field Module

Exact arithmetic in the tower F_p < F_q = F_{p^m} < F_{q^n}.

Elements are plain integer indices: the little-endian base-p digits of an index
are its coefficients in the fixed polynomial basis, so index 0 is zero, index 1
is one, and a subfield element keeps its index when viewed in the larger field.
Fields small enough get exp/log/Zech tables and do every operation by lookup;
larger ones multiply polynomials modulo the defining modulus.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

from sympy import factorint, isprime

from .config import (
    FACTOR_TRIAL_LIMIT,
    BSGS_MEMORY_CAP,
    TABLE_LIMIT,
    SEQUENTIAL_LOG_CAP,
)
from .errors import (
    BudgetExceeded,
    DivisionByZero,
    NoDecomposition,
    NoLogarithm,
    PreconditionViolated,
    TheoremContradiction,
    ZeroOrderUndefined,
)

logger = logging.getLogger(__name__)


# =====================================
# Group Orders
# =====================================

@lru_cache(maxsize=None)
def _factor_items(value):
    factors = factorint(value, limit=FACTOR_TRIAL_LIMIT)
    composite = [f for f in factors if not isprime(f)]
    if composite:
        raise BudgetExceeded(
            f"could not factor {value} within the trial-division budget "
            f"{FACTOR_TRIAL_LIMIT} (composite cofactor {composite[0]})"
        )
    return tuple(sorted(factors.items()))


def factor_group_order(value):
    """
    Factor a group order into primes.

    Args:
        value: Positive integer (usually a field cardinality minus one)

    Returns:
        dict: {prime: exponent}; empty for 1
    """
    if value < 1:
        raise ValueError(f"group order must be positive, got {value}")
    if value == 1:
        return {}
    return dict(_factor_items(value))


def order_from_multiple(element, multiple, power, identity):
    """
    Exact order of a group element given any multiple of it (exponent stripping).

    Args:
        element: Group element
        multiple: Integer with element^multiple = identity
        power: Callable (element, exponent) -> element
        identity: The identity element

    Returns:
        int: The least positive e with element^e = identity
    """
    result = multiple
    for prime, exponent in factor_group_order(multiple).items():
        result //= prime ** exponent
        x = power(element, result)
        while x != identity:
            x = power(x, prime)
            result *= prime
    return result


# =====================================
# Field Levels
# =====================================

class FiniteField:
    """
    Common algorithms for one level of the tower.

    Subclasses provide add/neg/mul/inv/pow on integer indices plus ``order``,
    ``characteristic``, ``absolute_degree`` and ``base``.
    """

    order = 0
    characteristic = 0
    absolute_degree = 0
    base = None

    # --- identity -------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, FiniteField) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def element(self, index):
        """Wrap an index as an FFElement of this field."""
        return FFElement(self, index)

    def elements(self):
        return range(self.order)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def embeds(self, index):
        """True when the index lies in the subfield this level extends."""
        return self.base is None or index < self.base.order

    # --- orders and generators -----------------------------------------

    def element_order(self, a):
        """
        Multiplicative order of a non-zero element.

        Computed from the factorization of order - 1 by stripping prime powers.
        """
        if a == 0:
            raise ZeroOrderUndefined("the zero element has no multiplicative order")
        return order_from_multiple(a, self.order - 1, self.pow, 1)

    def is_primitive_element(self, a):
        if a == 0:
            return False
        group = self.order - 1
        return all(self.pow(a, group // r) != 1 for r in factor_group_order(group))

    def primitive_element(self):
        """Least-index element of full multiplicative order."""
        if getattr(self, '_generator', None) is None:
            self._generator = self._least_primitive()
        return self._generator

    def _least_primitive(self):
        for candidate in range(1, self.order):
            if self.is_primitive_element(candidate):
                return candidate
        raise TheoremContradiction(f"{self!r} has no primitive element")

    # --- logarithms and roots -------------------------------------------

    def discrete_log(self, g, a):
        """
        Least e >= 0 with g^e = a, for a primitive g.

        Baby-step/giant-step while the baby-step table fits the memory cap,
        sequential powering otherwise.
        """
        if a == 0:
            raise NoLogarithm("zero has no discrete logarithm")
        group = self.order - 1
        fast = self._table_log(g, a)
        if fast is not None:
            return fast

        steps = isqrt(group - 1) + 1 if group > 1 else 1
        if steps <= BSGS_MEMORY_CAP:
            baby = {}
            x = 1
            for j in range(steps):
                baby.setdefault(x, j)
                x = self.mul(x, g)
            giant = self.pow(self.inv(g), steps)
            y = a
            for i in range(steps + 1):
                j = baby.get(y)
                if j is not None:
                    return i * steps + j
                y = self.mul(y, giant)
            raise NoLogarithm(f"{a} is not a power of {g} in {self!r}")

        x = 1
        for e in range(min(group, SEQUENTIAL_LOG_CAP)):
            if x == a:
                return e
            x = self.mul(x, g)
        raise NoLogarithm(f"{a} is not a power of {g} in {self!r} within the sequential cap")

    def _table_log(self, g, a):
        return None

    def frobenius_inverse(self, a, e):
        """Inverse of the bijection x -> x^(p^e)."""
        if e == 0 or a == 0:
            return a
        rounds = -(-e // self.absolute_degree)
        return self.pow(a, self.characteristic ** (rounds * self.absolute_degree - e))

    def _split_characteristic(self, k):
        p_power = 0
        while k % self.characteristic == 0:
            k //= self.characteristic
            p_power += 1
        return p_power, k

    def is_kth_power(self, a, k):
        if a == 0:
            return True
        _, coprime = self._split_characteristic(k)
        group = self.order - 1
        return self.pow(a, group // gcd(coprime, group)) == 1

    def kth_root(self, a, k):
        """
        Least-index x with x^k = a, or None when a is not a k-th power.

        k = p^e * k' is handled in two steps: the k'-th root through the discrete
        log, then the p^e-th root through the inverse Frobenius bijection.
        """
        if k < 1:
            raise ValueError(f"exponent must be positive, got {k}")
        if a == 0:
            return 0
        p_power, coprime = self._split_characteristic(k)
        group = self.order - 1
        d = gcd(coprime, group)
        if self.pow(a, group // d) != 1:
            return None

        g = self.primitive_element()
        log_a = self.discrete_log(g, a)
        reduced = group // d
        base_exponent = (log_a // d) * pow(coprime // d, -1, reduced) % reduced if reduced > 1 else 0
        roots = []
        for j in range(d):
            y = self.pow(g, base_exponent + j * reduced)
            roots.append(self.frobenius_inverse(y, p_power))
        return min(roots)

    def two_kth_powers(self, alpha, k):
        """
        Deterministic (x, y) with x^k + y^k = alpha.

        Least x whose remainder alpha - x^k is a k-th power, then its least root y.
        Exhaustion is only legitimate when order <= (k - 1)^4.
        """
        if alpha == 0:
            return 0, 0
        for x in range(self.order):
            rest = self.sub(alpha, self.pow(x, k))
            if self.is_kth_power(rest, k):
                return x, self.kth_root(rest, k)

        guaranteed = self.order > (k - 1) ** 4
        if guaranteed:
            logger.error("[FIELDS] no two %d-th powers sum to %d in %r despite Q > (k-1)^4", k, alpha, self)
        raise NoDecomposition(
            f"{alpha} is not a sum of two {k}-th powers in {self!r}", guaranteed=guaranteed
        )


class PrimeField(FiniteField):
    """F_p with plain modular arithmetic."""

    def __init__(self, p):
        if not isprime(p):
            raise PreconditionViolated(f"{p} is not prime")
        self.p = p
        self.order = p
        self.characteristic = p
        self.absolute_degree = 1
        self.degree = 1
        self.base = None
        self.modulus = (0, 1)
        self.key = ('prime', p)
        self._generator = None

    def __repr__(self):
        return f"GF({self.p})"

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a == 0:
            raise DivisionByZero(f"inversion of zero in {self!r}")
        return pow(a, self.p - 2, self.p)

    def pow(self, a, e):
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(a, e, self.p)

    def frobenius(self, a):
        return a

    def coefficients(self, a):
        return [a]

    def encode(self, coeffs):
        return coeffs[0] % self.p if coeffs else 0

    def _table_log(self, g, a):
        return None


class ExtensionField(FiniteField):
    """
    base[X] / (modulus) for a monic irreducible modulus over the base level.

    Args:
        base: The level being extended
        modulus: Little-endian tuple of base indices, monic, degree >= 1
        tabulate: Build exp/log/Zech tables (default: order <= TABLE_LIMIT)
    """

    def __init__(self, base, modulus, tabulate=None):
        modulus = tuple(modulus)
        if len(modulus) < 2 or modulus[-1] != 1:
            raise PreconditionViolated(f"modulus {modulus} must be monic of degree >= 1")
        self.base = base
        self.modulus = modulus
        self.degree = len(modulus) - 1
        self.order = base.order ** self.degree
        self.characteristic = base.characteristic
        self.absolute_degree = base.absolute_degree * self.degree
        self.key = ('ext', base.key, modulus)
        self._reduction = [base.neg(c) for c in modulus[:-1]]
        self._generator = None
        self._exp = self._log = self._zech = None

        if tabulate is None:
            tabulate = self.order <= TABLE_LIMIT
        if tabulate:
            self._build_tables()

    def __repr__(self):
        return f"GF({self.base!r}^{self.degree}; modulus={list(self.modulus)})"

    @property
    def tabulated(self):
        return self._exp is not None

    # --- encoding -------------------------------------------------------

    def coefficients(self, a):
        """Coordinates of a over the base level, little-endian, padded to the degree."""
        q = self.base.order
        coeffs = []
        for _ in range(self.degree):
            a, c = divmod(a, q)
            coeffs.append(c)
        return coeffs

    def encode(self, coeffs):
        q = self.base.order
        index = 0
        for c in reversed(list(coeffs)[:self.degree]):
            index = index * q + c
        return index

    # --- direct arithmetic ----------------------------------------------

    def _add_direct(self, a, b):
        base = self.base
        return self.encode([base.add(x, y) for x, y in zip(self.coefficients(a), self.coefficients(b))])

    def _neg_direct(self, a):
        return self.encode([self.base.neg(x) for x in self.coefficients(a)])

    def _mul_direct(self, a, b):
        base = self.base
        d = self.degree
        x = self.coefficients(a)
        y = self.coefficients(b)
        product = [0] * (2 * d - 1)
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            for j, yj in enumerate(y):
                if yj:
                    product[i + j] = base.add(product[i + j], base.mul(xi, yj))
        for top in range(2 * d - 2, d - 1, -1):
            c = product[top]
            if c == 0:
                continue
            product[top] = 0
            shift = top - d
            for i, r in enumerate(self._reduction):
                if r:
                    product[shift + i] = base.add(product[shift + i], base.mul(c, r))
        return self.encode(product[:d])

    def _pow_direct(self, a, e):
        result = 1
        while e:
            if e & 1:
                result = self._mul_direct(result, a)
            a = self._mul_direct(a, a)
            e >>= 1
        return result

    # --- tables ---------------------------------------------------------

    def _build_tables(self):
        group = self.order - 1
        generator = None
        for candidate in range(1, self.order):
            if candidate != 0 and all(
                self._pow_direct(candidate, group // r) != 1 for r in factor_group_order(group)
            ):
                generator = candidate
                break
        if generator is None:
            raise TheoremContradiction(f"{self!r} has no primitive element")

        exp = [0] * group
        log = [0] * self.order
        x = 1
        for i in range(group):
            exp[i] = x
            log[x] = i
            x = self._mul_direct(x, generator)
        if x != 1:
            raise TheoremContradiction(f"generator {generator} of {self!r} does not cycle")

        zech = [0] * group
        for i in range(group):
            shifted = self._add_direct(exp[i], 1)
            zech[i] = -1 if shifted == 0 else log[shifted]

        self._exp, self._log, self._zech = exp, log, zech
        self._generator = generator
        logger.debug("[FIELDS] tabulated %r with generator %d", self, generator)

    def _table_log(self, g, a):
        if self._log is None:
            return None
        group = self.order - 1
        log_g = self._log[g] if g else 0
        if group == 1:
            return 0
        if gcd(log_g, group) != 1:
            return None
        return self._log[a] * pow(log_g, -1, group) % group

    def exp_table(self):
        """List of g^i for the table generator g (None when untabulated)."""
        return self._exp

    def log_table(self):
        return self._log

    # --- field operations -----------------------------------------------

    def add(self, a, b):
        if self._zech is None:
            return self._add_direct(a, b)
        if a == 0:
            return b
        if b == 0:
            return a
        group = self.order - 1
        la = self._log[a]
        z = self._zech[(self._log[b] - la) % group]
        if z < 0:
            return 0
        return self._exp[(la + z) % group]

    def neg(self, a):
        if a == 0 or self.characteristic == 2:
            return a
        if self._log is None:
            return self._neg_direct(a)
        group = self.order - 1
        return self._exp[(self._log[a] + group // 2) % group]

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        if self._log is None:
            return self._mul_direct(a, b)
        return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]

    def inv(self, a):
        if a == 0:
            raise DivisionByZero(f"inversion of zero in {self!r}")
        if self._log is None:
            return self._pow_direct(a, self.order - 2)
        return self._exp[(-self._log[a]) % (self.order - 1)]

    def pow(self, a, e):
        if e < 0:
            return self.pow(self.inv(a), -e)
        if e == 0:
            return 1
        if a == 0:
            return 0
        if self._log is None:
            return self._pow_direct(a, e % (self.order - 1) or (self.order - 1))
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    def frobenius(self, a):
        """a^Q for Q the base order; fixes the base level pointwise."""
        return self.pow(a, self.base.order)


@lru_cache(maxsize=None)
def prime_field(p):
    return PrimeField(p)


@lru_cache(maxsize=None)
def extension_field(base, modulus, tabulate=None):
    return ExtensionField(base, tuple(modulus), tabulate)


# =====================================
# Elements
# =====================================

@dataclass(frozen=True)
class FFElement:
    """An element of one tower level, identified by its integer index."""

    field: FiniteField
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.field.order:
            raise ValueError(f"index {self.index} out of range for {self.field!r}")

    def __repr__(self):
        return f"FFElement({self.index} in {self.field!r})"

    def _peer(self, other):
        if isinstance(other, int):
            return other % self.field.order if self.field.base is None else other
        if other.field != self.field:
            raise PreconditionViolated("operands live in different tower levels")
        return other.index

    def __add__(self, other):
        return FFElement(self.field, self.field.add(self.index, self._peer(other)))

    def __sub__(self, other):
        return FFElement(self.field, self.field.sub(self.index, self._peer(other)))

    def __mul__(self, other):
        return FFElement(self.field, self.field.mul(self.index, self._peer(other)))

    def __truediv__(self, other):
        return FFElement(self.field, self.field.div(self.index, self._peer(other)))

    def __neg__(self):
        return FFElement(self.field, self.field.neg(self.index))

    def __pow__(self, exponent):
        return FFElement(self.field, self.field.pow(self.index, exponent))

    def inverse(self):
        return FFElement(self.field, self.field.inv(self.index))

    def is_zero(self):
        return self.index == 0

    def coefficients(self):
        return self.field.coefficients(self.index)


def arithmetic_suite(a, b):
    """
    Every basic operation on a pair of same-level elements.

    Returns:
        dict: {'add', 'sub', 'mul', 'inv', 'pow'} results; 'inv' is None for b = 0
              and 'pow' is a^(index of b)
    """
    return {
        'add': a + b,
        'sub': a - b,
        'mul': a * b,
        'inv': None if b.is_zero() else b.inverse(),
        'pow': a ** b.index,
    }


def frobenius(a, tower=None):
    """
    a^q for an element of a tower's top level, q = |F_q| of that tower.

    Without a tower, q is the order of the level a's field extends (identity on F_p).
    """
    if tower is None:
        return FFElement(a.field, a.field.frobenius(a.index))
    if a.field != tower.top:
        raise PreconditionViolated(f"{a!r} is not on the top level of {tower!r}")
    return FrobeniusMap(tower)(a)


def element_order(a):
    return a.field.element_order(a.index)


def find_primitive(field):
    return FFElement(field, field.primitive_element())


def discrete_log(g, a):
    return a.field.discrete_log(g.index, a.index)


def kth_root(a, k):
    root = a.field.kth_root(a.index, k)
    return None if root is None else FFElement(a.field, root)


def two_kth_powers(alpha, k):
    x, y = alpha.field.two_kth_powers(alpha.index, k)
    return FFElement(alpha.field, x), FFElement(alpha.field, y)


# =====================================
# Towers
# =====================================

class FieldTower:
    """
    F_p < F_q = F_{p^m} < F_{q^n} with explicit irreducible moduli.

    Moduli are little-endian coefficient tuples (base-p digits for the base
    modulus, F_q indices for the top one), monic and verified irreducible.
    """

    def __init__(self, p, m=1, n=1, base_modulus=None, top_modulus=None, tabulate=None):
        from .polyring import Poly, is_irreducible, smallest_irreducible

        if m < 1 or n < 1:
            raise PreconditionViolated(f"extension degrees must be >= 1 (m={m}, n={n})")
        self.p = p
        self.m = m
        self.n = n
        self.prime = prime_field(p)

        if base_modulus is None:
            base_modulus = smallest_irreducible(self.prime, m).coeffs
        base_modulus = tuple(base_modulus)
        if len(base_modulus) != m + 1 or not is_irreducible(Poly(self.prime, base_modulus)) \
                or base_modulus[-1] != 1:
            raise PreconditionViolated(f"base modulus {list(base_modulus)} is not monic irreducible of degree {m}")
        self.base_modulus = base_modulus
        self.mid = self.prime if m == 1 else extension_field(self.prime, base_modulus)
        self.q = self.mid.order

        if top_modulus is None:
            top_modulus = smallest_irreducible(self.mid, n).coeffs
        top_modulus = tuple(top_modulus)
        if len(top_modulus) != n + 1 or top_modulus[-1] != 1 \
                or not is_irreducible(Poly(self.mid, top_modulus)):
            raise PreconditionViolated(f"top modulus {list(top_modulus)} is not monic irreducible of degree {n}")
        self.top_modulus = top_modulus
        self.top = self.mid if n == 1 else extension_field(self.mid, top_modulus, tabulate)

    def __repr__(self):
        return f"FieldTower(p={self.p}, m={self.m}, n={self.n})"

    @property
    def cardinality(self):
        return self.top.order

    def level(self, name):
        return {'prime': self.prime, 'mid': self.mid, 'top': self.top}[name]

    def frobenius_map(self):
        return FrobeniusMap(self)

    def spec(self):
        return {'p': self.p, 'm': self.m, 'modulus': list(self.base_modulus)}


@lru_cache(maxsize=None)
def build_tower(p, m=1, n=1, base_modulus=None, top_modulus=None):
    """Cached tower constructor; canonical moduli when none are given."""
    return FieldTower(p, m, n, base_modulus, top_modulus)


def with_degree(tower, n, top_modulus=None, tabulate=None):
    """Same F_q, different top degree (or an explicit top modulus)."""
    if tabulate is None:
        return build_tower(tower.p, tower.m, n, tower.base_modulus,
                           None if top_modulus is None else tuple(top_modulus))
    return FieldTower(tower.p, tower.m, n, tower.base_modulus, top_modulus, tabulate)


@dataclass(frozen=True)
class FrobeniusMap:
    """phi(x) = x^q acting on the top level of a tower."""

    tower: FieldTower

    def __call__(self, a):
        return FFElement(self.tower.top, self.apply(a.index))

    def apply(self, index, times=1):
        top = self.tower.top
        for _ in range(times % self.tower.n if self.tower.n > 1 else 0):
            index = top.pow(index, self.tower.q)
        return index

    def orbit(self, index):
        """The full length-n sequence a, phi(a), ..., phi^(n-1)(a) of indices."""
        sequence = [index]
        for _ in range(self.tower.n - 1):
            sequence.append(self.tower.top.pow(sequence[-1], self.tower.q))
        return sequence


def field_of_order(q):
    """The canonical F_q for a prime power q."""
    factors = factorint(q)
    if len(factors) != 1:
        raise PreconditionViolated(f"{q} is not a prime power")
    (p, m), = factors.items()
    return build_tower(p, m).mid
