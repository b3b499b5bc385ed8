"""
Matrix Waring Architect - Matrix Linear Algebra Module

Exact matrices over one tower level: Gaussian elimination, companion matrices,
Krylov sequences, the Frobenius (invariant-factor) normal form with an explicit
similarity witness, cyclic similarity of non-derogatory matrices, and the
prescribed-column completion used by the splitting constructions.
"""

import logging
from dataclasses import dataclass

from .errors import (
    DegenerateBasis,
    NotMonic,
    NotSimilar,
    PreconditionViolated,
    PrescriptionViolation,
    SingularMatrix,
    TheoremContradiction,
)
from .polyring import Poly, poly_gcd

logger = logging.getLogger(__name__)


# =====================================
# Row Reduction
# =====================================

def _rref(rows, field, limit=None):
    """
    Reduced row echelon form in place.

    Args:
        rows: List of mutable row lists
        field: Coefficient level
        limit: Only pivot in the first `limit` columns (default: all)

    Returns:
        list: Pivot column of each leading row
    """
    if not rows:
        return []
    width = len(rows[0]) if limit is None else limit
    pivots = []
    r = 0
    for col in range(width):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        scale = field.inv(rows[r][col])
        rows[r] = [field.mul(scale, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                factor = rows[i][col]
                rows[i] = [field.sub(x, field.mul(factor, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return pivots


class _Echelon:
    """Incremental independence test that remembers how each inserted vector was built."""

    def __init__(self, field, size):
        self.field = field
        self.size = size
        self.rows = []       # (vector, pivot, combination over inserted vectors)
        self.count = 0

    def insert(self, vector):
        """Add the vector if independent (returns None), else return its coordinates."""
        f = self.field
        residue = list(vector)
        combo = [0] * self.count
        for row, pivot, row_combo in self.rows:
            c = residue[pivot]
            if c:
                residue = [f.sub(x, f.mul(c, y)) for x, y in zip(residue, row)]
                combo = [f.add(x, f.mul(c, y)) for x, y in zip(combo, row_combo + [0] * (len(combo) - len(row_combo)))]
        pivot = next((i for i, x in enumerate(residue) if x), None)
        if pivot is None:
            return combo
        scale = f.inv(residue[pivot])
        own = [f.neg(x) for x in combo] + [1]
        self.rows.append(([f.mul(scale, x) for x in residue], pivot, [f.mul(scale, x) for x in own]))
        self.count += 1
        return None


# =====================================
# Matrices
# =====================================

@dataclass(frozen=True)
class FFMatrix:
    """An immutable matrix of field indices over one tower level, row-major."""

    field: object
    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.rows)
        if rows and any(len(row) != len(rows[0]) for row in rows):
            raise PreconditionViolated("ragged matrix rows")
        object.__setattr__(self, 'rows', rows)

    # --- constructors ---------------------------------------------------

    @classmethod
    def zeros(cls, field, n, m=None):
        return cls(field, [[0] * (n if m is None else m) for _ in range(n)])

    @classmethod
    def identity(cls, field, n):
        return cls.scalar(field, n, 1)

    @classmethod
    def scalar(cls, field, n, c):
        return cls(field, [[c if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, field, columns):
        return cls(field, [list(row) for row in zip(*columns)])

    @classmethod
    def decode(cls, field, n, index):
        """Inverse of encoding(): base-Q digits, row-major, entry (0, 0) least significant."""
        entries = []
        for _ in range(n * n):
            index, c = divmod(index, field.order)
            entries.append(c)
        return cls(field, [entries[i * n:(i + 1) * n] for i in range(n)])

    # --- shape ----------------------------------------------------------

    @property
    def n(self):
        return len(self.rows)

    @property
    def width(self):
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, key):
        i, j = key
        return self.rows[i][j]

    def column(self, j):
        return [row[j] for row in self.rows]

    def columns(self):
        return [self.column(j) for j in range(self.width)]

    def transpose(self):
        return FFMatrix(self.field, list(zip(*self.rows)))

    def submatrix(self, rows, cols):
        return FFMatrix(self.field, [[self.rows[i][j] for j in cols] for i in rows])

    def with_entry(self, i, j, value):
        rows = [list(row) for row in self.rows]
        rows[i][j] = value
        return FFMatrix(self.field, rows)

    def encoding(self):
        index = 0
        for row in reversed(self.rows):
            for x in reversed(row):
                index = index * self.field.order + x
        return index

    def to_lists(self):
        return [list(row) for row in self.rows]

    # --- predicates -----------------------------------------------------

    def is_zero(self):
        return all(x == 0 for row in self.rows for x in row)

    def is_scalar(self):
        c = self.rows[0][0] if self.rows else 0
        return self == FFMatrix.scalar(self.field, self.n, c)

    def trace(self):
        total = 0
        for i in range(self.n):
            total = self.field.add(total, self.rows[i][i])
        return total

    # --- arithmetic -----------------------------------------------------

    def _check(self, other):
        if self.field != other.field:
            raise PreconditionViolated("matrices over different tower levels")

    def __add__(self, other):
        self._check(other)
        f = self.field
        return FFMatrix(f, [[f.add(x, y) for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        f = self.field
        return FFMatrix(f, [[f.neg(x) for x in row] for row in self.rows])

    def __sub__(self, other):
        self._check(other)
        f = self.field
        return FFMatrix(f, [[f.sub(x, y) for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def scale(self, c):
        f = self.field
        return FFMatrix(f, [[f.mul(c, x) for x in row] for row in self.rows])

    def __mul__(self, other):
        self._check(other)
        if self.width != other.n:
            raise PreconditionViolated(f"cannot multiply {self.n}x{self.width} by {other.n}x{other.width}")
        f = self.field
        cols = other.columns()
        result = []
        for row in self.rows:
            out = []
            for col in cols:
                total = 0
                for x, y in zip(row, col):
                    if x and y:
                        total = f.add(total, f.mul(x, y))
                out.append(total)
            result.append(out)
        return FFMatrix(f, result)

    def apply(self, vector):
        """Matrix-vector product."""
        f = self.field
        out = []
        for row in self.rows:
            total = 0
            for x, y in zip(row, vector):
                if x and y:
                    total = f.add(total, f.mul(x, y))
            out.append(total)
        return out

    def row_apply(self, vector):
        """Row-vector-matrix product vector * self."""
        return self.transpose().apply(vector)

    def __pow__(self, exponent):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = FFMatrix.identity(self.field, self.n)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # --- elimination ----------------------------------------------------

    def rank(self):
        rows = self.to_lists()
        return len(_rref(rows, self.field))

    def inverse(self):
        n = self.n
        if n != self.width:
            raise PreconditionViolated("only square matrices have inverses")
        rows = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(self.rows)]
        pivots = _rref(rows, self.field, limit=n)
        if len(pivots) < n:
            raise SingularMatrix(f"{n}x{n} matrix has rank {len(pivots)}")
        return FFMatrix(self.field, [row[n:] for row in rows])

    def solve(self, b):
        """
        A particular solution x of self * x = b (free variables set to zero).
        """
        rows = [list(row) + [b[i]] for i, row in enumerate(self.rows)]
        width = self.width
        pivots = _rref(rows, self.field, limit=width)
        for row in rows[len(pivots):]:
            if row[width]:
                raise SingularMatrix("inconsistent linear system")
        x = [0] * width
        for r, col in enumerate(pivots):
            x[col] = rows[r][width]
        return x

    def nullspace(self):
        """Basis of the right kernel, one vector per free column."""
        rows = self.to_lists()
        width = self.width
        pivots = _rref(rows, self.field)
        f = self.field
        basis = []
        for free in (c for c in range(width) if c not in pivots):
            vector = [0] * width
            vector[free] = 1
            for r, col in enumerate(pivots):
                vector[col] = f.neg(rows[r][free])
            basis.append(vector)
        return basis


def block_diagonal(field, blocks):
    size = sum(b.n for b in blocks)
    rows = [[0] * size for _ in range(size)]
    offset = 0
    for block in blocks:
        for i, row in enumerate(block.rows):
            rows[offset + i][offset:offset + block.n] = list(row)
        offset += block.n
    return FFMatrix(field, rows)


def bordered(corner_block, column, corner):
    """[[D, x], [0, t]] from an (n-1)x(n-1) block, a column and a scalar."""
    size = corner_block.n + 1
    rows = [list(row) + [column[i]] for i, row in enumerate(corner_block.rows)]
    rows.append([0] * (size - 1) + [corner])
    return FFMatrix(corner_block.field, rows)


def poly_at_matrix(P, A):
    """P(A) by Horner's rule."""
    result = FFMatrix.zeros(A.field, A.n)
    for c in reversed(P.coeffs):
        result = result * A + FFMatrix.scalar(A.field, A.n, c)
    return result


def mat_suite(A, B):
    """
    Every basic matrix operation on a pair of same-level square matrices.

    Returns:
        dict: add, sub, mul, square, rank; inverse and solve (B x = first column
              of A) are None when B is singular
    """
    try:
        inverse = B.inverse()
        solution = B.solve(A.column(0))
    except SingularMatrix:
        inverse = solution = None
    return {
        'add': A + B,
        'sub': A - B,
        'mul': A * B,
        'square': A ** 2,
        'rank': B.rank(),
        'inverse': inverse,
        'solve': solution,
    }


def random_matrix(field, n, rng):
    """Uniform matrix from a random.Random instance."""
    return FFMatrix(field, [[rng.randrange(field.order) for _ in range(n)] for _ in range(n)])


# =====================================
# Companion Matrices & Krylov Sequences
# =====================================

def companion(P):
    """
    Subdiagonal ones, last column (a_0, ..., a_{n-1}) for P = X^n - a_{n-1}X^{n-1} - ... - a_0.
    """
    if P.degree < 1 or not P.is_monic():
        raise NotMonic(f"companion matrix needs a monic polynomial of degree >= 1, got {P!r}")
    f = P.field
    n = P.degree
    rows = [[0] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = 1
    for i in range(n):
        rows[i][n - 1] = f.neg(P.coefficient(i))
    return FFMatrix(f, rows)


def krylov(A, v):
    """
    Krylov basis v, Av, ..., A^(d-1)v and the local minimal polynomial of v.

    Returns:
        tuple: (list of vectors, monic Poly of degree d)
    """
    f = A.field
    echelon = _Echelon(f, A.n)
    vectors = []
    w = list(v)
    while True:
        combo = echelon.insert(w)
        if combo is not None:
            break
        vectors.append(w)
        w = A.apply(w)
    return vectors, Poly(f, [f.neg(c) for c in combo] + [1])


def _unit(n, j):
    return [1 if i == j else 0 for i in range(n)]


def _combine_vector(A, v, f, w, g):
    """
    A vector whose local minimal polynomial is lcm(f, g), given f = min_v and g = min_w.
    """
    basis = [p.monic() for p in (f, g) if p.degree > 0]
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            for j in range(i + 1, len(basis)):
                d = poly_gcd(basis[i], basis[j])
                if d.degree > 0:
                    a, b = basis[i] // d, basis[j] // d
                    basis = [p for k, p in enumerate(basis) if k not in (i, j)]
                    basis.extend(p for p in (a, d, b) if p.degree > 0)
                    changed = True
                    break
            if changed:
                break

    one = Poly.constant(A.field, 1)
    f_part, g_part = one, one
    for element in basis:
        ef, eg = _multiplicity(f, element), _multiplicity(g, element)
        if ef >= eg:
            f_part = f_part * element ** ef
        else:
            g_part = g_part * element ** eg

    left = poly_at_matrix(f // f_part, A).apply(v)
    right = poly_at_matrix(g // g_part, A).apply(w)
    combined = [A.field.add(x, y) for x, y in zip(left, right)]
    return combined, (f_part * g_part).monic()


def _multiplicity(f, p):
    count = 0
    while f.degree >= p.degree:
        quotient, remainder = divmod(f, p)
        if not remainder.is_zero():
            break
        f = quotient
        count += 1
    return count


def maximal_vector(A):
    """
    A vector whose local minimal polynomial is the minimal polynomial of A.

    Returns:
        tuple: (vector, minimal polynomial)
    """
    n = A.n
    v = _unit(n, 0)
    _, f = krylov(A, v)
    for j in range(1, n):
        if f.degree == n:
            break
        w = _unit(n, j)
        _, g = krylov(A, w)
        if (f % g).is_zero():
            continue
        v, f = _combine_vector(A, v, f, w, g)
    return v, f


def cyclic_vector(A):
    """Least standard basis vector generating the whole space, else a maximal vector, else None."""
    n = A.n
    for j in range(n):
        e = _unit(n, j)
        if krylov(A, e)[1].degree == n:
            return e
    v, f = maximal_vector(A)
    return v if f.degree == n else None


# =====================================
# Similarity
# =====================================

@dataclass(frozen=True)
class SimilarityWitness:
    """U with U^-1 * B * U = A."""

    U: FFMatrix
    A: FFMatrix
    B: FFMatrix

    def check(self):
        try:
            return self.U.inverse() * self.B * self.U == self.A
        except SingularMatrix:
            return False

    def conjugate(self, X):
        """U * X * U^-1: carries a matrix in A's coordinates back to B's."""
        return self.U * X * self.U.inverse()


def _certified(U, A, B, what):
    witness = SimilarityWitness(U, A, B)
    if not witness.check():
        logger.error("[MATLIN] %s witness failed re-verification", what)
        raise TheoremContradiction(f"{what} produced an invalid similarity witness")
    return witness


@dataclass(frozen=True)
class FrobeniusForm:
    """Invariant factors P_1 | ... | P_s (ascending) with U^-1 * original * U = diag(C_P1, ..., C_Ps)."""

    factors: tuple
    witness: SimilarityWitness

    @property
    def blocks(self):
        return [companion(P) for P in self.factors]

    @property
    def matrix(self):
        return self.witness.A

    @property
    def sizes(self):
        return [P.degree for P in self.factors]


def _invariant_decomposition(A):
    n = A.n
    f = A.field
    v, minimal = maximal_vector(A)
    d = minimal.degree
    span, _ = krylov(A, v)
    if d == n:
        return FFMatrix.from_columns(f, span), [minimal]

    # Functional with phi(A^i v) = delta_{i, d-1}; its A-orbit cuts out a complement.
    K = FFMatrix.from_columns(f, span)
    phi = K.transpose().solve([0] * (d - 1) + [1])
    rows = [phi]
    for _ in range(d - 1):
        rows.append(A.row_apply(rows[-1]))
    complement = FFMatrix(f, rows).nullspace()
    if len(complement) != n - d:
        raise TheoremContradiction("invariant complement has the wrong dimension")

    Bk = FFMatrix.from_columns(f, complement)
    restricted = FFMatrix.from_columns(f, [Bk.solve(A.apply(b)) for b in complement])
    inner_U, inner_factors = _invariant_decomposition(restricted)
    lifted = Bk * inner_U
    return FFMatrix.from_columns(f, lifted.columns() + span), inner_factors + [minimal]


def frobenius_form(A):
    """
    Invariant-factor normal form with block sizes ascending and a verified witness.
    """
    U, factors = _invariant_decomposition(A)
    form = block_diagonal(A.field, [companion(P) for P in factors])
    witness = _certified(U, form, A, "frobenius_form")
    for small, large in zip(factors, factors[1:]):
        if not (large % small).is_zero():
            raise TheoremContradiction("invariant factors do not form a divisibility chain")
    return FrobeniusForm(tuple(factors), witness)


def char_min_poly(A):
    """(characteristic polynomial, minimal polynomial) from the invariant factors."""
    form = frobenius_form(A)
    char = Poly.constant(A.field, 1)
    for P in form.factors:
        char = char * P
    return char, form.factors[-1]


def has_hessenberg_prescription(columns, n):
    """
    Unreduced Hessenberg shape of the first n-1 columns:
    column j has a non-zero entry at row j+1 and zeros below it.
    """
    for j, col in enumerate(columns[:n - 1]):
        if col[j + 1] == 0 or any(col[i] for i in range(j + 2, n)):
            return False
    return True


def is_nonderogatory(A):
    """deg(minimal polynomial) = n, cross-checked against the Hessenberg shortcut."""
    general = maximal_vector(A)[1].degree == A.n
    if has_hessenberg_prescription(A.columns(), A.n) and not general:
        raise TheoremContradiction("unreduced Hessenberg matrix reported derogatory")
    return general


def cyclic_similarity(A, B):
    """
    Witness U with U^-1 * B * U = A for non-derogatory A, B with equal characteristic polynomials.
    """
    if A.n != B.n:
        raise NotSimilar("dimension mismatch")
    va, vb = cyclic_vector(A), cyclic_vector(B)
    if va is None or vb is None:
        raise NotSimilar("cyclic similarity needs non-derogatory matrices")
    Ka, pa = krylov(A, va)
    Kb, pb = krylov(B, vb)
    if pa != pb:
        raise NotSimilar(f"characteristic polynomials differ: {pa!r} vs {pb!r}")
    f = A.field
    U = FFMatrix.from_columns(f, Kb) * FFMatrix.from_columns(f, Ka).inverse()
    return _certified(U, A, B, "cyclic_similarity")


def complete_prescribed_columns(B, columns):
    """
    A = F^-1 * B * F whose first n-1 columns are the prescribed ones.

    Args:
        B: Non-derogatory n x n matrix
        columns: n-1 column vectors with unreduced Hessenberg shape

    Returns:
        tuple: (A, SimilarityWitness with U = F, A, B)
    """
    n = B.n
    f = B.field
    columns = [list(c) for c in columns]
    if len(columns) != n - 1 or not has_hessenberg_prescription(columns, n):
        raise PrescriptionViolation("prescribed columns must be unreduced Hessenberg")

    start = cyclic_vector(B)
    if start is None:
        raise DegenerateBasis("B is derogatory; no completion basis exists")
    basis = [start]
    for j in range(n - 1):
        w = B.apply(basis[j])
        for i in range(j + 1):
            c = columns[j][i]
            if c:
                w = [f.sub(x, f.mul(c, y)) for x, y in zip(w, basis[i])]
        scale = f.inv(columns[j][j + 1])
        basis.append([f.mul(scale, x) for x in w])

    F = FFMatrix.from_columns(f, basis)
    try:
        A = F.inverse() * B * F
    except SingularMatrix:
        raise DegenerateBasis("completion basis is dependent") from None
    if A.columns()[:n - 1] != columns:
        raise TheoremContradiction("completion does not reproduce the prescribed columns")
    return A, SimilarityWitness(F, A, B)
