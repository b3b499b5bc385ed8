"""
Matrix Waring Architect - Census Module

Exhaustive desk-scale oracles: the set of k-th powers in M_n(F_q), r-fold sumset
closure, and exact counts checked against the counting bounds used by the
constructions (orbit-distinct elements, trace fibers of k-th powers, the divisor
bound, the sufficient inequality for k-power irreducibles, primitive polynomials
with prescribed trace).

Matrices are packed as base-q integers (row-major, entry (0, 0) least
significant) and kept in sorted numpy arrays.
"""

import logging
from dataclasses import dataclass, field as dataclass_field
from functools import lru_cache
from math import gcd
from multiprocessing import Pool

import numpy as np

from .config import (
    COUNT_LIMIT,
    DIVISOR_CONSTANT,
    ENUMERATION_BUDGET,
    ENUMERATION_CHUNK,
    GUARD_BAND,
    ORBIT_CONSTANT,
    SUMSET_BUDGET,
)
from .errors import BudgetExceeded, NoSuchPolynomial, PreconditionViolated
from .fields import FFElement, factor_group_order, field_of_order
from .matlin import FFMatrix
from .polyring import canonical_extension, field_trace, find_irreducible_with_trace, is_cohen_exception

logger = logging.getLogger(__name__)

DEFAULT_ORDERS = [2, 3, 4, 5, 7, 8, 9]


# =====================================
# Reports
# =====================================

@dataclass
class BoundReport:
    """An exact count next to the bound it is checked against."""

    name: str
    params: dict
    exact: float
    bound: float
    holds: bool
    vacuous: bool = False
    extra: dict = dataclass_field(default_factory=dict)

    def to_row(self):
        row = {'check': self.name}
        row.update(self.params)
        row.update({'exact': self.exact, 'bound': self.bound, 'holds': self.holds, 'vacuous': self.vacuous})
        row.update(self.extra)
        return row


def divisor_count(m):
    """d(m) through the budgeted factorization."""
    total = 1
    for exponent in factor_group_order(m).values():
        total *= exponent + 1
    return total


# =====================================
# Numpy Tables
# =====================================

@lru_cache(maxsize=None)
def _tables(field):
    q = field.order
    if q > 4096:
        raise BudgetExceeded(f"operation tables for GF({q}) are too large")
    elements = range(q)
    add = np.array([[field.add(a, b) for b in elements] for a in elements], dtype=np.int64)
    sub = np.array([[field.sub(a, b) for b in elements] for a in elements], dtype=np.int64)
    mul = np.array([[field.mul(a, b) for b in elements] for a in elements], dtype=np.int64)
    return add, sub, mul


def _weights(q, n):
    return q ** np.arange(n * n, dtype=np.int64)


def _decode(codes, q, n):
    codes = np.asarray(codes, dtype=np.int64)
    return (codes[:, None] // _weights(q, n)[None, :]) % q


def _batch_matmul(X, Y, add, mul):
    n = X.shape[1]
    acc = mul[X[:, :, 0][:, :, None], Y[:, 0, :][:, None, :]]
    for l in range(1, n):
        acc = add[acc, mul[X[:, :, l][:, :, None], Y[:, l, :][:, None, :]]]
    return acc


def _batch_power(X, k, add, mul):
    n = X.shape[1]
    result = np.broadcast_to(np.eye(n, dtype=np.int64), X.shape).copy()
    base = X
    while k:
        if k & 1:
            result = _batch_matmul(result, base, add, mul)
        k >>= 1
        if k:
            base = _batch_matmul(base, base, add, mul)
    return result


def _element_table(field, function):
    """function(x) for every element, as a numpy array."""
    return np.array([function(x) for x in range(field.order)], dtype=np.int64)


def _power_table(field, k):
    if getattr(field, 'tabulated', False):
        exp = np.array(field.exp_table(), dtype=np.int64)
        log = np.array(field.log_table(), dtype=np.int64)
        table = exp[(log * k) % (field.order - 1)]
        table[0] = 0 if k else 1
        return table
    return _element_table(field, lambda x: field.pow(x, k))


@lru_cache(maxsize=None)
def _frobenius_table(top, q):
    return _power_table(top, q)


@lru_cache(maxsize=None)
def _trace_table(field, n):
    """Tr_{F_q^n / F_q}(y) for every y, by linearity over the polynomial basis."""
    if n == 1:
        return np.arange(field.order, dtype=np.int64)
    top = canonical_extension(field, n)
    q = field.order
    add, _, mul = _tables(field)
    basis_traces = [field_trace(FFElement(top, q ** i), field).index for i in range(n)]
    values = np.arange(top.order, dtype=np.int64)
    acc = np.zeros(top.order, dtype=np.int64)
    for i, tau in enumerate(basis_traces):
        acc = add[acc, mul[(values // q ** i) % q, tau]]
    return acc


def _orbit_periods(phi, n):
    a = np.arange(len(phi), dtype=np.int64)
    x = phi.copy()
    period = np.zeros(len(phi), dtype=np.int64)
    for u in range(1, n + 1):
        hit = (x == a) & (period == 0)
        period[hit] = u
        x = phi[x]
    return period


def _check_count_budget(Q):
    if Q > COUNT_LIMIT:
        raise BudgetExceeded(f"exhaustive count over {Q} elements exceeds the budget {COUNT_LIMIT}")


# =====================================
# k-th Power Sets
# =====================================

@dataclass(frozen=True, eq=False)
class PowerSet:
    """All X^k for X in M_n(F_q): sorted packed codes with the least root of each."""

    field: object
    n: int
    k: int
    members: np.ndarray
    roots: np.ndarray

    def __len__(self):
        return len(self.members)

    def contains(self, codes):
        codes = np.asarray(codes, dtype=np.int64)
        if not len(self.members):
            return np.zeros(codes.shape, dtype=bool)
        pos = np.searchsorted(self.members, codes)
        pos = np.minimum(pos, len(self.members) - 1)
        return self.members[pos] == codes

    def __contains__(self, code):
        return bool(self.contains(np.array([code]))[0])

    def root_of(self, code):
        pos = int(np.searchsorted(self.members, code))
        if pos < len(self.members) and self.members[pos] == code:
            return int(self.roots[pos])
        return None

    def digits(self):
        return _decode(self.members, self.field.order, self.n)

    def matrix(self, code):
        return FFMatrix.decode(self.field, self.n, int(code))


def enumerate_powers(field, n, k, budget=None):
    """
    Every k-th power in M_n(F_q) by exhaustive batched powering.

    Args:
        budget: Largest q^(n^2) to enumerate (default: ENUMERATION_BUDGET)

    Raises:
        BudgetExceeded: q^(n^2) above the enumeration budget
    """
    if budget is None:
        budget = ENUMERATION_BUDGET
    q = field.order
    total = q ** (n * n)
    if total > budget:
        raise BudgetExceeded(f"q^(n^2) = {total} exceeds the enumeration budget {budget}")
    if k < 1:
        raise PreconditionViolated(f"exponent must be positive, got {k}")

    if n == 1:
        powers = _element_table(field, lambda x: field.pow(x, k))
        members, first = np.unique(powers, return_index=True)
        return PowerSet(field, n, k, members, first.astype(np.int64))

    add, _, mul = _tables(field)
    weights = _weights(q, n)
    chunk_codes, chunk_roots = [], []
    for start in range(0, total, ENUMERATION_CHUNK):
        index = np.arange(start, min(total, start + ENUMERATION_CHUNK), dtype=np.int64)
        X = _decode(index, q, n).reshape(-1, n, n)
        powers = _batch_power(X, k, add, mul).reshape(len(index), -1) @ weights
        unique, first = np.unique(powers, return_index=True)
        chunk_codes.append(unique)
        chunk_roots.append(index[first])
    codes = np.concatenate(chunk_codes)
    roots = np.concatenate(chunk_roots)
    members, first = np.unique(codes, return_index=True)
    logger.debug("[CENSUS] %d distinct %d-th powers in M_%d(GF(%d))", len(members), k, n, q)
    return PowerSet(field, n, k, members, roots[first])


@dataclass
class ClosureReport:
    holds: bool
    covered: int
    total: int
    counterexample: object = None


def closure_check(S, r):
    """
    True iff every matrix of M_n(F_q) is a sum of r members of S.

    Returns:
        ClosureReport: verdict, coverage and the least uncovered matrix
    """
    q, n = S.field.order, S.n
    total = q ** (n * n)
    if r < 1:
        raise PreconditionViolated(f"number of terms must be positive, got {r}")
    weights = _weights(q, n)
    cover = np.zeros(total, dtype=bool)
    cover[S.members] = True
    member_digits = S.digits()
    if r > 1 and n > 1:
        add = _tables(S.field)[0]
    for _ in range(r - 1):
        current = np.flatnonzero(cover)
        if len(current) * len(S) > SUMSET_BUDGET:
            raise BudgetExceeded(f"sumset of {len(current)} x {len(S)} exceeds the budget {SUMSET_BUDGET}")
        if n == 1:
            sums = np.array([[S.field.add(int(a), int(b)) for b in S.members] for a in current], dtype=np.int64)
            grown = np.zeros(total, dtype=bool)
            grown[sums.ravel()] = True
        else:
            current_digits = _decode(current, q, n)
            grown = np.zeros(total, dtype=bool)
            for s in member_digits:
                grown[add[current_digits, s[None, :]] @ weights] = True
        cover = grown

    missing = np.flatnonzero(~cover)
    counterexample = S.matrix(missing[0]) if len(missing) else None
    return ClosureReport(not len(missing), int(cover.sum()), total, counterexample)


def find_power_sum(S, target, r):
    """
    Least-encoding (s_1, ..., s_r) of members summing to the target, or None.

    Args:
        S: PowerSet
        target: FFMatrix
        r: Number of terms (1, 2 or 3)
    """
    q, n = S.field.order, S.n
    sub = _tables(S.field)[1]
    weights = _weights(q, n)
    member_digits = S.digits()

    def search(digits, terms):
        code = int(digits @ weights)
        if terms == 1:
            return (code,) if code in S else None
        if terms == 2:
            rest = sub[digits[None, :], member_digits] @ weights
            hits = np.flatnonzero(S.contains(rest))
            if not len(hits):
                return None
            i = hits[0]
            return int(S.members[i]), int(rest[i])
        for i, s in enumerate(member_digits):
            found = search(sub[digits, s], terms - 1)
            if found is not None:
                return (int(S.members[i]),) + found
        return None

    if target.field != S.field or target.n != n:
        raise PreconditionViolated("target does not match the power set")
    target_digits = _decode(np.array([target.encoding()]), q, n)[0]
    return search(target_digits, r)


# =====================================
# Counting Bounds
# =====================================

def orbit_distinct_count(field, n):
    """
    N = #{a in F_q^n : a, phi(a), ..., phi^(n-1)(a) pairwise distinct} against its lower bounds.
    """
    q = field.order
    Q = q ** n
    _check_count_budget(Q)
    top = canonical_extension(field, n)
    periods = _orbit_periods(_frobenius_table(top, q), n)
    N = int((periods == n).sum())

    d = divisor_count(Q - 1) if Q > 1 else 1
    bound = Q - d / 2 * q ** (n / 2) - 1
    alternate = Q - ORBIT_CONSTANT * q ** (5 * n / 6) - 1
    return BoundReport(
        'orbit_distinct', {'q': q, 'n': n}, N, bound, N >= bound - GUARD_BAND,
        extra={'alternate_bound': alternate, 'alternate_holds': N > alternate - GUARD_BAND},
    )


def trace_fiber_bound(q, n):
    return q ** (n - 1) + q ** (n // 2 + 2) - q ** (n // 2 + 3)


def trace_fiber_counts(field, n, k):
    """
    N_t = #{x : Tr(x^k) = t} for every t at once, each against the lower bound.

    Returns:
        list: BoundReport per t, ascending
    """
    q = field.order
    if gcd(k, q) != 1 or not 1 <= k < q:
        raise PreconditionViolated(f"trace fiber bound needs gcd(k, q) = 1 and k < q (q={q}, k={k})")
    _check_count_budget(q ** n)
    top = canonical_extension(field, n)
    counts = np.bincount(_trace_table(field, n)[_power_table(top, k)], minlength=q)
    bound = trace_fiber_bound(q, n)
    vacuous = bound <= 0
    return [
        BoundReport('trace_fiber', {'q': q, 'n': n, 'k': k, 't': t}, int(counts[t]), bound,
                    vacuous or int(counts[t]) >= bound, vacuous)
        for t in range(q)
    ]


def trace_fiber_count(field, n, k, t):
    t = t.index if isinstance(t, FFElement) else t
    return trace_fiber_counts(field, n, k)[t]


def divisor_bound_check(m):
    """d(m) <= 3.53 * m^(1/3)."""
    d = divisor_count(m)
    bound = DIVISOR_CONSTANT * m ** (1 / 3)
    return BoundReport('divisor', {'m': m}, d, bound, d <= bound + GUARD_BAND)


def divisor_sweep(limit):
    """
    d(m) for every m <= limit by a sieve, against 3.53 * m^(1/3).

    Returns:
        dict: limit, failures (list of m), worst ratio and where it occurs
    """
    counts = np.zeros(limit + 1, dtype=np.int64)
    for i in range(1, limit + 1):
        counts[i::i] += 1
    m = np.arange(1, limit + 1, dtype=np.float64)
    ratio = counts[1:] / np.cbrt(m)
    failures = (np.flatnonzero(ratio > DIVISOR_CONSTANT + GUARD_BAND) + 1).tolist()
    worst = int(np.argmax(ratio)) + 1
    return {'limit': limit, 'failures': failures, 'worst_ratio': float(ratio[worst - 1]),
            'worst_m': worst, 'holds': not failures}


def sharp_condition(q, n, k=1):
    """
    The sufficient inequality for k-power irreducibles with any trace, in each reading.

    final:   q^(5n/6-2) + q^(n/6+1) - q^(n/3+2) > 1.77 + q^(-n/6)
    printed: (q^(n-1) + q^(n/3+2) - q^(n/2+3)) / k > d(q^n-1)/2 * q^(n/2) + 1
    floor:   the same with exponents floor(n/2)+2 and floor(n/2)+3
    """
    final_lhs = q ** (5 * n / 6 - 2) + q ** (n / 6 + 1) - q ** (n / 3 + 2)
    final_rhs = ORBIT_CONSTANT + q ** (-n / 6)
    report = {
        'q': q, 'n': n, 'k': k,
        'final_lhs': final_lhs, 'final_rhs': final_rhs,
        'final_holds': final_lhs > final_rhs + GUARD_BAND,
    }
    try:
        d = divisor_count(q ** n - 1)
    except BudgetExceeded:
        d = None
    if d is None:
        report.update({'printed_holds': None, 'floor_holds': None, 'readings_agree': None})
        return report

    rhs = d / 2 * q ** (n / 2) + 1
    printed = (q ** (n - 1) + q ** (n / 3 + 2) - q ** (n / 2 + 3)) / k
    floored = (q ** (n - 1) + q ** (n // 2 + 2) - q ** (n // 2 + 3)) / k
    report.update({
        'sharp_rhs': rhs,
        'printed_lhs': printed, 'printed_holds': printed > rhs + GUARD_BAND,
        'floor_lhs': floored, 'floor_holds': floored > rhs + GUARD_BAND,
    })
    report['readings_agree'] = report['printed_holds'] == report['floor_holds']
    return report


def cohen_check(field, n):
    """
    For every t, does a primitive polynomial of degree n with trace t exist?

    Returns:
        list: dict rows (q, n, t, exists, expected, holds), ascending t
    """
    q = field.order
    _check_count_budget(q ** n)
    rows = []
    for t in range(q):
        try:
            find_irreducible_with_trace(field, n, t, require_primitive=True, enforce_exceptions=False)
            exists = True
        except NoSuchPolynomial:
            exists = False
        if n == 1:
            # X - t is primitive iff t generates the multiplicative group
            expected = field.is_primitive_element(t)
        else:
            expected = not is_cohen_exception(q, n, t)
        rows.append({'check': 'cohen', 'q': q, 'n': n, 't': t, 'exists': exists,
                     'expected': expected, 'holds': exists == expected})
    return rows


def kpower_companion_census(field, n, exhaustive=None):
    """
    For every primitive b of F_q^n and every k < q^(n/2) + 1, the orbit of b^k has length n.

    The arithmetic test: the orbit is short iff (Q - 1) | k(q^u - 1) for a proper
    divisor u of n. With exhaustive (default for Q <= 4096) every primitive b is
    also powered and its orbit walked.
    """
    q = field.order
    Q = q ** n
    _check_count_budget(Q)
    group = Q - 1
    exponents = [k for k in range(1, Q + 1) if (k - 1) ** 2 < Q]
    proper = [u for u in range(1, n) if n % u == 0]
    arithmetic_failures = [k for k in exponents if any(k * (q ** u - 1) % group == 0 for u in proper)]

    if exhaustive is None:
        exhaustive = Q <= 4096
    walked_failures = []
    primitive_count = None
    if exhaustive and n > 1:
        top = canonical_extension(field, n)
        phi = _frobenius_table(top, q)
        log = np.array(top.log_table(), dtype=np.int64)
        exp = np.array(top.exp_table(), dtype=np.int64)
        logs = log[1:]
        primitive = np.flatnonzero(np.gcd(logs, group) == 1) + 1
        primitive_count = len(primitive)
        for k in exponents:
            powered = exp[(log[primitive] * k) % group]
            x = powered.copy()
            short = np.zeros(len(primitive), dtype=bool)
            for _ in range(n - 1):
                x = phi[x]
                short |= x == powered
            if short.any():
                walked_failures.append((k, int(primitive[np.argmax(short)])))

    return {
        'check': 'kpower_companion', 'q': q, 'n': n, 'exponents': len(exponents),
        'primitive_count': primitive_count, 'arithmetic_failures': arithmetic_failures,
        'walked_failures': walked_failures,
        'holds': not arithmetic_failures and not walked_failures,
    }


# =====================================
# Parameter Grids
# =====================================

def _grid_points(orders, max_qn, min_n=1):
    for q in orders:
        n = min_n
        while q ** n <= max_qn:
            yield q, n
            n += 1


def _orbit_row(q, n):
    return orbit_distinct_count(field_of_order(q), n).to_row()


def _trace_rows(q, n):
    field = field_of_order(q)
    rows = []
    for k in range(1, q):
        if gcd(k, q) == 1:
            rows.extend(report.to_row() for report in trace_fiber_counts(field, n, k))
    return rows


def _cohen_rows(q, n):
    return cohen_check(field_of_order(q), n)


def _kpower_row(q, n):
    row = kpower_companion_census(field_of_order(q), n)
    row['arithmetic_failures'] = len(row['arithmetic_failures'])
    row['walked_failures'] = len(row['walked_failures'])
    return row


def _divisor_row(q, n):
    return divisor_bound_check(q ** n - 1).to_row()


def run_grid(function, points, workers=1):
    """Map a module-level function over parameter tuples, in order, optionally on a process pool."""
    points = list(points)
    if workers and workers > 1 and len(points) > 1:
        with Pool(workers) as pool:
            return pool.starmap(function, points)
    return [function(*point) for point in points]


def orbit_bound_sweep(orders=None, max_qn=COUNT_LIMIT, workers=1):
    return run_grid(_orbit_row, _grid_points(orders or DEFAULT_ORDERS, max_qn), workers)


def trace_fiber_sweep(orders=None, max_qn=COUNT_LIMIT, workers=1):
    nested = run_grid(_trace_rows, _grid_points(orders or DEFAULT_ORDERS, max_qn, min_n=2), workers)
    return [row for rows in nested for row in rows]


def divisor_grid_sweep(orders=None, max_qn=COUNT_LIMIT, workers=1):
    points = [(q, n) for q, n in _grid_points(orders or DEFAULT_ORDERS, max_qn) if q ** n > 1]
    return run_grid(_divisor_row, points, workers)


def cohen_sweep(orders=None, max_qn=4096, workers=1):
    nested = run_grid(_cohen_rows, _grid_points(orders or DEFAULT_ORDERS, max_qn), workers)
    return [row for rows in nested for row in rows]


def kpower_census_sweep(orders=None, max_qn=4096, workers=1):
    return run_grid(_kpower_row, _grid_points(orders or DEFAULT_ORDERS, max_qn), workers)


def sharp_sweep(orders, dimensions, k=1):
    rows = []
    for q in orders:
        for n in dimensions:
            rows.append(sharp_condition(q, n, k))
    return rows


def powers_summary(field, n, k, budget=None):
    """One report row describing the k-th power set of M_n(F_q)."""
    S = enumerate_powers(field, n, k, budget)
    return {'check': 'powers', 'q': field.order, 'n': n, 'k': k, 'size': len(S),
            'total': field.order ** (n * n), 'contains_zero': 0 in S,
            'contains_identity': FFMatrix.identity(field, n).encoding() in S,
            'holds': True}


def closure_summary(field, n, k, r, budget=None):
    report = closure_check(enumerate_powers(field, n, k, budget), r)
    return {'check': 'closure', 'q': field.order, 'n': n, 'k': k, 'r': r,
            'covered': report.covered, 'total': report.total, 'holds': report.holds,
            'counterexample': None if report.counterexample is None else report.counterexample.to_lists()}
