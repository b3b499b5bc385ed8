"""
Matrix Waring Architect - Self-Test Suite

Runs the bundled acceptance checks and prints a scorecard: every construction
on exhaustive or seeded random instances (each certificate re-verified), and
every counting bound on its parameter grid.
"""

import logging
import random
import time
from dataclasses import dataclass, replace

from .census import (
    closure_check,
    cohen_sweep,
    divisor_sweep,
    enumerate_powers,
    kpower_census_sweep,
    orbit_bound_sweep,
    sharp_condition,
    trace_fiber_sweep,
)
from .certificate import verify
from .config import (
    BLOCK_ROOT_MAX_EXPONENT,
    BLOCK_ROOT_SIZES,
    DEFAULT_SEED,
    SELFTEST_BLOCK_SAMPLES,
    SELFTEST_QUICK_SAMPLES,
    SELFTEST_SAMPLES,
    SELFTEST_TWO_POWER_SAMPLES,
)
from .errors import SingularGeometricSum, WaringError
from .fields import field_of_order
from .matlin import FFMatrix, bordered, companion, random_matrix
from .polyring import canonical_extension, find_kpower_irreducible_with_trace
from .waring import block_root, kpower_companion_root, three_powers, two_powers

logger = logging.getLogger(__name__)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def flip_first_entry(certificate):
    """Test hook: corrupt entry (0, 0) of the first root matrix."""
    first = certificate.terms[0]
    changed = first.with_entry(0, 0, first.field.add(first[0, 0], 1))
    return replace(certificate, terms=(changed,) + tuple(certificate.terms[1:]))


# =====================================
# Decomposition Checks
# =====================================

def _certify(A, k, terms, fault):
    certificate = three_powers(A, k) if terms == 3 else two_powers(A, k)
    if fault is not None:
        certificate = fault(certificate)
    ok, reasons = verify(certificate)
    return ok and certificate.r == terms, reasons


def _random_batch(instances, terms, samples, seed, fault):
    failures = []
    checked = 0
    for q, n, k in instances:
        field = field_of_order(q)
        rng = random.Random(f"{seed}-{q}-{n}-{k}")
        for _ in range(samples):
            A = random_matrix(field, n, rng)
            ok, reasons = _certify(A, k, terms, fault)
            checked += 1
            if not ok:
                failures.append(((q, n, k), A.to_lists(), reasons))
    detail = f"{checked} matrices, {len(failures)} failures"
    if failures:
        logger.error("[SELFTEST] first failure: %s", failures[0])
    return not failures, detail


def check_exhaustive_three_squares(quick, seed, fault, workers):
    """Every matrix in M_2(F_3) is a sum of three squares; the power-set oracle agrees."""
    field = field_of_order(3)
    failures = 0
    for code in range(3 ** 4):
        ok, _ = _certify(FFMatrix.decode(field, 2, code), 2, 3, fault)
        failures += not ok
    oracle = closure_check(enumerate_powers(field, 2, 2), 3)
    return failures == 0 and oracle.holds, f"81 matrices, {failures} failures, oracle holds={oracle.holds}"


def check_random_three_powers(quick, seed, fault, workers):
    samples = SELFTEST_QUICK_SAMPLES if quick else SELFTEST_SAMPLES
    return _random_batch([(5, 2, 2), (3, 3, 2), (7, 2, 3), (9, 2, 2)], 3, samples, seed, fault)


def check_binary_odd_cubes(quick, seed, fault, workers):
    samples = SELFTEST_QUICK_SAMPLES if quick else SELFTEST_SAMPLES
    return _random_batch([(2, 5, 3)], 3, samples, seed, fault)


def check_two_powers(quick, seed, fault, workers):
    if quick:
        return _random_batch([(3, 7, 2)], 2, 1, seed, fault)
    return _random_batch([(3, 7, 2), (5, 7, 3), (4, 7, 2)], 2, SELFTEST_TWO_POWER_SAMPLES, seed, fault)


def random_block_instance(field, rng, attempts=100):
    """
    A conforming (D_root, d, t, k, R) on the configured size and exponent grid.

    t is redrawn until the geometric sum in D_root is invertible.
    """
    low, high = BLOCK_ROOT_SIZES
    size = rng.randint(low, high)
    D_root = random_matrix(field, size, rng)
    d = [rng.randrange(field.order) for _ in range(size)]
    k = rng.randint(1, BLOCK_ROOT_MAX_EXPONENT)
    for _ in range(attempts):
        t = rng.randrange(1, field.order)
        try:
            return D_root, d, t, k, block_root(D_root, d, t, k)
        except SingularGeometricSum:
            continue
    return None


def check_block_roots(quick, seed, fault, workers):
    """R^k = [[D^k, d], [0, t^k]] for random conforming (D, d, t, k)."""
    samples = 50 if quick else SELFTEST_BLOCK_SAMPLES
    checked = failures = 0
    for q in (3, 4, 5, 7):
        field = field_of_order(q)
        rng = random.Random(f"{seed}-block-{q}")
        found = 0
        while found < samples:
            instance = random_block_instance(field, rng)
            if instance is None:
                continue
            D_root, d, t, k, R = instance
            found += 1
            checked += 1
            if R ** k != bordered(D_root ** k, d, field.pow(t, k)):
                failures += 1
    return failures == 0, f"{checked} conforming instances, {failures} failures"


# =====================================
# Counting Checks
# =====================================

def _grid_verdict(rows):
    failures = [row for row in rows if not row['holds']]
    return not failures, f"{len(rows)} grid points, {len(failures)} failures"


def check_kpower_companions(quick, seed, fault, workers):
    return _grid_verdict(kpower_census_sweep(max_qn=256 if quick else 4096, workers=workers))


def check_orbit_bound(quick, seed, fault, workers):
    return _grid_verdict(orbit_bound_sweep(max_qn=4096 if quick else 65536, workers=workers))


def check_trace_fibers(quick, seed, fault, workers):
    return _grid_verdict(trace_fiber_sweep(max_qn=1024 if quick else 65536, workers=workers))


def check_divisor_bound(quick, seed, fault, workers):
    report = divisor_sweep(10 ** 4 if quick else 10 ** 6)
    return report['holds'], (f"m <= {report['limit']}, worst ratio {report['worst_ratio']:.4f} "
                             f"at m = {report['worst_m']}")


def check_kpower_traces(quick, seed, fault, workers):
    """A k-power irreducible of degree 7 for every trace, each companion a verified k-th power."""
    pairs = [(3, 2)] if quick else [(3, 2), (5, 2), (5, 3), (7, 2)]
    found = failures = 0
    for q, k in pairs:
        field = field_of_order(q)
        top = canonical_extension(field, 7)
        for t in range(q):
            try:
                witness = find_kpower_irreducible_with_trace(top, k, t)
                E = kpower_companion_root(witness)
            except WaringError as e:
                logger.error("[SELFTEST] k-power trace search failed for q=%d k=%d t=%d: %s", q, k, t, e)
                failures += 1
                continue
            found += 1
            if E ** k != companion(witness.P):
                failures += 1
    return failures == 0, f"{found} polynomials, {failures} failures"


def check_cohen(quick, seed, fault, workers):
    return _grid_verdict(cohen_sweep(max_qn=256 if quick else 4096, workers=workers))


def check_sharp_condition(quick, seed, fault, workers):
    """The final inequality fails at n = 7 and holds for 8 <= n <= 16."""
    wrong = []
    for q in range(2, 10):
        if sharp_condition(q, 7)['final_holds']:
            wrong.append((q, 7))
        wrong.extend((q, n) for n in range(8, 17) if not sharp_condition(q, n)['final_holds'])
    return not wrong, f"q in 2..9, n in 7..16, {len(wrong)} unexpected verdicts"


# =====================================
# Suite
# =====================================

CHECKS = [
    ("Three squares, all of M_2(F_3)", check_exhaustive_three_squares, True),
    ("Three k-th powers, random instances", check_random_three_powers, True),
    ("Three odd powers over F_2", check_binary_odd_cubes, True),
    ("Two k-th powers, n = 7", check_two_powers, True),
    ("Block root solve", check_block_roots, True),
    ("k-power companions of primitive elements", check_kpower_companions, True),
    ("Orbit-distinct count bound", check_orbit_bound, False),
    ("Trace fiber bound", check_trace_fibers, False),
    ("Divisor bound", check_divisor_bound, True),
    ("k-power irreducibles with every trace", check_kpower_traces, False),
    ("Primitive polynomials with prescribed trace", check_cohen, True),
    ("Sufficient inequality threshold", check_sharp_condition, True),
]


def run_selftest(quick=False, seed=DEFAULT_SEED, fault=None, workers=1, echo=print):
    """
    Run the acceptance suite and print a scorecard.

    Args:
        quick: Only the fast subset, with reduced samples and grids
        seed: Seed for every random batch
        fault: Optional certificate -> certificate hook applied before verification
        workers: Process pool size for the grid sweeps
        echo: Output function (print by default)

    Returns:
        list: CheckResult per executed check
    """
    echo("\n" + "=" * 60)
    echo("RUNNING SELF-TEST SUITE" + (" (quick)" if quick else ""))
    echo("=" * 60)

    results = []
    for name, check, in_quick in CHECKS:
        if quick and not in_quick:
            continue
        start = time.perf_counter()
        try:
            passed, detail = check(quick, seed, fault, workers)
        except WaringError as e:
            logger.error("[SELFTEST] %s raised %s: %s", name, type(e).__name__, e)
            passed, detail = False, f"{type(e).__name__}: {e}"
        result = CheckResult(name, passed, detail, time.perf_counter() - start)
        results.append(result)
        mark = "✅" if passed else "❌"
        echo(f"{mark} {name} ({result.seconds:.1f}s)")
        echo(f"   {detail}")

    passed_count = sum(r.passed for r in results)
    echo(f"\n{'=' * 60}")
    echo("SELF-TEST SUMMARY")
    echo(f"{'=' * 60}")
    echo(f"Checks run: {len(results)}")
    echo(f"Passed: {passed_count}/{len(results)}")
    echo(f"Total time: {sum(r.seconds for r in results):.1f}s")
    return results


def all_passed(results):
    return all(r.passed for r in results)
