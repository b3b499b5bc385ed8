"""
Tests for the census oracles: power-set enumeration, sumset closure and the
counting bounds on small grids.
"""

import pytest

from logic_layer import census
from logic_layer.census import (
    closure_check,
    cohen_check,
    divisor_bound_check,
    divisor_count,
    divisor_sweep,
    enumerate_powers,
    find_power_sum,
    kpower_companion_census,
    orbit_distinct_count,
    powers_summary,
    run_grid,
    sharp_condition,
    trace_fiber_counts,
)
from logic_layer.errors import BudgetExceeded, PreconditionViolated
from logic_layer.fields import field_of_order, prime_field
from logic_layer.matlin import FFMatrix

F2 = prime_field(2)
F3 = prime_field(3)
F7 = prime_field(7)


# =====================================
# Power Sets & Closure
# =====================================

def test_scalar_squares():
    S = enumerate_powers(F3, 1, 2)
    assert list(S.members) == [0, 1]
    assert S.root_of(1) == 1
    assert S.root_of(2) is None


def test_power_set_members_have_roots():
    S = enumerate_powers(F3, 2, 2)
    assert 0 in S
    assert FFMatrix.identity(F3, 2).encoding() in S
    for code in S.members[:20]:
        root = S.matrix(S.root_of(int(code)))
        assert (root ** 2).encoding() == int(code)


def test_three_squares_cover_m2_f3():
    report = closure_check(enumerate_powers(F3, 2, 2), 3)
    assert report.holds
    assert report.covered == report.total == 81
    assert report.counterexample is None


def test_two_cubes_miss_in_f7():
    report = closure_check(enumerate_powers(F7, 1, 3), 2)
    assert not report.holds
    assert report.covered == 5
    assert report.counterexample == FFMatrix(F7, [[3]])


def test_find_power_sum():
    S = enumerate_powers(F7, 1, 3)
    assert find_power_sum(S, FFMatrix(F7, [[2]]), 2) == (1, 1)
    assert find_power_sum(S, FFMatrix(F7, [[3]]), 2) is None
    assert find_power_sum(S, FFMatrix(F7, [[3]]), 3) is not None


def test_enumeration_budget(monkeypatch):
    monkeypatch.setattr(census, 'ENUMERATION_BUDGET', 100)
    with pytest.raises(BudgetExceeded):
        enumerate_powers(F3, 3, 2)


def test_enumeration_budget_argument():
    with pytest.raises(BudgetExceeded):
        enumerate_powers(F3, 3, 2, budget=100)
    assert len(enumerate_powers(F7, 1, 3, budget=7)) == 3
    assert census.ENUMERATION_BUDGET > 100


def test_powers_summary():
    row = powers_summary(F2, 2, 2)
    assert row['contains_zero'] and row['contains_identity']
    assert row['total'] == 16
    assert 0 < row['size'] < 16


# =====================================
# Counting Bounds
# =====================================

def test_orbit_distinct_small():
    report = orbit_distinct_count(F2, 2)
    assert report.exact == 2
    assert report.bound == pytest.approx(1.0)
    assert report.holds
    assert orbit_distinct_count(F3, 3).exact == 24


def test_trace_fibers_are_uniform_for_k_one():
    reports = trace_fiber_counts(F3, 2, 1)
    assert [r.exact for r in reports] == [3, 3, 3]
    assert all(r.vacuous and r.holds for r in reports)
    with pytest.raises(PreconditionViolated):
        trace_fiber_counts(F3, 2, 3)


@pytest.mark.parametrize("q, n", [(5, 4), (7, 4), (4, 5)])
def test_trace_fibers_sum_to_field_size(q, n):
    field = field_of_order(q)
    reports = trace_fiber_counts(field, n, 2 if q % 2 else 3)
    assert sum(r.exact for r in reports) == q ** n


def test_divisor_bound():
    assert divisor_count(12) == 6
    assert divisor_count(1) == 1
    assert divisor_bound_check(720720).holds
    report = divisor_sweep(10 ** 4)
    assert report['holds']
    assert report['worst_m'] == 2520


def test_sharp_condition_threshold():
    for q in range(2, 10):
        assert not sharp_condition(q, 7)['final_holds']
        assert sharp_condition(q, 8)['final_holds']


def test_sharp_condition_readings():
    report = sharp_condition(3, 10, k=2)
    assert report['printed_holds'] is not None
    assert report['readings_agree'] == (report['printed_holds'] == report['floor_holds'])


def test_cohen_exception():
    rows = cohen_check(F2, 2)
    assert [(row['t'], row['exists']) for row in rows] == [(0, False), (1, True)]
    assert all(row['holds'] for row in rows)


def test_kpower_companion_census():
    row = kpower_companion_census(F2, 3)
    assert row['exponents'] == 3
    assert row['holds']
    assert row['primitive_count'] == 6


def test_run_grid_keeps_order():
    assert run_grid(pow, [(2, 3), (3, 2)]) == [8, 9]


@pytest.mark.parametrize("q", [3, 4, 5])
def test_trace_zero_is_never_primitive_in_degree_two(q):
    rows = cohen_check(field_of_order(q), 2)
    assert not rows[0]['exists'] and not rows[0]['expected']
    assert all(row['exists'] for row in rows[1:])


def test_degree_one_primitive_needs_a_generator():
    rows = cohen_check(F7, 1)
    assert [row['t'] for row in rows if row['exists']] == [3, 5]
    assert all(row['holds'] for row in rows)
