"""
Tests for the acceptance suite runner and its fault hook.
"""

import pytest

from logic_layer.config import DEFAULT_SEED
from logic_layer.selftest import (
    CHECKS,
    CheckResult,
    all_passed,
    check_block_roots,
    check_divisor_bound,
    check_random_three_powers,
    check_sharp_condition,
    flip_first_entry,
    run_selftest,
)


def test_individual_checks_pass():
    for check in (check_block_roots, check_divisor_bound, check_sharp_condition):
        passed, detail = check(True, DEFAULT_SEED, None, 1)
        assert passed, detail


def test_fault_hook_breaks_certificates():
    passed, detail = check_random_three_powers(True, DEFAULT_SEED, flip_first_entry, 1)
    assert not passed
    assert "0 failures" not in detail


def test_all_passed():
    assert all_passed([CheckResult('a', True, ''), CheckResult('b', True, '')])
    assert not all_passed([CheckResult('a', True, ''), CheckResult('b', False, '')])


def test_quick_subset_is_marked():
    names = [name for name, _, in_quick in CHECKS if in_quick]
    assert "Three squares, all of M_2(F_3)" in names
    assert len(names) < len(CHECKS)


@pytest.mark.slow
def test_quick_run_passes():
    lines = []
    results = run_selftest(quick=True, echo=lines.append)
    assert all_passed(results), [r for r in results if not r.passed]
    assert any("SELF-TEST SUMMARY" in line for line in lines)
