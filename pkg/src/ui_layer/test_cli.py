"""
End-to-end tests of the command line: every subcommand through main(argv),
checking exit codes and written files.
"""

import json

import pytest

from logic_layer import census
from logic_layer.config import ENUMERATION_BUDGET
from ui_layer.cli import JobConfig, build_parser, main


def run(*argv):
    return main([str(a) for a in argv])


# =====================================
# Configuration
# =====================================

def test_job_config_from_args():
    args = build_parser().parse_args(['decompose', '--field', '5', '--k', '2', '--random', '3', '--n', '2'])
    config = JobConfig.from_args(args)
    assert config.command == 'decompose'
    assert config.field == '5' and config.k == 2 and config.random == 3
    assert JobConfig.from_dict({**config.to_dict(), 'unknown': 1}) == config


def test_usage_error_exits_two():
    with pytest.raises(SystemExit) as info:
        run('decompose', '--field', '5')
    assert info.value.code == 2


# =====================================
# decompose / verify
# =====================================

def test_decompose_random_then_verify(tmp_path, capsys):
    out = tmp_path / "certs.json"
    assert run('decompose', '--field', 5, '--k', 2, '--random', 3, '--n', 2, '--out', out) == 0
    certificates = json.loads(out.read_text())
    assert len(certificates) == 3
    assert all(len(c['terms']) == 3 for c in certificates)
    assert run('verify', out) == 0
    assert "[2] valid" in capsys.readouterr().out


def test_verify_rejects_tampering(tmp_path):
    out = tmp_path / "cert.json"
    assert run('decompose', '--field', 5, '--k', 2, '--random', 1, '--n', 2, '--out', out) == 0
    data = json.loads(out.read_text())
    data['target'][0][0] = (data['target'][0][0] + 1) % 5
    out.write_text(json.dumps(data))
    assert run('verify', out) == 1


def test_decompose_from_input_file(tmp_path):
    source = tmp_path / "a.txt"
    source.write_text("3 1 2\n1 2\n0 1\n")
    out = tmp_path / "cert.json"
    assert run('decompose', '--input', source, '--k', 2, '--terms', 3, '--out', out) == 0
    assert json.loads(out.read_text())['field'] == {'p': 3, 'm': 1, 'modulus': [0, 1]}


def test_field_mismatch_with_header(tmp_path):
    source = tmp_path / "a.txt"
    source.write_text("3 1 1\n2\n")
    assert run('decompose', '--input', source, '--field', 5, '--k', 2, '--out', tmp_path / "c.json") == 2


def test_precondition_exits_two(tmp_path):
    assert run('decompose', '--field', 3, '--k', 3, '--random', 1, '--n', 2, '--out', tmp_path / "c.json") == 2


def test_missing_input(tmp_path):
    assert run('decompose', '--k', 2, '--out', tmp_path / "c.json") == 2
    assert run('verify', tmp_path / "absent.json") == 2


# =====================================
# search / census
# =====================================

def test_search_prints_polynomial(tmp_path, capsys):
    out = tmp_path / "p.json"
    assert run('search', '--field', 3, '--n', 2, '--trace', 1, '--out', out) == 0
    assert "Poly(X^2 + 2*X + 2)" in capsys.readouterr().out
    assert json.loads(out.read_text())['P'] == [2, 2, 1]


def test_search_cohen_exception():
    assert run('search', '--field', 2, '--n', 2, '--trace', 0, '--primitive') == 2


def test_census_sharp_threshold(tmp_path):
    base = tmp_path / "sharp"
    assert run('census', 'sharp', '--orders', '2,3', '--n', '7..8', '--out', base) == 0
    rows = json.loads((tmp_path / "sharp.json").read_text())
    assert [(row['q'], row['n'], row['holds']) for row in rows] == [
        (2, 7, True), (2, 8, True), (3, 7, True), (3, 8, True)]
    assert (tmp_path / "sharp.csv").exists()


def test_census_finding_exits_four(capsys):
    assert run('census', 'closure', '--field', 7, '--n', 1, '--k', 3, '--terms', 2) == 4
    assert "1 failures" in capsys.readouterr().out


def test_census_cohen_small_grid():
    assert run('census', 'cohen', '--orders', '2,3', '--max-qn', 27) == 0


def test_census_sharp_accepts_q_alias():
    assert run('census', 'sharp', '--q', '3', '--n', '7..10') == 0


def test_census_closure_writes_counterexample(tmp_path, capsys):
    base = tmp_path / "closure"
    assert run('census', 'closure', '--field', 7, '--n', 1, '--k', 3, '--terms', 2, '--out', base) == 4
    assert "7 1 1\n3\n" in capsys.readouterr().out
    record = json.loads((tmp_path / "closure.counterexample.json").read_text())
    assert record == {'p': 7, 'm': 1, 'n': 1, 'rows': [[3]], 'modulus': [0, 1]}


def test_budget_flag_is_scoped_to_the_call(tmp_path):
    source = tmp_path / "a.txt"
    source.write_text("7 1 1\n2\n")
    out = tmp_path / "c.json"
    argv = ['decompose', '--input', source, '--k', 3, '--terms', 2, '--allow-fallback', '--out', out]
    assert run(*argv, '--budget', 1) == 2
    assert census.ENUMERATION_BUDGET == ENUMERATION_BUDGET
    assert run(*argv) == 0
    assert json.loads(out.read_text())['method'] == 'exhaustive_fallback'
