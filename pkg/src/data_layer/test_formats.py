"""
Tests for the text / JSON formats and the atomic file store.
"""

import json

import pytest

from data_layer.formats import (
    FormatError,
    matrix_from_json,
    parse_coefficients,
    parse_field_spec,
    parse_matrix_text,
    parse_range,
    render_field_spec,
    render_matrix_text,
)
from data_layer.store import load_json, load_matrices, write_json, write_report

MATRIX_FILE = """\
# two matrices
3 1 2
1 2
0 1

2 2 1
3
"""


# =====================================
# Parsers
# =====================================

@pytest.mark.parametrize("text, expected", [("3", (3, 1)), ("2^4", (2, 4)), (" 5 ", (5, 1))])
def test_parse_field_spec(text, expected):
    assert parse_field_spec(text) == expected
    assert parse_field_spec(render_field_spec(*expected)) == expected


@pytest.mark.parametrize("text", ["4", "3^0", "x", "2^y"])
def test_bad_field_spec(text):
    with pytest.raises(FormatError):
        parse_field_spec(text)


def test_parse_coefficients_and_ranges():
    assert parse_coefficients("1, 0,1") == [1, 0, 1]
    assert parse_range("7..10") == [7, 8, 9, 10]
    assert parse_range("2,3,5") == [2, 3, 5]
    with pytest.raises(FormatError):
        parse_coefficients("1,-1")
    with pytest.raises(FormatError):
        parse_range("a..b")


def test_parse_matrix_text():
    records = parse_matrix_text(MATRIX_FILE)
    assert records == [
        {'p': 3, 'm': 1, 'n': 2, 'rows': [[1, 2], [0, 1]]},
        {'p': 2, 'm': 2, 'n': 1, 'rows': [[3]]},
    ]
    assert parse_matrix_text(render_matrix_text(3, 1, [[1, 2], [0, 1]]))[0] == records[0]


@pytest.mark.parametrize("text", [
    "3 1 2\n1 2\n",              # missing row
    "3 1 2\n1 2\n0 3\n",         # entry out of range
    "3 1\n1\n",                  # short header
    "3 1 1\nx\n",
    "",
])
def test_bad_matrix_text(text):
    with pytest.raises(FormatError):
        parse_matrix_text(text)


def test_matrix_json_validation():
    record = matrix_from_json({'p': '3', 'm': 1, 'n': 1, 'rows': [[2]], 'modulus': [0, 1]})
    assert record == {'p': 3, 'm': 1, 'n': 1, 'rows': [[2]], 'modulus': [0, 1]}
    with pytest.raises(FormatError):
        matrix_from_json({'p': 3, 'm': 1, 'rows': [[2]]})


# =====================================
# Store
# =====================================

def test_json_written_atomically(tmp_path):
    path = tmp_path / "nested" / "out.json"
    write_json(str(path), {'b': 1, 'a': [1, 2]})
    assert load_json(str(path)) == {'a': [1, 2], 'b': 1}
    assert list(path.parent.iterdir()) == [path]


def test_load_matrices_from_text_and_json(tmp_path):
    text_path = tmp_path / "m.txt"
    text_path.write_text(MATRIX_FILE)
    assert len(load_matrices(str(text_path))) == 2

    json_path = tmp_path / "m.json"
    json_path.write_text(json.dumps([{'p': 3, 'm': 1, 'n': 1, 'rows': [[1]]}]))
    assert load_matrices(str(json_path))[0]['rows'] == [[1]]


def test_missing_file(tmp_path):
    with pytest.raises(FormatError):
        load_json(str(tmp_path / "absent.json"))


def test_write_report(tmp_path):
    rows = [{'q': 3, 'n': 2, 'holds': True}, {'q': 2, 'n': 2, 'holds': False}]
    frame = write_report(rows, csv_path=str(tmp_path / "r.csv"), json_path=str(tmp_path / "r.json"),
                         sort_by=['q'])
    assert list(frame['q']) == [2, 3]
    assert (tmp_path / "r.csv").read_text().splitlines()[0] == "q,n,holds"
    assert json.loads((tmp_path / "r.json").read_text())[0]['holds'] is False
