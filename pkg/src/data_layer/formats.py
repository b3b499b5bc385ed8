"""
Text and JSON formats for fields, polynomials, matrices and reports.

Everything here works on plain Python values (ints, lists, dicts); the logic layer
turns them into field objects and matrices.
"""

import json

from sympy import isprime


class FormatError(ValueError):
    """Raised when an input file or string cannot be parsed."""


def parse_field_spec(text):
    """
    Parses a field specification such as "3", "2^4".

    :param text: "p" or "p^m".
    :return: Tuple (p, m).
    """
    text = str(text).strip()
    try:
        if '^' in text:
            p_text, m_text = text.split('^', 1)
            p, m = int(p_text), int(m_text)
        else:
            p, m = int(text), 1
    except ValueError:
        raise FormatError(f"invalid field specification {text!r}") from None
    if not isprime(p) or m < 1:
        raise FormatError(f"invalid field specification {text!r}: need a prime p and m >= 1")
    return p, m


def render_field_spec(p, m):
    return str(p) if m == 1 else f"{p}^{m}"


def parse_coefficients(text):
    """
    Parses a little-endian coefficient list, e.g. "1,0,1" for X^2 + 1.

    :param text: Comma-separated non-negative integers.
    :return: List of ints.
    """
    try:
        coeffs = [int(part) for part in str(text).replace(' ', '').split(',') if part != '']
    except ValueError:
        raise FormatError(f"invalid coefficient list {text!r}") from None
    if not coeffs or any(c < 0 for c in coeffs):
        raise FormatError(f"invalid coefficient list {text!r}")
    return coeffs


def parse_range(text):
    """
    Parses "7", "7..10" or "2,3,5" into a list of ints (inclusive ranges).
    """
    text = str(text).strip()
    try:
        if '..' in text:
            low, high = text.split('..', 1)
            return list(range(int(low), int(high) + 1))
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise FormatError(f"invalid range {text!r}") from None


# =====================================
# Matrix Text Format
# =====================================

def _validate_matrix(record):
    p, m, n, rows = record['p'], record['m'], record['n'], record['rows']
    if not isprime(p) or m < 1 or n < 1:
        raise FormatError(f"invalid matrix header: p={p} m={m} n={n}")
    q = p ** m
    if len(rows) != n or any(len(row) != n for row in rows):
        raise FormatError(f"expected {n} rows of {n} entries")
    for row in rows:
        for x in row:
            if not 0 <= x < q:
                raise FormatError(f"entry {x} out of range for a field of order {q}")
    return record


def parse_matrix_text(text):
    """
    Parses one or more matrices in the text format.

    Each matrix is a header line "p m n" followed by n rows of n element
    indices. Blank lines and lines starting with '#' are ignored.

    :param text: File contents.
    :return: List of dicts {p, m, n, rows}.
    """
    lines = [line.split('#', 1)[0].strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    records = []
    position = 0
    try:
        while position < len(lines):
            header = [int(x) for x in lines[position].split()]
            if len(header) != 3:
                raise FormatError(f"bad matrix header {lines[position]!r}")
            p, m, n = header
            body = lines[position + 1:position + 1 + n]
            if len(body) != n:
                raise FormatError("matrix file ends before all rows were read")
            rows = [[int(x) for x in line.split()] for line in body]
            records.append(_validate_matrix({'p': p, 'm': m, 'n': n, 'rows': rows}))
            position += 1 + n
    except ValueError as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(f"non-integer token in matrix file: {e}") from None
    if not records:
        raise FormatError("no matrix found")
    return records


def render_matrix_text(p, m, rows):
    """
    Renders a matrix in the text format (header plus rows).

    :return: String ending with a newline.
    """
    lines = [f"{p} {m} {len(rows)}"]
    lines.extend(" ".join(str(x) for x in row) for row in rows)
    return "\n".join(lines) + "\n"


def matrix_to_json(p, m, rows, modulus=None):
    record = {'p': p, 'm': m, 'n': len(rows), 'rows': [list(row) for row in rows]}
    if modulus is not None:
        record['modulus'] = list(modulus)
    return record


def matrix_from_json(record):
    """
    Validates the JSON mirror of the text format.

    :param record: Dict with p, m, n, rows and optional modulus.
    :return: The same dict, normalized to ints.
    """
    try:
        normalized = {
            'p': int(record['p']),
            'm': int(record['m']),
            'n': int(record['n']),
            'rows': [[int(x) for x in row] for row in record['rows']],
        }
        if record.get('modulus') is not None:
            normalized['modulus'] = [int(c) for c in record['modulus']]
    except (KeyError, TypeError, ValueError):
        raise FormatError("matrix JSON needs integer fields p, m, n and rows") from None
    return _validate_matrix(normalized)


def parse_json_text(text):
    """
    Decodes JSON, surfacing syntax errors as FormatError.
    """
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON: {e}") from None


def render_json(data):
    """Deterministic JSON rendering (sorted keys, two-space indent)."""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"
