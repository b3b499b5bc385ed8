"""
File IO for matrices, certificates and census reports.

All writes are atomic (temporary file in the target directory, then rename).
"""

import logging
import os
import tempfile

import pandas as pd

try:
    from .formats import FormatError, matrix_from_json, parse_json_text, parse_matrix_text, render_json
except ImportError:
    from formats import FormatError, matrix_from_json, parse_json_text, parse_matrix_text, render_json

logger = logging.getLogger(__name__)


def write_text_atomic(path, text):
    """
    Writes text to a file atomically.

    :param path: Destination path.
    :param text: Contents.
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, temp_path = tempfile.mkstemp(dir=directory, prefix='.tmp-', suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, 'w', encoding='utf-8') as handle:
            handle.write(text)
        os.replace(temp_path, path)
    except BaseException:
        if os.path.exists(temp_path):
            os.remove(temp_path)
        raise
    logger.debug("[STORE] wrote %s", path)


def write_json(path, data):
    write_text_atomic(path, render_json(data))


def read_text(path):
    try:
        with open(path, encoding='utf-8') as handle:
            return handle.read()
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e}") from None


def load_json(path):
    """
    Loads a JSON file.

    :param path: Source path.
    :return: Decoded data; unreadable or malformed files raise FormatError.
    """
    return parse_json_text(read_text(path))


def load_matrices(path):
    """
    Loads matrices from a text file, or from JSON when the file starts with '{' or '['.

    :return: List of dicts {p, m, n, rows[, modulus]}.
    """
    text = read_text(path)
    stripped = text.lstrip()
    if stripped.startswith('{') or stripped.startswith('['):
        data = parse_json_text(text)
        records = data if isinstance(data, list) else [data]
        return [matrix_from_json(record) for record in records]
    return parse_matrix_text(text)


def write_report(rows, csv_path=None, json_path=None, sort_by=None):
    """
    Writes census rows to CSV and/or JSON through a DataFrame.

    :param rows: List of flat dicts (one per parameter point).
    :param csv_path: Optional CSV destination.
    :param json_path: Optional JSON destination (records orientation).
    :param sort_by: Columns fixing the row order (default: keep input order).
    :return: The DataFrame.
    """
    frame = pd.DataFrame(rows)
    if sort_by and not frame.empty:
        frame = frame.sort_values(list(sort_by), kind='mergesort').reset_index(drop=True)
    if csv_path:
        write_text_atomic(csv_path, frame.to_csv(index=False))
    if json_path:
        write_text_atomic(json_path, frame.to_json(orient='records', indent=2) + "\n")
    return frame
