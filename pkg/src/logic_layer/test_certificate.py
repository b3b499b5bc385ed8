"""
Tests for certificates: serialization, independent re-verification and
rejection of tampered files.
"""

import json

import pytest

from data_layer.formats import FormatError
from logic_layer.certificate import WaringCertificate, field_from_spec, field_spec, step, verify
from logic_layer.fields import field_of_order, prime_field
from logic_layer.matlin import FFMatrix
from logic_layer.selftest import flip_first_entry
from logic_layer.waring import three_powers

F5 = prime_field(5)


@pytest.fixture
def certificate():
    return three_powers(FFMatrix(F5, [[1, 2], [3, 4]]), 2)


# =====================================
# Serialization
# =====================================

def test_field_spec_roundtrip():
    F9 = field_of_order(9)
    assert field_spec(F5) == {'p': 5, 'm': 1, 'modulus': [0, 1]}
    assert field_spec(F9) == {'p': 3, 'm': 2, 'modulus': [1, 0, 1]}
    assert field_from_spec(field_spec(F9)) == F9


def test_step_flattens_values():
    record = step('demo', M=FFMatrix.identity(F5, 2), t=F5.element(3), label='x')
    assert record == {'step': 'demo', 'M': [[1, 0], [0, 1]], 't': 3, 'label': 'x'}


def test_json_roundtrip_keeps_validity(certificate):
    text = json.dumps(certificate.to_dict())
    restored = WaringCertificate.from_dict(json.loads(text))
    assert restored.target == certificate.target
    assert restored.terms == certificate.terms
    assert restored.method == 'three_powers'
    assert verify(restored) == (True, [])


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop('terms'),
    lambda d: d.update(n='two'),
    lambda d: d.update(target=[[1, 2], [3, 9]]),
    lambda d: d.update(terms=[[[1]], [[2]], [[3]]]),
])
def test_malformed_certificates(certificate, mutate):
    data = certificate.to_dict()
    mutate(data)
    with pytest.raises(FormatError):
        WaringCertificate.from_dict(data)


# =====================================
# Verification
# =====================================

def test_tampered_term_is_rejected(certificate):
    ok, reasons = verify(flip_first_entry(certificate))
    assert not ok
    assert any("differs from the target" in reason for reason in reasons)


def test_tampered_witness_is_rejected(certificate):
    data = certificate.to_dict()
    for record in data['provenance']:
        if 'witness' in record:
            U = record['witness']['U']
            U[0][0] = (U[0][0] + 1) % 5
            break
    ok, reasons = verify(WaringCertificate.from_dict(data))
    assert not ok
    assert any("witness" in reason for reason in reasons)


def test_wrong_term_count(certificate):
    short = WaringCertificate(F5, 2, certificate.terms[:1], certificate.target)
    ok, reasons = verify(short)
    assert not ok
    assert "expected 2 or 3 terms, got 1" in reasons
