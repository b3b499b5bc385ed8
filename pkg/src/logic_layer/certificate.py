"""
Matrix Waring Architect - Certificate Module

A certificate carries a target matrix A, an exponent k and root matrices E_i with
E_1^k + ... + E_r^k = A, plus the ordered provenance of every choice made while
building them. Certificates serialize to JSON and can be re-checked from scratch.
"""

import logging
from dataclasses import dataclass, field as dataclass_field

from data_layer.formats import FormatError

from .errors import PreconditionViolated, SingularMatrix, WaringError
from .fields import build_tower
from .matlin import FFMatrix

logger = logging.getLogger(__name__)


def field_spec(field):
    """{p, m, modulus} for a prime field or an extension of one."""
    if field.base is None:
        return {'p': field.characteristic, 'm': 1, 'modulus': [0, 1]}
    if field.base.base is not None:
        raise PreconditionViolated("certificates are over F_p or F_{p^m}")
    return {'p': field.characteristic, 'm': field.degree, 'modulus': list(field.modulus)}


def field_from_spec(spec):
    """Rebuild the coefficient field F_q from a {p, m, modulus} record."""
    p, m = int(spec['p']), int(spec.get('m', 1))
    modulus = spec.get('modulus')
    tower = build_tower(p, m, 1, None if modulus is None else tuple(int(c) for c in modulus))
    return tower.mid


def step(name, **details):
    """One provenance record; matrices and polynomials are stored as plain lists."""
    record = {'step': name}
    for key, value in details.items():
        if isinstance(value, FFMatrix):
            value = value.to_lists()
        elif hasattr(value, 'coeffs'):
            value = list(value.coeffs)
        elif hasattr(value, 'index') and hasattr(value, 'field'):
            value = value.index
        record[key] = value
    return record


def witness_step(name, witness, **details):
    """Provenance record carrying a replayable similarity witness U^-1 B U = A."""
    return step(name, witness={'U': witness.U.to_lists(), 'A': witness.A.to_lists(),
                               'B': witness.B.to_lists()}, **details)


@dataclass(frozen=True)
class WaringCertificate:
    """A = sum of terms[i]^k over the coefficient field, with provenance."""

    field: object
    k: int
    terms: tuple
    target: FFMatrix
    provenance: tuple = dataclass_field(default=())
    method: str = ''

    @property
    def n(self):
        return self.target.n

    @property
    def r(self):
        return len(self.terms)

    def power_sum(self):
        total = FFMatrix.zeros(self.field, self.n)
        for term in self.terms:
            total = total + term ** self.k
        return total

    def to_dict(self):
        return {
            'field': field_spec(self.field),
            'n': self.n,
            'k': self.k,
            'method': self.method,
            'terms': [term.to_lists() for term in self.terms],
            'target': self.target.to_lists(),
            'provenance': list(self.provenance),
        }

    @classmethod
    def from_dict(cls, data):
        """
        Rebuild a certificate from its JSON form.

        Raises:
            FormatError: Missing keys, wrong types or out-of-range entries
        """
        try:
            field = field_from_spec(data['field'])
            n = int(data['n'])
            k = int(data['k'])
            terms = tuple(FFMatrix(field, rows) for rows in data['terms'])
            target = FFMatrix(field, data['target'])
            provenance = tuple(data.get('provenance', []))
            method = str(data.get('method', ''))
        except (KeyError, TypeError, ValueError, WaringError) as e:
            raise FormatError(f"malformed certificate: {e}") from None
        for matrix in (target,) + terms:
            if matrix.n != n or matrix.width != n:
                raise FormatError(f"certificate matrices must be {n}x{n}")
            if any(not 0 <= x < field.order for row in matrix.rows for x in row):
                raise FormatError("certificate entry out of field range")
        return cls(field, k, terms, target, provenance, method)


def _replay(record, field):
    witness = record.get('witness')
    if witness is not None:
        U, A, B = (FFMatrix(field, witness[key]) for key in ('U', 'A', 'B'))
        try:
            if U.inverse() * B * U != A:
                return f"witness in step '{record.get('step')}' does not conjugate B to A"
        except SingularMatrix:
            return f"witness in step '{record.get('step')}' is singular"
    root = record.get('root_check')
    if root is not None:
        E = FFMatrix(field, root['E'])
        if E ** int(root['k']) != FFMatrix(field, root['C']):
            return f"root check in step '{record.get('step')}' fails"
    return None


def verify(certificate):
    """
    Re-check a certificate from scratch.

    Returns:
        tuple: (ok, reasons) with a human-readable reason per failed check
    """
    reasons = []
    if certificate.k < 1:
        reasons.append(f"exponent must be positive, got {certificate.k}")
    if certificate.r not in (2, 3):
        reasons.append(f"expected 2 or 3 terms, got {certificate.r}")
    for i, term in enumerate(certificate.terms):
        if term.field != certificate.field or term.n != certificate.n:
            reasons.append(f"term {i} has the wrong field or size")
    if not reasons and certificate.power_sum() != certificate.target:
        reasons.append("sum of k-th powers differs from the target")

    for record in certificate.provenance:
        try:
            problem = _replay(record, certificate.field)
        except (KeyError, TypeError, ValueError, WaringError) as e:
            problem = f"unreadable provenance step '{record.get('step')}': {e}"
        if problem:
            reasons.append(problem)

    if reasons:
        logger.info("[VERIFY] certificate rejected: %s", "; ".join(reasons))
    return not reasons, reasons
