"""
Matrix Waring Architect - Command Line Interface

Subcommands:
    decompose   write matrices as sums of k-th powers, emit certificates
    verify      re-check certificates from scratch
    search      irreducible / primitive / k-power polynomials with a prescribed trace
    census      exhaustive oracles and counting-bound sweeps
    selftest    the bundled acceptance suite

Exit codes: 0 ok, 1 invalid certificate, 2 usage / precondition / parse error,
3 theorem contradiction, 4 bound finding.
"""

import argparse
import logging
import random
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

# Add all necessary paths
current_dir = Path(__file__).parent
project_root = current_dir.parent.parent
sys.path.insert(0, str(project_root / 'src'))

from data_layer.formats import (
    FormatError,
    matrix_to_json,
    parse_coefficients,
    parse_field_spec,
    parse_range,
    render_field_spec,
    render_matrix_text,
)
from data_layer.store import load_json, load_matrices, write_json, write_report
from logic_layer import census as census_module
from logic_layer.certificate import WaringCertificate, field_spec, verify
from logic_layer.config import (
    DEBUG_MODE,
    DEFAULT_SEED,
    EXIT_CONTRADICTION,
    EXIT_FINDING,
    EXIT_INVALID,
    EXIT_OK,
    EXIT_USAGE,
    LOG_FORMAT,
    VALID_TERMS,
)
from logic_layer.errors import WaringError, is_contradiction
from logic_layer.fields import build_tower
from logic_layer.matlin import FFMatrix, random_matrix
from logic_layer.polyring import canonical_extension, find_irreducible_with_trace, find_kpower_irreducible_with_trace
from logic_layer.selftest import all_passed, flip_first_entry, run_selftest
from logic_layer.waring import decompose

logger = logging.getLogger(__name__)

CENSUS_CHECKS = ['powers', 'closure', 'bounds', 'sharp', 'cohen', 'divisors', 'corollary']


# =====================================
# Job Configuration
# =====================================

@dataclass
class JobConfig:
    """Every flag of one invocation, after parsing."""

    command: str
    check: str = None
    field: str = None
    modulus: str = None
    n: str = None
    k: int = 1
    terms: str = 'auto'
    trace: int = 0
    primitive: bool = False
    input: str = None
    out: str = None
    budget: int = None
    seed: int = DEFAULT_SEED
    workers: int = 1
    allow_fallback: bool = False
    random: int = 0
    orders: str = None
    max_qn: int = None
    limit: int = 10 ** 6
    quick: bool = False
    inject_fault: bool = False
    debug: bool = DEBUG_MODE

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        return cls(**{key: value for key, value in data.items() if key in known})

    @classmethod
    def from_args(cls, args):
        return cls.from_dict(vars(args))


def build_parser():
    parser = argparse.ArgumentParser(prog='waring', description="Certified Waring decompositions of matrices over finite fields")
    parser.add_argument('--debug', action='store_true', default=DEBUG_MODE, help="verbose logging")
    sub = parser.add_subparsers(dest='command', required=True)

    def field_flags(p):
        p.add_argument('--field', help="coefficient field, p or p^m")
        p.add_argument('--modulus', help="F_p-coefficients c0,c1,... of the F_q modulus (default: canonical)")

    p = sub.add_parser('decompose', help="decompose matrices into sums of k-th powers")
    field_flags(p)
    p.add_argument('--k', type=int, required=True)
    p.add_argument('--terms', choices=VALID_TERMS, default='auto')
    p.add_argument('--input', help="matrix file (text or JSON)")
    p.add_argument('--random', type=int, default=0, help="decompose N seeded random matrices instead of --input")
    p.add_argument('--n', help="matrix size for --random")
    p.add_argument('--out', default='certificate.json')
    p.add_argument('--budget', type=int, help="enumeration budget q^(n^2) for the fallback")
    p.add_argument('--seed', type=int, default=DEFAULT_SEED)
    p.add_argument('--allow-fallback', action='store_true')

    p = sub.add_parser('verify', help="re-check a certificate file")
    p.add_argument('input')

    p = sub.add_parser('search', help="least polynomial with a prescribed trace")
    field_flags(p)
    p.add_argument('--n', required=True)
    p.add_argument('--trace', type=int, default=0)
    p.add_argument('--primitive', action='store_true')
    p.add_argument('--k', type=int, default=1, help="search a k-power irreducible instead (k > 1)")
    p.add_argument('--out')

    p = sub.add_parser('census', help="exhaustive oracles and bound sweeps")
    p.add_argument('check', choices=CENSUS_CHECKS)
    field_flags(p)
    p.add_argument('--n', help="size (powers, closure) or range of degrees (sharp), e.g. 7..10")
    p.add_argument('--k', type=int, default=1)
    p.add_argument('--terms', choices=['2', '3'], default='3')
    p.add_argument('--orders', '--q', dest='orders', help="field orders, e.g. 2,3,4,5 (default 2,3,4,5,7,8,9)")
    p.add_argument('--max-qn', type=int, help="largest q^n in the grid")
    p.add_argument('--limit', type=int, default=10 ** 6, help="divisor sweep limit")
    p.add_argument('--out', help="report basename; writes <out>.csv and <out>.json")
    p.add_argument('--budget', type=int)
    p.add_argument('--workers', type=int, default=1)

    p = sub.add_parser('selftest', help="run the acceptance suite")
    p.add_argument('--quick', action='store_true')
    p.add_argument('--seed', type=int, default=DEFAULT_SEED)
    p.add_argument('--workers', type=int, default=1)
    p.add_argument('--inject-fault', action='store_true', help=argparse.SUPPRESS)
    return parser


# =====================================
# Helpers
# =====================================

def _field(config, p=None, m=None, modulus=None):
    """Coefficient field from --field/--modulus, cross-checked against a matrix header."""
    if config.field is not None:
        spec = parse_field_spec(config.field)
        if p is not None and (p, m) != spec:
            raise FormatError(f"matrix is over GF({render_field_spec(p, m)}), --field says GF({config.field})")
        p, m = spec
    if p is None:
        raise FormatError("--field is required")
    if config.modulus is not None:
        modulus = parse_coefficients(config.modulus)
    return build_tower(p, m, 1, None if modulus is None else tuple(modulus)).mid


def _single(text, name):
    values = parse_range(text) if text is not None else []
    if len(values) != 1:
        raise FormatError(f"--{name} needs a single integer")
    return values[0]


def _targets(config):
    if config.random:
        field = _field(config)
        n = _single(config.n, 'n')
        rng = random.Random(config.seed)
        return [random_matrix(field, n, rng) for _ in range(config.random)]
    if not config.input:
        raise FormatError("decompose needs --input or --random")
    matrices = []
    for record in load_matrices(config.input):
        field = _field(config, record['p'], record['m'], record.get('modulus'))
        matrices.append(FFMatrix(field, record['rows']))
    return matrices


# =====================================
# Commands
# =====================================

def cmd_decompose(config):
    certificates = []
    for i, A in enumerate(_targets(config)):
        certificate = decompose(A, config.k, config.terms, config.allow_fallback, config.budget)
        certificates.append(certificate.to_dict())
        print(f"[{i}] {A.n}x{A.n} over GF({A.field.order}): {certificate.r} "
              f"{config.k}-th powers via {certificate.method}")
    write_json(config.out, certificates[0] if len(certificates) == 1 else certificates)
    print(f"Wrote {len(certificates)} certificate(s) to {config.out}")
    return EXIT_OK


def cmd_verify(config):
    data = load_json(config.input)
    records = data if isinstance(data, list) else [data]
    status = EXIT_OK
    for i, record in enumerate(records):
        ok, reasons = verify(WaringCertificate.from_dict(record))
        if ok:
            print(f"[{i}] valid")
        else:
            status = EXIT_INVALID
            print(f"[{i}] INVALID")
            for reason in reasons:
                print(f"    - {reason}")
    return status


def cmd_search(config):
    field = _field(config)
    n = _single(config.n, 'n')
    if config.k > 1:
        witness = find_kpower_irreducible_with_trace(canonical_extension(field, n), config.k, config.trace)
        result = {'P': list(witness.P.coeffs), 'a': witness.a.index, 'k': config.k}
        print(f"{witness.P!r}  (Phi of a^{config.k}, a = {witness.a.index})")
    else:
        P = find_irreducible_with_trace(field, n, config.trace, require_primitive=config.primitive)
        result = {'P': list(P.coeffs), 'primitive': config.primitive}
        print(repr(P))
    if config.out:
        result.update({'q': field.order, 'n': n, 'trace': config.trace})
        write_json(config.out, result)
    return EXIT_OK


def _census_rows(config):
    orders = parse_range(config.orders) if config.orders else None
    workers = config.workers
    check = config.check

    if check in ('powers', 'closure'):
        field = _field(config)
        n = _single(config.n, 'n')
        if check == 'powers':
            return [census_module.powers_summary(field, n, config.k, config.budget)]
        return [census_module.closure_summary(field, n, config.k, int(config.terms), config.budget)]
    if check == 'bounds':
        max_qn = config.max_qn or census_module.COUNT_LIMIT
        return (census_module.orbit_bound_sweep(orders, max_qn, workers)
                + census_module.trace_fiber_sweep(orders, max_qn, workers)
                + census_module.divisor_grid_sweep(orders, max_qn, workers))
    if check == 'sharp':
        dimensions = parse_range(config.n) if config.n else list(range(7, 17))
        rows = census_module.sharp_sweep(orders or census_module.DEFAULT_ORDERS, dimensions, config.k)
        for row in rows:
            # Claimed threshold: holds exactly when n >= 8.
            row['holds'] = row['final_holds'] == (row['n'] >= 8)
        return rows
    if check == 'cohen':
        return census_module.cohen_sweep(orders, config.max_qn or 4096, workers)
    if check == 'corollary':
        return census_module.kpower_census_sweep(orders, config.max_qn or 4096, workers)
    report = census_module.divisor_sweep(config.limit)
    report['failures'] = len(report['failures'])
    return [report]


def _report_counterexample(config, matrix_rows):
    """Print the first uncovered matrix; with --out also save it as a decompose input."""
    spec = field_spec(_field(config))
    print("First matrix not covered:")
    print(render_matrix_text(spec['p'], spec['m'], matrix_rows), end="")
    if config.out:
        write_json(f"{config.out}.counterexample.json",
                   matrix_to_json(spec['p'], spec['m'], matrix_rows, spec['modulus']))


def cmd_census(config):
    rows = _census_rows(config)
    if config.out:
        write_report(rows, csv_path=f"{config.out}.csv", json_path=f"{config.out}.json")
    failures = [row for row in rows if row.get('holds') is False]
    print(f"census {config.check}: {len(rows)} rows, {len(failures)} failures")
    for row in failures[:10]:
        print(f"    - {row}")
    if config.check == 'closure' and rows[0]['counterexample'] is not None:
        _report_counterexample(config, rows[0]['counterexample'])
    return EXIT_FINDING if failures else EXIT_OK


def cmd_selftest(config):
    results = run_selftest(quick=config.quick, seed=config.seed,
                           fault=flip_first_entry if config.inject_fault else None,
                           workers=config.workers)
    return EXIT_OK if all_passed(results) else EXIT_INVALID


COMMANDS = {
    'decompose': cmd_decompose,
    'verify': cmd_verify,
    'search': cmd_search,
    'census': cmd_census,
    'selftest': cmd_selftest,
}


def main(argv=None):
    config = JobConfig.from_args(build_parser().parse_args(argv))
    logging.basicConfig(level=logging.DEBUG if config.debug else logging.INFO, format=LOG_FORMAT)
    try:
        return COMMANDS[config.command](config)
    except FormatError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except WaringError as e:
        if is_contradiction(e):
            logger.error("[CLI] theorem contradiction: %s", e)
            for record in getattr(e, 'provenance', []):
                logger.error("[CLI]   %s", record)
            return EXIT_CONTRADICTION
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
