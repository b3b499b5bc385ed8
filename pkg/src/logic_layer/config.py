"""
Matrix Waring Architect - Logic Layer Configuration

This file contains all budgets, bound constants and settings for the decomposition
engine and the census oracles. Centralizing these values makes it easy to tune the
search limits without changing code.

Every budget can be overridden from the environment (or a .env file) with the
WARING_* variable named next to it.
"""

import os
from dotenv import load_dotenv

load_dotenv()


def _env_int(name, default):
    """Read an integer override from the environment, falling back to the default."""
    value = os.getenv(name)
    if value is None or value.strip() == "":
        return default
    return int(value, 0)


# =====================================
# Arithmetic Budgets
# =====================================
# Group-order factorization: trial division up to this bound, then sympy's
# rho / p-1 stages; anything still composite is a BudgetExceeded.
FACTOR_TRIAL_LIMIT = _env_int('WARING_FACTOR_TRIAL_LIMIT', 2 ** 20)

# Baby-step/giant-step table size cap (beyond it: sequential search)
BSGS_MEMORY_CAP = _env_int('WARING_BSGS_MEMORY_CAP', 2 ** 20)

# Fields up to this cardinality get exp/log/Zech tables at construction
TABLE_LIMIT = _env_int('WARING_TABLE_LIMIT', 2 ** 17)

# Sequential discrete-log fallback gives up after this many steps
SEQUENTIAL_LOG_CAP = _env_int('WARING_SEQUENTIAL_LOG_CAP', 2 ** 32)

# =====================================
# Enumeration Budgets
# =====================================
# q^(n^2) limit for enumerating every matrix (k-th power sets, fallback)
ENUMERATION_BUDGET = _env_int('WARING_ENUMERATION_BUDGET', 2 ** 24)

# q^n limit for exhaustive element counts (orbit counts, trace fibers, Cohen)
COUNT_LIMIT = _env_int('WARING_COUNT_LIMIT', 2 ** 16)

# |S|^2 limit before the sumset is materialized (otherwise per-target scan)
SUMSET_BUDGET = _env_int('WARING_SUMSET_BUDGET', 2 ** 26)

# Matrices decoded per numpy batch when enumerating powers
ENUMERATION_CHUNK = _env_int('WARING_ENUMERATION_CHUNK', 2 ** 16)

# =====================================
# Bound Constants
# =====================================
DIVISOR_CONSTANT = 3.53        # d(m) <= 3.53 * m^(1/3)
ORBIT_CONSTANT = 1.77          # N > q^n - 1.77 * q^(5n/6) - 1
GUARD_BAND = 1e-9              # Tolerance on floating point bound comparisons

# Primitive polynomials with trace 0 do not exist in degree 2 (any q)
# nor for these (q, n)
COHEN_EXCEPTIONAL_DEGREE = 2
COHEN_EXCEPTIONS = {(4, 3)}

# Two k-th powers are guaranteed from this dimension on (with k < q)
TWO_POWERS_MIN_DIMENSION = 7

# Validate constants
assert DIVISOR_CONSTANT > 0 and ORBIT_CONSTANT > 0, "Bound constants must be positive"
assert 0 < GUARD_BAND < 1e-6, f"Guard band too wide: {GUARD_BAND}"
assert TABLE_LIMIT >= 4, f"Table limit too small: {TABLE_LIMIT}"

# =====================================
# Term Counts & Exit Codes
# =====================================
VALID_TERMS = ['2', '3', 'auto']

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_CONTRADICTION = 3
EXIT_FINDING = 4

# =====================================
# Self-Test Defaults
# =====================================
DEFAULT_SEED = 20240601
SELFTEST_SAMPLES = 200         # Random matrices per three-powers instance
SELFTEST_TWO_POWER_SAMPLES = 50
SELFTEST_QUICK_SAMPLES = 10
SELFTEST_BLOCK_SAMPLES = 500    # Conforming block-root instances per field
BLOCK_ROOT_SIZES = (2, 5)       # Size range of the top-left block
BLOCK_ROOT_MAX_EXPONENT = 6

# =====================================
# Debugging & Logging
# =====================================
DEBUG_MODE = bool(_env_int('WARING_DEBUG', 0))   # Set to True for verbose output
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
