"""Exact arithmetic for ergodic averages, effective randomness tests and martingales on Cantor space."""

from .core import MeasureSpec, PolyBound, PrefixSet, canonicalize, combine, measure_of, union_all
from .dynamics import SimpleTransformation, birkhoff_average, preimage, pullback
from .errors import (
    DepthError,
    ErgolabError,
    InvalidTransformation,
    InvalidWordError,
    PreconditionError,
    SizeGuardError,
    TooShortError,
    TruncationError,
    UnsupportedExactQuery,
)
from .exact import QuadRational
from .martingales import MartingaleTable, check_fairness, martingale_from_test, martingale_to_test
from .randtests import FlattenedFamily, TestFamily, flatten, solovay_to_standard, validate_family
from .rates import exact_l2_deviation_shift, pillai_decompose, verify_rate_bound
from .simplefn import SimpleFunction, indicator, norms

__version__ = "0.1.0"

__all__ = [
    "DepthError", "ErgolabError", "FlattenedFamily", "InvalidTransformation", "InvalidWordError",
    "MartingaleTable", "MeasureSpec", "PolyBound", "PreconditionError", "PrefixSet", "QuadRational",
    "SimpleFunction", "SimpleTransformation", "SizeGuardError", "TestFamily", "TooShortError",
    "TruncationError", "UnsupportedExactQuery", "birkhoff_average", "canonicalize", "check_fairness",
    "combine", "exact_l2_deviation_shift", "flatten", "indicator", "martingale_from_test",
    "martingale_to_test", "measure_of", "norms", "pillai_decompose", "preimage", "pullback",
    "solovay_to_standard", "union_all", "validate_family", "verify_rate_bound",
]
