"""Certified construction of truncated universal Taylor series on the unit
disc and the strip, together with the potential-theoretic instrumentation
needed to audit them: Poisson kernel, Green functions of discs and arc
complements, minimal-thinness tests, Monte-Carlo harmonic measure, and
angular boundary probes.

All scalar arithmetic runs at a configurable binary precision (default 256
bits, see :mod:`utaylor.precision`); Monte-Carlo walks use double precision
with counter-based random streams so results are reproducible bit for bit.
"""

from .precision import (
    DEFAULT_PRECISION_BITS,
    MIN_PRECISION_BITS,
    get_precision,
    local_precision,
    set_precision,
)
from .poly import Poly, StreamExhaustedError, partial_sum

__all__ = [
    "DEFAULT_PRECISION_BITS",
    "MIN_PRECISION_BITS",
    "Poly",
    "StreamExhaustedError",
    "get_precision",
    "local_precision",
    "partial_sum",
    "set_precision",
]

__version__ = "0.1.0"
