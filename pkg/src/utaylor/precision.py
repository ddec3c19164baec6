"""Run-wide arbitrary-precision configuration.

All exact arithmetic in this package goes through mpmath.  Precision is a
process-wide setting (mpmath's global context): scalars are immutable and
operations are deterministic for a fixed mantissa length, so values computed
at one precision can be shared freely.

The minimum is 53 bits (IEEE double mantissa); the default of 256 bits is
needed because the builders' requested tolerances decay like
(2^(k+1) d^n)^(-1) and fall below double precision within a few steps.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Iterator, Union

from mpmath import mp, mpc, mpf

DEFAULT_PRECISION_BITS = 256
MIN_PRECISION_BITS = 53

Real = mpf
Complex = mpc
ComplexLike = Union[int, float, complex, mpf, mpc]

mp.prec = DEFAULT_PRECISION_BITS


def set_precision(bits: int) -> None:
    """Set the run-wide working precision in mantissa bits."""
    if bits < MIN_PRECISION_BITS:
        raise ValueError(
            f"precision must be at least {MIN_PRECISION_BITS} bits, got {bits}"
        )
    mp.prec = int(bits)


def get_precision() -> int:
    return mp.prec


@contextmanager
def local_precision(bits: int) -> Iterator[None]:
    """Temporarily switch working precision (restored on exit)."""
    saved = mp.prec
    set_precision(bits)
    try:
        yield
    finally:
        mp.prec = saved


def to_mpc(value: ComplexLike) -> mpc:
    """Coerce a scalar to an mpmath complex number at working precision."""
    if isinstance(value, mpc):
        return value
    if isinstance(value, complex):
        return mpc(value.real, value.imag)
    return mpc(value)


def to_mpf(value) -> mpf:
    """Coerce a real scalar; rejects values with an imaginary part."""
    if isinstance(value, mpf):
        return value
    if isinstance(value, mpc):
        if value.imag != 0:
            raise ValueError(f"expected a real value, got {value}")
        return value.real
    return mpf(value)


def machine_epsilon() -> mpf:
    """One ulp at the current working precision."""
    return mpf(2) ** (1 - mp.prec)
