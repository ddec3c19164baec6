"""Dense complex polynomials about 0 at working precision.

Coefficient index j is the coefficient of z^j.  The zero polynomial has
degree -1.  Multiplication is schoolbook; degrees in this package stay in
the low thousands, where that is faster in practice than any asymptotically
clever scheme layered over arbitrary-precision scalars.
"""

from __future__ import annotations

from typing import Callable, Iterable, Iterator, Sequence, Union

from mpmath import mpc

from .precision import ComplexLike, to_mpc


class StreamExhaustedError(ValueError):
    """A coefficient stream supplied fewer coefficients than requested."""


def _trim(coeffs: list) -> list:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


class Poly:
    """Immutable-by-convention dense polynomial; do not mutate ``coeffs``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[ComplexLike] = ()):
        self.coeffs = _trim([to_mpc(c) for c in coeffs])

    @classmethod
    def zero(cls) -> "Poly":
        return cls(())

    @classmethod
    def monomial(cls, n: int, coeff: ComplexLike = 1) -> "Poly":
        if n < 0:
            raise ValueError("monomial exponent must be >= 0")
        return cls([0] * n + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, j: int) -> mpc:
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return mpc(0)

    def __call__(self, z: ComplexLike) -> mpc:
        """Horner evaluation at working precision."""
        zz = to_mpc(z)
        acc = mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * zz + c
        return acc

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for j, c in enumerate(b):
            out[j] = out[j] + c
        return Poly(out)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __mul__(self, other: Union["Poly", ComplexLike]) -> "Poly":
        if not isinstance(other, Poly):
            s = to_mpc(other)
            return Poly([c * s for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return Poly.zero()
        out = [mpc(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def shifted(self, n: int) -> "Poly":
        """Multiply by z^n (n >= 0): prepend n zero coefficients."""
        if n < 0:
            raise ValueError("shift must be >= 0")
        if self.is_zero():
            return Poly.zero()
        return Poly([mpc(0)] * n + list(self.coeffs))

    def truncated(self, n_max: int) -> "Poly":
        """Drop all terms of degree > n_max."""
        if n_max < 0:
            return Poly.zero()
        return Poly(self.coeffs[: n_max + 1])

    def compose(self, inner: "Poly") -> "Poly":
        """Return self(inner(z)) by Horner over polynomial arithmetic."""
        acc = Poly.zero()
        for c in reversed(self.coeffs):
            acc = acc * inner + Poly([c])
        return acc

    def valuation(self) -> int:
        """Order of vanishing at 0 (degree+1 convention not used; zero poly -> -1)."""
        if self.is_zero():
            return -1
        for j, c in enumerate(self.coeffs):
            if c != 0:
                return j
        return -1

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple((str(c.real), str(c.imag)) for c in self.coeffs))

    def __repr__(self) -> str:
        if self.is_zero():
            return "Poly(0)"
        return f"Poly(degree={self.degree})"


CoeffStream = Union[Sequence[ComplexLike], Iterator, Callable[[int], ComplexLike]]


def partial_sum(coeffs: CoeffStream, n_terms_max: int) -> Poly:
    """Truncate a coefficient stream after degree ``n_terms_max``.

    The stream may be a sequence, an iterator, or a callable j -> a_j.
    Raises StreamExhaustedError if fewer than n_terms_max + 1 coefficients
    are available.
    """
    if n_terms_max < 0:
        raise ValueError("partial sum degree must be >= 0")
    out = []
    if callable(coeffs) and not isinstance(coeffs, Sequence):
        for j in range(n_terms_max + 1):
            out.append(coeffs(j))
        return Poly(out)
    it = iter(coeffs)
    for j in range(n_terms_max + 1):
        try:
            out.append(next(it))
        except StopIteration:
            raise StreamExhaustedError(
                f"stream supplied {j} coefficients, need {n_terms_max + 1}"
            ) from None
    return Poly(out)
