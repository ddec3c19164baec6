"""One-dimensional quadrature on (0,1] with dyadic handling of the origin.

Integrands may blow up at t = 0; the interval is decomposed into dyadic
panels [2^(-m-1), 2^(-m)] and the panel contributions are summed until they
either decay geometrically (the remaining tail is then extrapolated and
charged to the error bound) or fail to decay, in which case the result is
flagged unconverged.  Divergent integrals are diagnosed, not integrated;
see dyadic_partial_integrals for the monotone partial-integral view used by
the minimal-thinness test.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from mpmath import mpf

from .precision import to_mpf

RULE_MIDPOINT = "midpoint-dyadic"
RULE_ADAPTIVE = "adaptive-subdivision"


@dataclass(frozen=True)
class Quadrature:
    rule: str = RULE_MIDPOINT
    abs_tol: float = 1e-9
    max_refinements: int = 18
    max_levels: int = 64  # dyadic panels toward 0

    def __post_init__(self):
        if self.rule not in (RULE_MIDPOINT, RULE_ADAPTIVE):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if self.abs_tol <= 0:
            raise ValueError("abs_tol must be positive")


@dataclass(frozen=True)
class IntegralEstimate:
    estimate: mpf
    bound: mpf
    converged: bool
    levels_used: int = 0


def _midpoint_panel(f, a: mpf, b: mpf, tol: mpf, max_ref: int):
    """Composite midpoint with doubling and one Richardson level.

    Returns (value, error_bound).  The error model is the standard O(h^2)
    midpoint expansion, so |M_2n - M_n|/3 estimates the error of M_2n and
    the Richardson combination gains two orders on smooth panels.
    """
    width = b - a
    n = 4
    h = width / n
    total = mpf(0)
    for i in range(n):
        total += to_mpf(f(a + (i + mpf(1) / 2) * h))
    prev = total * h
    diff = abs(prev)
    for _ in range(max_ref):
        # refining a midpoint rule by 2 reuses no points; step by thirds is
        # the classical trick but plain doubling keeps the logic simple
        n *= 2
        h = width / n
        total = mpf(0)
        for i in range(n):
            total += to_mpf(f(a + (i + mpf(1) / 2) * h))
        cur = total * h
        diff = abs(cur - prev)
        if diff / 3 <= tol:
            return cur + (cur - prev) / 3, diff / 3 + tol / 8
        prev = cur
    return prev, diff


def _adaptive_panel(f, a: mpf, b: mpf, tol: mpf, max_depth: int):
    """Adaptive Simpson bisection; returns (value, error_bound)."""

    def simpson(lo, hi, flo, fmid, fhi):
        return (hi - lo) / 6 * (flo + 4 * fmid + fhi)

    def recurse(lo, hi, flo, fmid, fhi, whole, tol_here, depth):
        mid = (lo + hi) / 2
        lmid = (lo + mid) / 2
        rmid = (mid + hi) / 2
        flm = to_mpf(f(lmid))
        frm = to_mpf(f(rmid))
        left = simpson(lo, mid, flo, flm, fmid)
        right = simpson(mid, hi, fmid, frm, fhi)
        delta = left + right - whole
        if depth >= max_depth:
            return left + right, abs(delta)
        if abs(delta) <= 15 * tol_here:
            return left + right + delta / 15, abs(delta) / 15 + tol_here / 8
        lv, le = recurse(lo, mid, flo, flm, fmid, left, tol_here / 2, depth + 1)
        rv, re_ = recurse(mid, hi, fmid, frm, fhi, right, tol_here / 2, depth + 1)
        return lv + rv, le + re_

    fa, fm, fb = to_mpf(f(a)), to_mpf(f((a + b) / 2)), to_mpf(f(b))
    whole = simpson(a, b, fa, fm, fb)
    return recurse(a, b, fa, fm, fb, whole, tol, 0)


def integrate_interval(f, a, b, q: Quadrature, tol=None):
    """Integrate f over a closed interval [a, b] away from singularities."""
    a, b = to_mpf(a), to_mpf(b)
    tol = to_mpf(q.abs_tol if tol is None else tol)
    if q.rule == RULE_ADAPTIVE:
        return _adaptive_panel(f, a, b, tol, q.max_refinements)
    return _midpoint_panel(f, a, b, tol, q.max_refinements)


def integrate(f: Callable, q: Quadrature) -> IntegralEstimate:
    """Integrate f over (0,1] with dyadic refinement toward 0."""
    tol = to_mpf(q.abs_tol)
    panel_tol = tol / (2 * q.max_levels)
    total = mpf(0)
    bound = mpf(0)
    values = []
    for m in range(q.max_levels):
        a = mpf(2) ** (-(m + 1))
        b = mpf(2) ** (-m)
        v, e = integrate_interval(f, a, b, q, panel_tol)
        total += v
        bound += e
        values.append(v)
        if m >= 4:
            recent = values[-3:]
            prior = values[-4:-1]
            ratios = [
                abs(r) / abs(p) if p != 0 else mpf(0)
                for r, p in zip(recent, prior)
            ]
            if all(p == 0 for p in prior) or max(ratios) < mpf("0.9"):
                r = max(ratios) if any(prior) else mpf(0)
                tail = abs(values[-1]) * r / (1 - r) if r > 0 else mpf(0)
                if tail <= tol / 2:
                    # extrapolate the remaining geometric tail and charge
                    # it fully to the bound
                    sign = 1 if values[-1] >= 0 else -1
                    total += sign * tail
                    bound += tail + tol / 4
                    return IntegralEstimate(total, bound, True, m + 1)
    return IntegralEstimate(total, bound, False, q.max_levels)


def dyadic_partial_integrals(f: Callable, levels: int, q: Quadrature):
    """Partial integrals I_m = integral over [2^(-m), 1], m = 1..levels.

    The sequence (I_m) is what the minimal-thinness criterion inspects: it
    is Cauchy exactly when the full integral converges, and its increments
    expose logarithmic or power-law divergence.
    """
    out = []
    total = mpf(0)
    panel_tol = to_mpf(q.abs_tol) / max(levels, 1)
    for m in range(1, levels + 1):
        a = mpf(2) ** (-m)
        b = mpf(2) ** (-(m - 1))
        v, _ = integrate_interval(f, a, b, q, panel_tol)
        total += v
        out.append(total)
    return out
