"""Boundary-behaviour probes and inequality verifiers.

Density of an image set in the plane is not finitely decidable; the probes
report box-grid coverage against sampling depth and leave interpretation to
the caller.  The subharmonic diagnostic and the growth-inequality verifier
are direct numerical transcriptions of the quantities they audit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from mpmath import mp, mpc, mpf

from .geometry import ApproachRegion, region_samples
from .poly import Poly
from .potential import ArcOnCircle, green_arc_complement_np
from .precision import to_mpc, to_mpf
from .universal import UniversalSeries

Box = Tuple[float, float, float, float]  # x0, x1, y0, y1


@dataclass(frozen=True)
class CoverageScore:
    box: Box
    grid_n: int
    hit_fraction: float
    samples_used: int

    @property
    def cells_hit(self) -> int:
        return round(self.hit_fraction * self.grid_n**2)


def _coverage(values: Sequence[complex], box: Box, grid_n: int) -> CoverageScore:
    x0, x1, y0, y1 = box
    cells = set()
    for v in values:
        x, y = float(to_mpc(v).real), float(to_mpc(v).imag)
        if not (x0 <= x < x1 and y0 <= y < y1):
            continue
        ix = int((x - x0) / (x1 - x0) * grid_n)
        iy = int((y - y0) / (y1 - y0) * grid_n)
        cells.add((ix, iy))
    return CoverageScore(box, grid_n, len(cells) / grid_n**2, len(values))


def plessner_probe(
    f: Callable,
    region: ApproachRegion,
    box: Box,
    grid_n: int,
    depth: int,
    per_level: int,
) -> CoverageScore:
    """Coverage of f over stratified samples of an approach region.

    Deepening the stratification only adds samples, so the hit fraction is
    monotone non-decreasing in depth.
    """
    pts = region_samples(region, depth, per_level)
    return _coverage([f(z) for z in pts], box, grid_n)


def radial_density(
    f: Callable,
    zeta,
    box: Box,
    grid_n: int,
    r_levels: int,
    per_level: int = 8,
) -> CoverageScore:
    """Coverage of the radial values f(r zeta) on the geometric ladder
    r = 1 - 2^(-m), refined by per_level interleaved radii per octave."""
    zeta = to_mpc(zeta)
    values = []
    for m in range(1, r_levels + 1):
        for i in range(per_level):
            r = 1 - mpf(2) ** (-m) * (1 + mpf(i) / per_level)
            if r <= 0:
                continue
            values.append(f(r * zeta))
    return _coverage(values, box, grid_n)


@dataclass(frozen=True)
class FatouReport:
    convergent: bool
    limit: Optional[complex]
    spreads: Tuple[float, ...]
    means: Tuple[complex, ...]
    tolerance: float


def fatou_probe(
    f: Callable,
    region: ApproachRegion,
    depth: int,
    per_level: int = 8,
    spread_tol: float = 1e-6,
) -> FatouReport:
    """Stratified convergence probe: the per-stratum value diameters must
    fall below tolerance without growing across the last three strata, and
    the stratum means must be Cauchy; the reported limit is the deepest
    stratum mean."""
    spreads: List[float] = []
    means: List[complex] = []
    for m in range(1, depth + 1):
        pts = region_samples(region, m, per_level)[-per_level:]
        vals = [to_mpc(f(z)) for z in pts]
        mean = sum(vals) / len(vals)
        diam = max(
            (abs(a - b) for i, a in enumerate(vals) for b in vals[i + 1 :]),
            default=mpf(0),
        )
        means.append(complex(mean))
        spreads.append(float(diam))
    tol = spread_tol
    ok = False
    if len(spreads) >= 3:
        s3, s2, s1 = spreads[-3], spreads[-2], spreads[-1]
        ok = (
            s1 < tol
            and s2 < tol
            and s3 < tol
            and s1 <= s2 + tol
            and s2 <= s3 + tol
            and abs(means[-1] - means[-2]) < tol
            and abs(means[-2] - means[-3]) < tol
        )
    return FatouReport(
        ok,
        means[-1] if ok else None,
        tuple(spreads),
        tuple(means),
        tol,
    )


# ---------------------------------------------------------------------------
# partial-sum closeness diagnostic


@dataclass(frozen=True)
class UkPoint:
    z: complex
    value: float  # (1/N) log |S_N - f|, -inf at numerical coincidence
    margin: float  # value - log |z|
    indeterminate: bool  # unbuilt-tail bound swamps the computed difference


@dataclass(frozen=True)
class UkReport:
    k: int
    N: int
    points: Tuple[UkPoint, ...]
    fraction_below_half_log: float  # counting indeterminate points as passing
    indeterminate: int

    @property
    def grid_size(self) -> int:
        return len(self.points)


def uk_diagnostic(
    series: UniversalSeries,
    k: int,
    grid: Sequence,
    N: Optional[int] = None,
) -> UkReport:
    """Normalized log-closeness of the degree-N partial sum to the built
    series, with the unbuilt tail charged from the growth certificates.

    N defaults to the valuation of block k+1 minus 1, where the partial sum
    equals the sum of the first k blocks exactly.  The unbuilt tail beyond
    the last block is bounded by the geometric certificate sum
    2^(-K) w(z); points where that bound swamps the computed difference are
    flagged indeterminate rather than reported.
    """
    built = len(series.blocks)
    if N is None:
        if k >= built:
            raise ValueError(
                f"need block {k + 1} built to know the default degree; have {built}"
            )
        N = series.blocks[k].shift - 1
    if N > series.degree:
        raise IndexError(f"partial sum degree {N} beyond built degree {series.degree}")
    S = series.partial_sum_poly(N)
    w = series.schedule.w
    tail_coeff = mpf(2) ** (-built)
    pts: List[UkPoint] = []
    passing = 0
    indet = 0
    for z in grid:
        z = to_mpc(z)
        mod = abs(z)
        if mod == 0 or mod >= 1:
            raise ValueError("grid points must lie in the punctured unit disc")
        diff = abs(S(z) - series(z))
        bound = tail_coeff * w(z)
        log_mod = mp.log(mod)
        if diff == 0:
            value = -math.inf
            margin = -math.inf
        else:
            value = float(mp.log(diff) / N)
            margin = float(value - log_mod)
        flagged = bound >= diff
        if flagged:
            indet += 1
            passing += 1  # cannot refute the bound at this point
        else:
            upper = float(mp.log(diff + bound) / N)
            if upper <= float(log_mod) / 2:
                passing += 1
        pts.append(UkPoint(complex(z), value, margin, flagged))
    return UkReport(k, N, tuple(pts), passing / len(pts), indet)


# ---------------------------------------------------------------------------
# polynomial growth inequality off an arc


@dataclass(frozen=True)
class BernsteinReport:
    degree: int
    sup_on_arc: float
    max_violation: float  # max over grid of log|S| - N G - log sup; <= 0 expected
    grid_points: int


def arc_sup(poly: Poly, arc: ArcOnCircle, scan: int = 4096) -> float:
    """Sup of |poly| on the arc by dense scan plus local ternary refinement
    (a bare grid maximum underestimates the sup enough to produce spurious
    violations near the arc)."""
    coeffs = np.array([complex(c) for c in reversed(poly.coeffs)])
    lo, hi = arc.theta_lo, arc.theta_hi

    def val(theta: float) -> float:
        return abs(np.polyval(coeffs, np.exp(1j * theta)))

    thetas = np.linspace(lo, hi, scan)
    mags = np.abs(np.polyval(coeffs, np.exp(1j * thetas)))
    best = int(np.argmax(mags))
    a = thetas[max(best - 1, 0)]
    b = thetas[min(best + 1, scan - 1)]
    for _ in range(200):
        m1 = a + (b - a) / 3
        m2 = b - (b - a) / 3
        if val(m1) < val(m2):
            a = m1
        else:
            b = m2
        if b - a < 1e-15:
            break
    return max(float(np.max(mags)), val((a + b) / 2))


def bernstein_verify(
    poly: Poly,
    arc: ArcOnCircle,
    grid: Sequence,
) -> BernsteinReport:
    """Check log|S(z)| <= N G(z) + log sup_arc |S| over the grid.

    Runs in double precision; the expected slack of genuine cases dwarfs
    the map tolerance (about 1e-12)."""
    if poly.is_zero():
        raise ValueError("zero polynomial has no degree-normalized growth")
    N = poly.degree
    sup = arc_sup(poly, arc)
    zs = np.array([complex(to_mpc(z)) for z in grid])
    coeffs = np.array([complex(c) for c in reversed(poly.coeffs)])
    vals = np.abs(np.polyval(coeffs, zs))
    g = green_arc_complement_np(zs, arc)
    with np.errstate(divide="ignore"):
        lhs = np.log(vals)
    rhs = N * g + math.log(sup)
    viol = float(np.max(lhs - rhs))
    return BernsteinReport(N, sup, viol, len(zs))
