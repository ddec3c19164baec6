"""Potential-theoretic primitives on the unit disc.

Includes the Poisson kernel, the Green function of the disc with pole at 0,
the Green function of the complement of a closed circular arc with pole at
infinity (computed by explicit conformal composition through the exterior
of a slit and the exterior of the unit disc), the piecewise barrier built
from it, the minimal-thinness integral test for monotone boundary profiles,
and a Monte-Carlo mean-value audit for super/subharmonicity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from mpmath import mp, mpc, mpf

from .geometry import DomainDesc
from .precision import to_mpc, to_mpf
from .quadrature import Quadrature, dyadic_partial_integrals

MINIMALLY_THIN = "minimally_thin"
NOT_MINIMALLY_THIN = "not_minimally_thin"
INCONCLUSIVE = "inconclusive"


class DomainError(ValueError):
    """Argument outside the operation's domain of definition."""


class PreconditionError(ValueError):
    """A documented precondition failed validation."""


class PrecisionGuardError(ArithmeticError):
    """Branch resolution or distance guard fell below working precision."""


def _require_unimodular(zeta: mpc) -> mpc:
    zeta = to_mpc(zeta)
    if abs(abs(zeta) - 1) > mpf("1e-9"):  # tolerate double-precision inputs
        raise DomainError("boundary point must be unimodular")
    return zeta


def poisson_kernel(z, zeta) -> mpf:
    """P(z, zeta) = (1 - |z|^2) / |z - zeta|^2 for z in the disc."""
    z = to_mpc(z)
    zeta = _require_unimodular(zeta)
    if abs(z) >= 1:
        raise DomainError("z must lie inside the unit disc")
    return (1 - abs(z) ** 2) / abs(z - zeta) ** 2


def poisson_kernel_np(z: complex, thetas: np.ndarray) -> np.ndarray:
    """Vectorized double-precision kernel against boundary angles."""
    zeta = np.exp(1j * thetas)
    return (1.0 - abs(z) ** 2) / np.abs(z - zeta) ** 2


def green_disc(z) -> mpf:
    """Green function of the unit disc with pole at 0: log(1/|z|)."""
    z = to_mpc(z)
    mod = abs(z)
    if mod == 0:
        raise DomainError("pole at z = 0")
    if mod >= 1:
        raise DomainError("z must lie inside the unit disc")
    return -mp.log(mod)


# ---------------------------------------------------------------------------
# arcs and the Green function of their complement


@dataclass(frozen=True)
class ArcOnCircle:
    """Closed arc {e^(i theta) : theta_lo <= theta <= theta_hi}, a proper
    subarc of the circle."""

    theta_lo: float
    theta_hi: float

    def __post_init__(self):
        width = self.theta_hi - self.theta_lo
        if not (0 < width < 2 * math.pi):
            raise ValueError("arc width must lie strictly between 0 and 2*pi")

    @property
    def half_angle(self) -> float:
        return (self.theta_hi - self.theta_lo) / 2

    @property
    def center_angle(self) -> float:
        return (self.theta_hi + self.theta_lo) / 2

    @property
    def capacity(self) -> float:
        """Logarithmic capacity sin(half_angle / 2)."""
        return math.sin(self.half_angle / 2)

    def contains(self, z, guard: float = 1e-12) -> bool:
        z = to_mpc(z)
        if abs(abs(z) - 1) > guard:
            return False
        delta = mp.arg(z * mp.exp(-1j * self.center_angle))
        return abs(delta) <= self.half_angle + guard

    def midpoint(self) -> mpc:
        return mp.exp(1j * self.center_angle)


def _joukowski_exterior(w: mpc, tie_tol: mpf) -> mpc:
    """Inverse Joukowski w -> w + sqrt(w^2 - 1), branch with modulus > 1.

    Square roots are split as sqrt(w-1)*sqrt(w+1) to keep the cut on the
    segment [-1, 1]; a modulus tie means w sits on the segment itself.
    """
    s = mp.sqrt(w - 1) * mp.sqrt(w + 1)
    u = w + s
    mod = abs(u)
    if mod < 1:
        u = w - s
        mod = abs(u)
    if abs(mod - 1) <= tie_tol:
        raise PrecisionGuardError(
            "branch resolution failed: point is on the slit to working precision"
        )
    return u


def _cayley_to_line(v: mpc) -> mpc:
    """Moebius map sending the unit circle to the real line with -1 -> inf;
    e^(i theta) -> tan(theta/2)."""
    return 1j * (1 - v) / (1 + v)


def green_arc_complement(z, arc: ArcOnCircle, guard: Optional[float] = None) -> mpf:
    """Green function of the arc complement with pole at infinity.

    Composition: rotate the arc symmetric about the positive real axis, map
    the circle to the real line (arc -> [-tan(beta/2), tan(beta/2)]),
    rescale to [-1, 1], open up the slit exterior onto the exterior of the
    unit disc, and evaluate the exterior-disc Green function with the pole
    at the image of infinity.  Points on the arc return 0 by convention.
    """
    z = to_mpc(z)
    tie_tol = mpf(10) ** (-30) if guard is None else to_mpf(guard)
    if arc.contains(z):
        return mpf(0)
    beta = mpf(arc.half_angle)
    tan_half = mp.tan(beta / 2)
    zr = z * mp.exp(-1j * mpf(arc.center_angle))
    u_inf = _joukowski_exterior(mpc(0, -1) / tan_half, tie_tol)
    if abs(1 + zr) < tie_tol:
        # the Cayley pole: z maps to infinity on the line, u to infinity,
        # where the Green function takes the value log |u_inf|
        return mp.log(abs(u_inf))
    w = _cayley_to_line(zr) / tan_half
    u = _joukowski_exterior(w, tie_tol)
    g = mp.log(abs(u * mp.conj(u_inf) - 1)) - mp.log(abs(u - u_inf))
    return g


def green_arc_complement_np(zs: np.ndarray, arc: ArcOnCircle) -> np.ndarray:
    """Double-precision vectorized arc-complement Green function.

    Same conformal composition as the scalar version; intended for bulk
    inequality fuzzing.  Points must stay off the arc.
    """
    beta = arc.half_angle
    tan_half = math.tan(beta / 2)
    zr = zs * np.exp(-1j * arc.center_angle)
    w = (1j * (1 - zr) / (1 + zr)) / tan_half

    def jouk(ws):
        s = np.sqrt(ws - 1) * np.sqrt(ws + 1)
        u = ws + s
        flip = np.abs(u) < 1
        u = np.where(flip, ws - s, u)
        return u

    u = jouk(w)
    u_inf = complex(jouk(np.array([-1j / tan_half]))[0])
    return np.log(np.abs(u * np.conj(u_inf) - 1)) - np.log(np.abs(u - u_inf))


def psi_j_barrier(z, j: int, arc: ArcOnCircle) -> mpf:
    """Piecewise barrier: -1/2 on |z| < 1 - 1/j, and the ratio of the
    arc-complement Green function to log(1/|z|) on the remaining annulus."""
    z = to_mpc(z)
    if j < 2:
        raise ValueError("j must be at least 2")
    mod = abs(z)
    if mod >= 1:
        raise DomainError("z must lie inside the unit disc")
    if mod < 1 - mpf(1) / j:
        return mpf(-1) / 2
    return green_arc_complement(z, arc) / (-mp.log(mod))


# ---------------------------------------------------------------------------
# minimal thinness


@dataclass(frozen=True)
class MinThinReport:
    verdict: str
    partial_integrals: tuple
    tail_estimate: float
    growth_slope: float


def _validate_profile(psi: Callable, grid_n: int = 65) -> None:
    prev = None
    for i in range(grid_n):
        t = i / (grid_n - 1)
        v = float(psi(t))
        if v < -1e-12 or v > 1 + 1e-12:
            raise PreconditionError(f"psi({t}) = {v} outside [0, 1]")
        if prev is not None and v < prev - 1e-12:
            raise PreconditionError(f"psi decreases near t = {t}")
        prev = v


def minthin_psi_test(
    psi: Callable,
    q: Optional[Quadrature] = None,
    levels: int = 48,
) -> MinThinReport:
    """Integral test for minimal thinness at 1 of the region
    {Re z > 1 - psi(|Im z|)}: thin iff the integral of psi(t)/t^2 over
    (0, 1] is finite.

    The dyadic partial integrals I_m (up to 2^-m) are inspected: a
    geometrically decaying increment sequence with negligible extrapolated
    tail means convergence; a positive fitted slope of I_m against m means
    divergence (logarithmic or worse); anything else is inconclusive.
    """
    q = q or Quadrature(rule="adaptive-subdivision", abs_tol=1e-9, max_refinements=24)
    _validate_profile(psi)
    integrand = lambda t: to_mpf(psi(t)) / (t * t)
    partials = dyadic_partial_integrals(integrand, levels, q)
    tol = mpf(1e-6)
    increments = [partials[i + 1] - partials[i] for i in range(len(partials) - 1)]
    tail = mpf("inf")
    last = increments[-3:]
    prev = increments[-4:-1]
    ratios = [
        (abs(a) / abs(b)) if abs(b) > 0 else mpf(0) for a, b in zip(last, prev)
    ]
    r = max(ratios) if ratios else mpf(1)
    if r < mpf("0.97"):
        tail = abs(increments[-1]) * r / (1 - r)
    half = len(partials) // 2
    ys = np.array([float(v) for v in partials[half:]])
    xs = np.arange(half, len(partials), dtype=float)
    slope = float(np.polyfit(xs, ys, 1)[0]) if len(ys) > 2 else 0.0
    if tail <= tol:
        verdict = MINIMALLY_THIN
    elif slope > float(tol):
        verdict = NOT_MINIMALLY_THIN
    else:
        verdict = INCONCLUSIVE
    return MinThinReport(
        verdict,
        tuple(partials),
        float(tail) if tail != mpf("inf") else math.inf,
        slope,
    )


# ---------------------------------------------------------------------------
# mean-value audit


@dataclass(frozen=True)
class SuperharmonicityReport:
    trials: int
    violations: int
    worst_margin: float  # max over trials of (circle average - center value)
    tolerance: float


def superharmonicity_check(
    u: Callable,
    domain: DomainDesc,
    trials: int,
    seed: int,
    circle_points: int = 64,
    tolerance: float = 1e-9,
    radius_shrink: float = 0.8,
) -> SuperharmonicityReport:
    """Sample random interior discs and test the mean-value inequality
    u(center) >= average over the circle, up to ``tolerance``.

    Superharmonic inputs should produce zero violations; subharmonic ones
    violate on essentially every disc.
    """
    gen = np.random.Generator(np.random.Philox(key=np.array(
        [seed & 0xFFFFFFFFFFFFFFFF, 0x5357], dtype=np.uint64)))
    center = domain.meta.get("center", 0j)
    span = domain.scale
    found = 0
    violations = 0
    worst = -math.inf
    attempts = 0
    while found < trials and attempts < 1000 * trials:
        attempts += 1
        cand = center + complex(gen.uniform(-span, span), gen.uniform(-span, span))
        dist = domain.distance(cand)
        if dist <= 0:
            continue
        if not domain.inside(cand):
            continue
        radius = dist * radius_shrink * gen.uniform(0.2, 1.0)
        if radius <= 0:
            continue
        c = to_mpc(cand)
        acc = mpf(0)
        ok = True
        for i in range(circle_points):
            p = c + radius * mp.exp(2j * mp.pi * i / circle_points)
            try:
                acc += to_mpf(u(p))
            except (ValueError, ZeroDivisionError):
                ok = False
                break
        if not ok:
            continue
        avg = acc / circle_points
        try:
            margin = float(avg - to_mpf(u(c)))
        except (ValueError, ZeroDivisionError):
            continue
        found += 1
        worst = max(worst, margin)
        if margin > tolerance:
            violations += 1
    if found < trials:
        raise PreconditionError("could not sample enough interior discs")
    return SuperharmonicityReport(found, violations, worst, tolerance)
