"""Monte-Carlo harmonic measure by walk-on-spheres.

Each walk jumps from its current point to a uniform point on the largest
inscribed circle until it lands within a stopping shell of the boundary,
where the boundary function is evaluated at the nearest boundary point.
The stopping-shell bias is O(eps_stop), far below the reported 3-sigma
confidence radii at the walk counts used here.

Randomness is counter-based: the angles consumed at global step s come from
a Philox stream keyed (seed, s), and walk i always uses variate i of that
stream.  The result therefore depends only on (seed, walks), never on
execution order, and walks are safe to split across workers.

Walks run in double precision; the Monte-Carlo error dominates double
rounding by many orders of magnitude.  Estimates are deterministic for a
fixed (seed, walks) pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from mpmath import mp

from .geometry import DomainDesc
from .potential import PreconditionError
from .precision import to_mpc


@dataclass(frozen=True)
class MeasureEstimate:
    functional_value: float
    walks: int
    confidence_radius: float  # 3 * sample std / sqrt(walks)
    seed: int
    discarded: int = 0
    inconclusive: bool = False


def _step_generator(seed: int, step: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, step], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _run_walks(
    domain: DomainDesc,
    z0: complex,
    walks: int,
    seed: int,
    eps_stop: float,
    max_steps: int,
):
    """Returns (endpoints, done_mask): endpoints are nearest boundary
    points of the final positions; done marks walks that reached the shell."""
    pos = np.full(walks, z0, dtype=np.complex128)
    active = np.ones(walks, dtype=bool)
    for step in range(max_steps):
        dist = domain.distance_np(pos)
        active &= dist > eps_stop
        if not active.any():
            break
        # one fixed-size draw per step keeps variate (i, s) addressable
        angles = _step_generator(seed, step).uniform(0.0, 2.0 * math.pi, walks)
        pos[active] += dist[active] * np.exp(1j * angles[active])
    done = domain.distance_np(pos) <= eps_stop
    endpoints = domain.nearest_np(pos)
    return endpoints, done


def _eval_boundary(phi: Callable, pts: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(phi(pts), dtype=np.float64)
        if vals.shape == pts.shape:
            return vals
    except (TypeError, ValueError):
        pass
    return np.array([float(phi(complex(p))) for p in pts], dtype=np.float64)


def _estimate(values: np.ndarray, walks: int, seed: int, discarded: int) -> MeasureEstimate:
    n = values.size
    mean = float(np.mean(values)) if n else math.nan
    std = float(np.std(values, ddof=1)) if n > 1 else 0.0
    conf = 3.0 * std / math.sqrt(n) if n else math.inf
    inconclusive = discarded > 0.01 * walks
    return MeasureEstimate(mean, walks, conf, seed, discarded, inconclusive)


def harmonic_measure(
    domain: DomainDesc,
    z,
    phi: Callable,
    walks: int,
    seed: int,
    eps_stop: Optional[float] = None,
    max_steps: int = 4000,
) -> MeasureEstimate:
    """Monte-Carlo estimate of the harmonic-measure functional of phi at z.

    Walks exceeding the step budget are discarded and counted; more than 1%
    discards flags the estimate inconclusive.
    """
    z0 = complex(to_mpc(z))
    if not domain.inside(z0):
        raise PreconditionError(f"start point {z0} is not inside the domain")
    eps = eps_stop if eps_stop is not None else 1e-6 * domain.scale
    endpoints, done = _run_walks(domain, z0, walks, seed, eps, max_steps)
    values = _eval_boundary(phi, endpoints[done])
    return _estimate(values, walks, seed, int(walks - done.sum()))


def modified_measure_functional(
    domain: DomainDesc,
    z,
    phi: Callable,
    walks: int,
    seed: int,
    eps_stop: Optional[float] = None,
    max_steps: int = 4000,
) -> MeasureEstimate:
    """Estimate of the functional against the reweighted exit measure whose
    density against harmonic measure is log(1/|zeta|) / log(1/|z|).

    Requires a domain inside the unit disc whose closure avoids 0: the
    weight is then the ratio of a positive harmonic function's boundary
    values to its value at z, so the reweighted measure has total mass 1.
    """
    z0 = complex(to_mpc(z))
    if not domain.inside(z0):
        raise PreconditionError(f"start point {z0} is not inside the domain")
    if domain.inside(0) or domain.distance(0) >= -1e-12:
        raise PreconditionError("the closure of the domain must avoid 0")
    eps = eps_stop if eps_stop is not None else 1e-6 * domain.scale
    endpoints, done = _run_walks(domain, z0, walks, seed, eps, max_steps)
    pts = endpoints[done]
    mods = np.abs(pts)
    if np.any(mods >= 1 + 1e-9):
        raise PreconditionError("a walk terminated outside the closed unit disc")
    mods = np.minimum(mods, 1.0 - 1e-300)
    weights = np.log(1.0 / mods) / float(mp.log(1 / abs(to_mpc(z))))
    values = _eval_boundary(phi, pts) * weights
    return _estimate(values, walks, seed, int(walks - done.sum()))


def poisson_integral_np(z: complex, phi_theta: Callable, nodes: int = 8192) -> float:
    """Quadrature oracle: the Poisson integral of a boundary function given
    as a function of the angle, by the periodic trapezoid rule (spectrally
    accurate for smooth integrands)."""
    thetas = np.linspace(0.0, 2.0 * math.pi, nodes, endpoint=False)
    kernel = (1.0 - abs(z) ** 2) / np.abs(z - np.exp(1j * thetas)) ** 2
    vals = np.asarray(phi_theta(thetas), dtype=np.float64)
    return float(np.mean(kernel * vals))
