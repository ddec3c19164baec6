"""Discretized compact plane sets, approach regions and domains.

Compact sets carry exact shape parameters next to their samples, so grids
can be regenerated at any density (sup-norms over a set are approximated by
maxima over samples, certified by densification).  The complement
connectivity gate works on a raster: it is a sanity check for schedules,
not computational geometry.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np
from mpmath import mpc, mpf, mp

from .precision import to_mpc, to_mpf

# ---------------------------------------------------------------------------
# angular approach regions


@dataclass(frozen=True)
class ApproachRegion:
    """Non-tangential approach set at a unimodular point.

    Membership is the pair of strict inequalities
    |z - zeta| < alpha (1 - |z|) < alpha t.
    """

    zeta: mpc
    alpha: mpf
    t: mpf

    def __post_init__(self):
        object.__setattr__(self, "zeta", to_mpc(self.zeta))
        object.__setattr__(self, "alpha", to_mpf(self.alpha))
        object.__setattr__(self, "t", to_mpf(self.t))
        if abs(abs(self.zeta) - 1) > mpf("1e-9"):  # tolerate double inputs
            raise ValueError("zeta must lie on the unit circle")
        if not self.alpha > 1:
            raise ValueError("alpha must exceed 1")
        if not (0 < self.t <= 1):
            raise ValueError("t must lie in (0, 1]")

    def membership(self, z) -> bool:
        z = to_mpc(z)
        gap = 1 - abs(z)
        return abs(z - self.zeta) < self.alpha * gap and self.alpha * gap < self.alpha * self.t


def region_membership(region: ApproachRegion, z) -> bool:
    return region.membership(z)


def region_samples(region: ApproachRegion, depth_levels: int, per_level: int) -> List[mpc]:
    """Points of the region stratified by 1 - |z| = t 2^(-m), m = 1..depth_levels.

    Each stratum holds per_level points spread over the angular section cut
    out by the aperture inequality; every returned point satisfies the
    membership predicate.
    """
    if depth_levels < 1 or per_level < 1:
        raise ValueError("depth_levels and per_level must be >= 1")
    theta0 = mp.arg(region.zeta)
    out: List[mpc] = []
    for m in range(1, depth_levels + 1):
        rho = 1 - region.t * mpf(2) ** (-m)
        # the angular half-width where |z - zeta| < alpha (1 - |z|)
        cos_min = (1 + rho * rho - (region.alpha * (1 - rho)) ** 2) / (2 * rho)
        if cos_min >= 1:
            continue  # cannot happen for alpha > 1; guard anyway
        phi_max = mp.acos(max(cos_min, mpf(-1)))
        for i in range(per_level):
            frac = mpf(2 * (i + 1)) / (per_level + 1) - 1  # strictly inside (-1, 1)
            phi = phi_max * frac
            z = rho * mp.exp(1j * (theta0 + phi))
            out.append(z)
    return out


# ---------------------------------------------------------------------------
# compact sets

_GOLDEN_ANGLE = math.pi * (3 - math.sqrt(5))


def _sunflower_disc(center: complex, radius: float, n: int) -> List[complex]:
    pts = []
    for i in range(n):
        r = radius * math.sqrt((i + 0.5) / n)
        a = _GOLDEN_ANGLE * (i + 1)
        pts.append(center + r * cmath.exp(1j * a))
    return pts


def _ladder(levels: int) -> List[float]:
    """Geometric fractions 2^-m, m = 1..levels."""
    return [2.0 ** (-m) for m in range(1, levels + 1)]


@dataclass
class CompactSet:
    """Compact plane set: exact shape parameters plus generated samples."""

    ident: str
    shape: dict
    boundary_samples: List[mpc] = field(default_factory=list)
    interior_samples: List[mpc] = field(default_factory=list)

    @property
    def d_max(self) -> mpf:
        return max(abs(z) for z in self.all_samples())

    @property
    def kind(self) -> str:
        return self.shape["kind"]

    def all_samples(self) -> List[mpc]:
        return list(self.boundary_samples) + list(self.interior_samples)

    def densified(self, factor: int) -> "CompactSet":
        """Regenerate with sample counts scaled by ``factor``."""
        shape = dict(self.shape)
        for key in ("n_boundary", "n_interior", "n_per_side", "n_points"):
            if key in shape:
                shape[key] = int(shape[key]) * factor
        if shape["kind"] == "union":
            shape["members"] = [m.densified(factor).shape for m in self._members()]
        return build_set(self.ident, shape)

    def _members(self) -> List["CompactSet"]:
        return [
            build_set(f"{self.ident}[{i}]", s)
            for i, s in enumerate(self.shape["members"])
        ]

    # -- rasterization support (float64): signed distance <= 0 means inside

    def signed_distance_np(self, pts: np.ndarray) -> np.ndarray:
        return _signed_distance(self.shape, pts)

    def to_dict(self) -> dict:
        return {"ident": self.ident, "shape": _shape_to_plain(self.shape)}

    @classmethod
    def from_dict(cls, data: dict) -> "CompactSet":
        return build_set(data["ident"], data["shape"])


def _shape_to_plain(shape: dict) -> dict:
    out = {}
    for k, v in shape.items():
        if isinstance(v, (mpc, complex)):
            out[k] = [float(v.real), float(v.imag)]
        elif isinstance(v, mpf):
            out[k] = float(v)
        elif k == "members":
            out[k] = [_shape_to_plain(m) for m in v]
        elif isinstance(v, (list, tuple)) and v and isinstance(v[0], (complex, mpc)):
            out[k] = [[float(p.real), float(p.imag)] for p in v]
        else:
            out[k] = v
    return out


def _plain_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


# -- shape constructors -----------------------------------------------------


def disc_set(
    ident: str,
    center,
    radius,
    n_boundary: int = 128,
    n_interior: int = 0,
    cluster_angle: Optional[float] = None,
    cluster_levels: int = 0,
) -> CompactSet:
    """Closed disc.  ``cluster_angle`` adds geometric ladders of boundary
    samples approaching the boundary point at that angle (used for sets
    whose closure touches the unit circle)."""
    shape = {
        "kind": "disc",
        "center": _plain_complex([to_mpc(center).real, to_mpc(center).imag]),
        "radius": float(radius),
        "n_boundary": n_boundary,
        "n_interior": n_interior,
        "cluster_angle": cluster_angle,
        "cluster_levels": cluster_levels,
    }
    return build_set(ident, shape)


def rectangle_set(
    ident: str,
    center,
    half_width: float,
    half_height: float,
    n_per_side: int = 64,
    n_interior: int = 0,
) -> CompactSet:
    shape = {
        "kind": "rectangle",
        "center": _plain_complex([to_mpc(center).real, to_mpc(center).imag]),
        "half_width": float(half_width),
        "half_height": float(half_height),
        "n_per_side": n_per_side,
        "n_interior": n_interior,
    }
    return build_set(ident, shape)


def segment_set(ident: str, a, b, n_points: int = 128, end_ladder_levels: int = 0) -> CompactSet:
    shape = {
        "kind": "segment",
        "a": _plain_complex([to_mpc(a).real, to_mpc(a).imag]),
        "b": _plain_complex([to_mpc(b).real, to_mpc(b).imag]),
        "n_points": n_points,
        "end_ladder_levels": end_ladder_levels,
    }
    return build_set(ident, shape)


def arc_set(ident: str, center, radius, theta_lo: float, theta_hi: float, n_points: int = 128) -> CompactSet:
    shape = {
        "kind": "arc",
        "center": _plain_complex([to_mpc(center).real, to_mpc(center).imag]),
        "radius": float(radius),
        "theta_lo": float(theta_lo),
        "theta_hi": float(theta_hi),
        "n_points": n_points,
    }
    return build_set(ident, shape)


def polyline_set(ident: str, points: Sequence, n_points: int = 128) -> CompactSet:
    shape = {
        "kind": "polyline",
        "points": [_plain_complex([to_mpc(p).real, to_mpc(p).imag]) for p in points],
        "n_points": n_points,
    }
    return build_set(ident, shape)


def lens_set(
    ident: str,
    bulge: float,
    n_boundary: int = 128,
    n_interior: int = 32,
    tip_ladder_levels: int = 12,
) -> CompactSet:
    """Lens with tips at -1 and +1: intersection of the two congruent discs
    through both tips whose arcs pass through +/- i*bulge (0 < bulge < 1).
    Boundary samples cluster geometrically toward the tips, which are
    themselves excluded."""
    if not (0 < bulge < 1):
        raise ValueError("bulge must lie in (0, 1)")
    shape = {
        "kind": "lens",
        "bulge": float(bulge),
        "n_boundary": n_boundary,
        "n_interior": n_interior,
        "tip_ladder_levels": tip_ladder_levels,
    }
    return build_set(ident, shape)


def union_set(ident: str, members: Iterable[CompactSet]) -> CompactSet:
    shape = {"kind": "union", "members": [m.shape for m in members]}
    return build_set(ident, shape)


# -- sample generation ------------------------------------------------------


def build_set(ident: str, shape: dict) -> CompactSet:
    kind = shape["kind"]
    gen = _GENERATORS.get(kind)
    if gen is None:
        raise ValueError(f"unknown shape kind {kind!r}")
    boundary, interior = gen(shape)
    cs = CompactSet(ident, shape, [to_mpc(z) for z in boundary], [to_mpc(z) for z in interior])
    if not cs.boundary_samples:
        raise ValueError(f"shape {kind!r} generated no boundary samples")
    return cs


def _gen_disc(shape):
    c = _plain_complex(shape["center"])
    r = float(shape["radius"])
    n = int(shape["n_boundary"])
    # half-step offset keeps distinguished boundary points (tangencies) out
    # of the uniform grid; ladders approach them instead
    boundary = [c + r * cmath.exp(2j * math.pi * (i + 0.5) / n) for i in range(n)]
    ca = shape.get("cluster_angle")
    if ca is not None:
        for f in _ladder(int(shape.get("cluster_levels", 0))):
            for s in (+1, -1):
                boundary.append(c + r * cmath.exp(1j * (ca + s * math.pi * f)))
    interior = _sunflower_disc(c, r * 0.97, int(shape.get("n_interior", 0)))
    return boundary, interior


def _gen_rectangle(shape):
    c = _plain_complex(shape["center"])
    hw, hh = float(shape["half_width"]), float(shape["half_height"])
    n = int(shape["n_per_side"])
    boundary = []
    for i in range(n):
        s = -1 + 2 * (i + 0.5) / n
        boundary.append(c + complex(s * hw, hh))
        boundary.append(c + complex(s * hw, -hh))
        boundary.append(c + complex(hw, s * hh))
        boundary.append(c + complex(-hw, s * hh))
    boundary += [c + complex(sx * hw, sy * hh) for sx in (-1, 1) for sy in (-1, 1)]
    ni = int(shape.get("n_interior", 0))
    interior = []
    if ni:
        m = max(2, int(math.sqrt(ni)))
        for i in range(m):
            for j in range(m):
                x = -hw + 2 * hw * (i + 0.5) / m
                y = -hh + 2 * hh * (j + 0.5) / m
                interior.append(c + complex(x, y))
    return boundary, interior


def _gen_segment(shape):
    a, b = _plain_complex(shape["a"]), _plain_complex(shape["b"])
    n = int(shape["n_points"])
    pts = [a + (b - a) * (i + 0.5) / n for i in range(n)]
    for f in _ladder(int(shape.get("end_ladder_levels", 0))):
        pts.append(a + (b - a) * f / 2)
        pts.append(b - (b - a) * f / 2)
    return pts, []


def _gen_arc(shape):
    c = _plain_complex(shape["center"])
    r = float(shape["radius"])
    lo, hi = float(shape["theta_lo"]), float(shape["theta_hi"])
    n = int(shape["n_points"])
    pts = [c + r * cmath.exp(1j * (lo + (hi - lo) * i / (n - 1))) for i in range(n)]
    return pts, []


def _gen_polyline(shape):
    pts_in = [_plain_complex(p) for p in shape["points"]]
    n = int(shape["n_points"])
    edges = list(zip(pts_in[:-1], pts_in[1:]))
    per = max(2, n // max(len(edges), 1))
    pts = []
    for a, b in edges:
        pts += [a + (b - a) * i / per for i in range(per)]
    pts.append(pts_in[-1])
    return pts, []


def _lens_params(bulge: float):
    u = (1 - bulge * bulge) / (2 * bulge)  # |imaginary offset| of the centers
    radius = (1 + bulge * bulge) / (2 * bulge)
    return u, radius


def _gen_lens(shape):
    b = float(shape["bulge"])
    u, radius = _lens_params(b)
    n = int(shape["n_boundary"])
    levels = int(shape.get("tip_ladder_levels", 0))
    phi1 = math.atan2(u, 1.0)  # parameter of the tip +1 on the upper circle
    span = (math.pi - phi1) - phi1
    boundary = []
    fracs = [(i + 1) / (n // 2 + 1) for i in range(n // 2)]
    fracs += [f / 2 for f in _ladder(levels)] + [1 - f / 2 for f in _ladder(levels)]
    for f in fracs:
        phi = phi1 + span * f
        upper = complex(0, -u) + radius * cmath.exp(1j * phi)
        boundary.append(upper)
        boundary.append(upper.conjugate())
    ni = int(shape.get("n_interior", 0))
    interior = []
    if ni:
        m = max(2, int(math.sqrt(ni * 2)))
        for i in range(m):
            for j in range(m):
                x = -1 + 2 * (i + 0.5) / m
                y = -b + 2 * b * (j + 0.5) / m
                p = complex(x, y)
                if abs(p - complex(0, -u)) < radius - 1e-12 and abs(
                    p - complex(0, u)
                ) < radius - 1e-12:
                    interior.append(p)
    return boundary, interior


def _gen_union(shape):
    boundary, interior = [], []
    for i, member in enumerate(shape["members"]):
        b, it = _GENERATORS[member["kind"]](member)
        boundary += b
        interior += it
    return boundary, interior


_GENERATORS = {
    "disc": _gen_disc,
    "rectangle": _gen_rectangle,
    "segment": _gen_segment,
    "arc": _gen_arc,
    "polyline": _gen_polyline,
    "lens": _gen_lens,
    "union": _gen_union,
}


# -- signed distances (vectorized, float64) ---------------------------------


def _seg_dist(pts: np.ndarray, a: complex, b: complex) -> np.ndarray:
    ab = b - a
    denom = abs(ab) ** 2
    t = np.clip(((pts - a) * np.conj(ab)).real / denom, 0.0, 1.0)
    return np.abs(pts - (a + t * ab))


def _signed_distance(shape: dict, pts: np.ndarray) -> np.ndarray:
    kind = shape["kind"]
    if kind == "disc":
        return np.abs(pts - _plain_complex(shape["center"])) - float(shape["radius"])
    if kind == "rectangle":
        c = _plain_complex(shape["center"])
        hw, hh = float(shape["half_width"]), float(shape["half_height"])
        dx = np.abs(pts.real - c.real) - hw
        dy = np.abs(pts.imag - c.imag) - hh
        outside = np.hypot(np.maximum(dx, 0.0), np.maximum(dy, 0.0))
        inside = np.minimum(np.maximum(dx, dy), 0.0)
        return outside + inside
    if kind == "segment":
        return _seg_dist(pts, _plain_complex(shape["a"]), _plain_complex(shape["b"]))
    if kind == "arc":
        c = _plain_complex(shape["center"])
        r = float(shape["radius"])
        lo, hi = float(shape["theta_lo"]), float(shape["theta_hi"])
        rel = pts - c
        ang = np.angle(rel)
        mid = (lo + hi) / 2
        half = (hi - lo) / 2
        delta = np.angle(np.exp(1j * (ang - mid)))
        clamped = mid + np.clip(delta, -half, half)
        return np.abs(pts - (c + r * np.exp(1j * clamped)))
    if kind == "polyline":
        p = [_plain_complex(q) for q in shape["points"]]
        return np.min(
            np.stack([_seg_dist(pts, a, b) for a, b in zip(p[:-1], p[1:])]), axis=0
        )
    if kind == "lens":
        u, radius = _lens_params(float(shape["bulge"]))
        d1 = np.abs(pts - complex(0, -u)) - radius
        d2 = np.abs(pts - complex(0, u)) - radius
        return np.maximum(d1, d2)
    if kind == "union":
        return np.min(
            np.stack([_signed_distance(m, pts) for m in shape["members"]]), axis=0
        )
    raise ValueError(f"unknown shape kind {kind!r}")


# ---------------------------------------------------------------------------
# complement connectivity gate


def _flood_verdict(sets: Sequence[CompactSet], box, grid_n: int) -> bool:
    """True iff every uncovered cell is connected to the frame."""
    x0, x1, y0, y1 = box
    xs = np.linspace(x0, x1, grid_n, endpoint=False) + (x1 - x0) / (2 * grid_n)
    ys = np.linspace(y0, y1, grid_n, endpoint=False) + (y1 - y0) / (2 * grid_n)
    X, Y = np.meshgrid(xs, ys)
    pts = (X + 1j * Y).ravel()
    cell_radius = 0.5 * math.hypot((x1 - x0) / grid_n, (y1 - y0) / grid_n)
    covered = np.zeros(pts.shape, dtype=bool)
    for cs in sets:
        covered |= cs.signed_distance_np(pts) <= cell_radius
    covered = covered.reshape(grid_n, grid_n)
    free = ~covered
    from scipy import ndimage

    labels, count = ndimage.label(free)
    if count == 0:
        return True  # nothing uncovered: vacuously connected
    border_labels = set(np.unique(labels[0, :])) | set(np.unique(labels[-1, :]))
    border_labels |= set(np.unique(labels[:, 0])) | set(np.unique(labels[:, -1]))
    border_labels.discard(0)
    interior_labels = set(np.unique(labels)) - {0}
    return interior_labels <= border_labels


def default_bounding_box(sets: Sequence[CompactSet]):
    d = max(float(cs.d_max) for cs in sets)
    half = 2.0 * max(1.0, d)
    return (-half, half, -half, half)


def connected_complement_check(
    sets: Sequence[CompactSet],
    bounding_box=None,
    grid_n: int = 128,
) -> str:
    """Raster flood-fill gate: 'pass', 'fail' or 'inconclusive'.

    The union is rasterized with conservative cell dilation; the complement
    is flood-filled from the frame.  Disagreement between resolutions
    grid_n and 2*grid_n reports 'inconclusive'.
    """
    if grid_n < 64:
        raise ValueError("grid_n must be at least 64")
    box = bounding_box or default_bounding_box(sets)
    coarse = _flood_verdict(sets, box, grid_n)
    fine = _flood_verdict(sets, box, 2 * grid_n)
    if coarse != fine:
        return "inconclusive"
    return "pass" if fine else "fail"


# ---------------------------------------------------------------------------
# tangent discs and domain descriptors


def tangent_disc(zeta, c):
    """Disc {P(., zeta) > c} for c > 0: internally tangent to the unit
    circle at zeta, center zeta*c/(c+1), radius 1/(c+1)."""
    zeta = to_mpc(zeta)
    c = to_mpf(c)
    if c <= 0:
        raise ValueError("level c must be positive")
    if abs(abs(zeta) - 1) > mpf("1e-9"):
        raise ValueError("zeta must be unimodular")
    return zeta * c / (c + 1), 1 / (c + 1)


class DomainDesc:
    """Bounded-boundary domain with an inside predicate and a positive
    lower bound on the distance to the boundary (exact for discs and the
    strip); enough structure for walk-on-spheres and mean-value audits."""

    def __init__(self, kind, inside, distance_np, nearest_np, scale=1.0, meta=None):
        self.kind = kind
        self._inside = inside
        self._distance_np = distance_np
        self._nearest_np = nearest_np
        self.scale = float(scale)
        self.meta = meta or {}

    def inside(self, z) -> bool:
        return bool(self._inside(complex(to_mpc(z))))

    def distance_np(self, pts: np.ndarray) -> np.ndarray:
        return self._distance_np(pts)

    def nearest_np(self, pts: np.ndarray) -> np.ndarray:
        return self._nearest_np(pts)

    def distance(self, z) -> float:
        return float(self._distance_np(np.array([complex(to_mpc(z))]))[0])

    # -- factories

    @classmethod
    def unit_disc(cls) -> "DomainDesc":
        def nearest(p):
            mod = np.abs(p)
            safe = np.where(mod == 0, 1.0, mod)
            return np.where(mod == 0, 1.0 + 0j, p / safe)

        return cls(
            "unit_disc",
            lambda z: abs(z) < 1,
            lambda p: 1.0 - np.abs(p),
            nearest,
            scale=1.0,
        )

    @classmethod
    def disc(cls, center, radius) -> "DomainDesc":
        c = complex(to_mpc(center))
        r = float(radius)

        def nearest(p):
            rel = p - c
            mod = np.abs(rel)
            safe = np.where(mod == 0, 1.0, mod)
            return np.where(mod == 0, c + r, c + r * rel / safe)

        return cls(
            "disc",
            lambda z: abs(z - c) < r,
            lambda p: r - np.abs(p - c),
            nearest,
            scale=r,
            meta={"center": c, "radius": r},
        )

    @classmethod
    def tangent_disc(cls, zeta, c) -> "DomainDesc":
        center, radius = tangent_disc(zeta, c)
        dom = cls.disc(center, radius)
        dom.kind = "tangent_disc"
        dom.meta.update({"zeta": complex(to_mpc(zeta)), "level": float(c)})
        return dom

    @classmethod
    def strip(cls) -> "DomainDesc":
        def nearest(p):
            left = -1 + 1j * p.imag
            right = 1 + 1j * p.imag
            return np.where(np.abs(p.real - 1) < np.abs(p.real + 1), right, left)

        return cls(
            "strip",
            lambda z: abs(z.real) < 1,
            lambda p: np.minimum(1.0 - p.real, p.real + 1.0),
            nearest,
            scale=1.0,
        )

    @classmethod
    def psi_region(cls, psi: Callable[[float], float], lipschitz: float = 1.0) -> "DomainDesc":
        """Region {z in the unit disc : Re z > 1 - psi(|Im z|)}.

        ``lipschitz`` must dominate the Lipschitz constant of psi; the
        distance bound uses the cone estimate gap/sqrt(1+L^2) against the
        curved piece of the boundary.
        """
        L = float(lipschitz)
        slant = math.sqrt(1 + L * L)
        psi_vec = np.vectorize(lambda y: float(psi(abs(y))))

        def dist(p):
            gap = p.real - (1.0 - psi_vec(p.imag))
            return np.minimum(1.0 - np.abs(p), gap / slant)

        def nearest(p):
            mod = np.abs(p)
            safe = np.where(mod == 0, 1.0, mod)
            radial = p / safe
            horiz = (1.0 - psi_vec(p.imag)) + 1j * p.imag
            use_radial = (1.0 - mod) < (p.real - (1.0 - psi_vec(p.imag))) / slant
            return np.where(use_radial, radial, horiz)

        def inside(z):
            return abs(z) < 1 and z.real > 1 - float(psi(abs(z.imag)))

        return cls("psi_region", inside, dist, nearest, scale=1.0)

    @classmethod
    def custom(cls, inside, distance_np, nearest_np, scale=1.0) -> "DomainDesc":
        return cls("custom", inside, distance_np, nearest_np, scale=scale)

    def validate_consistency(self, grid_n: int = 32, span: float = 2.0) -> bool:
        """Check distance > 0 iff inside on a grid around the origin."""
        xs = np.linspace(-span, span, grid_n)
        pts = np.array([complex(x, y) for x in xs for y in xs])
        d = self.distance_np(pts)
        for p, dist in zip(pts, d):
            if (dist > 0) != self._inside(p):
                return False
        return True
