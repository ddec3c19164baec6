"""Best-effort polynomial approximation on compact sets with certificates.

The classical theorem guaranteeing such approximants is non-constructive;
here a discrete weighted least-squares problem is solved in a basis built
by an Arnoldi-style recurrence against the sample inner product (multiply
the previous basis column by z, orthogonalize, normalize), which keeps the
conditioning of the normal equations under control on unions of separated
components.  Monomial coefficients are tracked exactly alongside the basis
columns, and every fit is validated a posteriori on a denser grid than it
was fitted on; the certified quantity is that validation sup-error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

from mpmath import fdot, mp, mpc, mpf, sqrt as mp_sqrt

from .geometry import CompactSet
from .poly import Poly
from .precision import to_mpc, to_mpf


class IllConditionedError(RuntimeError):
    """Basis collapse beyond working precision.

    Raise advice: increase the working precision or lower the degree."""


@dataclass
class ApproxProblem:
    target: Callable
    cset: CompactSet
    degree: int
    tol: float
    interior_weight: float = 0.25
    valuation: int = 0
    validation_factor: int = 4

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree must be >= 0")
        if not float(self.tol) > 0:
            raise ValueError("tol must be positive")
        if self.valuation < 0:
            raise ValueError("valuation must be >= 0")


@dataclass
class ApproxResult:
    poly: Poly
    achieved_error: mpf
    requested_tol: mpf
    met: bool
    degree: int
    valuation: int = 0
    validation_points: int = 0


class LeastSquaresFitter:
    """Incremental orthogonal-basis least squares on a sample set.

    Boundary samples carry unit weight, interior samples a reduced weight
    (sup-norm control comes from the boundary by the maximum principle;
    interior samples stabilize fits on unions).  The basis spans
    z^valuation, ..., z^(valuation + degree).
    """

    def __init__(
        self,
        cset: CompactSet,
        interior_weight: float = 0.25,
        valuation: int = 0,
    ):
        self.cset = cset
        self.valuation = valuation
        pts = list(cset.boundary_samples) + list(cset.interior_samples)
        wts = [mpf(1)] * len(cset.boundary_samples) + [
            to_mpf(interior_weight)
        ] * len(cset.interior_samples)
        if len(pts) < 2:
            raise ValueError("need at least two samples")
        self.points = [to_mpc(p) for p in pts]
        self.sqrt_w = [mp_sqrt(w) for w in wts]
        # columns live in scaled sample space: row i is sqrt(w_i) * v(z_i)
        self._columns: List[List[mpc]] = []
        self._polys: List[Poly] = []
        self._start()

    def _start(self):
        v = [
            sw * z**self.valuation if self.valuation else sw * mpc(1)
            for sw, z in zip(self.sqrt_w, self.points)
        ]
        nrm = self._norm(v)
        if nrm == 0:
            raise IllConditionedError("degenerate sample set")
        self._columns.append([x / nrm for x in v])
        self._polys.append(Poly.monomial(self.valuation, 1 / nrm))

    @staticmethod
    def _dot(u, v) -> mpc:
        # inner product with the conjugate on the first slot
        return fdot(v, u, conjugate=True)

    @classmethod
    def _norm(cls, v) -> mpf:
        return mp_sqrt(cls._dot(v, v).real)

    @property
    def degree(self) -> int:
        return len(self._columns) - 1

    def extend(self, degree: int) -> None:
        """Grow the orthonormal basis up to the requested degree."""
        tiny = mpf(2) ** (-(mp.prec - 16))
        while self.degree < degree:
            v = [z * x for z, x in zip(self.points, self._columns[-1])]
            p = self._polys[-1].shifted(1)
            scale = self._norm(v)
            # modified Gram-Schmidt with selective reorthogonalization
            for _ in range(2):
                for q, qp in zip(self._columns, self._polys):
                    h = self._dot(q, v)
                    v = [x - h * y for x, y in zip(v, q)]
                    p = p - h * qp
                nrm = self._norm(v)
                if nrm > scale / 2:
                    break
            if nrm <= tiny * scale:
                raise IllConditionedError(
                    f"basis collapsed at degree {self.degree + 1}: increase "
                    "precision or lower the degree"
                )
            self._columns.append([x / nrm for x in v])
            self._polys.append(p * (1 / nrm))

    def fit_values(self, values: Sequence[mpc]) -> Poly:
        """Least-squares fit of (already unscaled) target samples."""
        rhs = [sw * to_mpc(v) for sw, v in zip(self.sqrt_w, values)]
        out = Poly.zero()
        for q, qp in zip(self._columns, self._polys):
            c = self._dot(q, rhs)
            out = out + qp * c
        return out


def _sup_error(target: Callable, poly: Poly, points) -> mpf:
    worst = mpf(0)
    for z in points:
        err = abs(to_mpc(target(z)) - poly(z))
        if err > worst:
            worst = err
    return worst


def mergelyan_approximate(prob: ApproxProblem) -> ApproxResult:
    """Fit a polynomial of the requested degree to the target on the set.

    The achieved error is the sup over a validation grid at least
    ``validation_factor`` times denser than the fitting grid; ``met``
    records whether the requested tolerance was certified there.  Callers
    may retry with a higher degree: the achieved error is non-increasing
    in the degree up to numerical slack.
    """
    fitter = LeastSquaresFitter(prob.cset, prob.interior_weight, prob.valuation)
    fitter.extend(prob.degree)
    values = [prob.target(z) for z in fitter.points]
    poly = fitter.fit_values(values)
    dense = prob.cset.densified(prob.validation_factor)
    grid = dense.all_samples()
    achieved = _sup_error(prob.target, poly, grid)
    tol = to_mpf(prob.tol)
    return ApproxResult(
        poly=poly,
        achieved_error=achieved,
        requested_tol=tol,
        met=achieved <= tol,
        degree=prob.degree,
        valuation=prob.valuation,
        validation_points=len(grid),
    )


def shifted_fit(prob: ApproxProblem, n: int) -> ApproxResult:
    """Fit the target, then return the monomial-shifted polynomial
    z^n * q(z).

    On the fitted set the shifted residual obeys
    |z^n q - z^n target| <= max(1, d_max)^n * (fit error), and the reported
    achieved_error is that scaled bound; coefficients below index n are
    exactly zero.
    """
    if n < 0:
        raise ValueError("shift must be >= 0")
    base = mergelyan_approximate(prob)
    scale = max(mpf(1), to_mpf(prob.cset.d_max)) ** n
    return ApproxResult(
        poly=base.poly.shifted(n),
        achieved_error=base.achieved_error * scale,
        requested_tol=base.requested_tol,
        met=base.met,
        degree=base.degree + n,
        valuation=n + base.valuation,
        validation_points=base.validation_points,
    )


def fit_to_tolerance(
    target: Callable,
    cset: CompactSet,
    tol,
    degree_ladder: Sequence[int],
    interior_weight: float = 0.25,
    valuation: int = 0,
    validation_factor: int = 4,
) -> ApproxResult:
    """Escalate the fit degree along a ladder until the validation grid
    certifies the tolerance; returns the first certified fit, or the last
    (best-effort, met=False) if the ladder is exhausted.

    The orthogonal basis is grown incrementally, so the total cost is
    dominated by the largest rung actually visited.
    """
    tol = to_mpf(tol)
    fitter = LeastSquaresFitter(cset, interior_weight, valuation)
    values = [target(z) for z in fitter.points]
    dense = cset.densified(validation_factor)
    grid = dense.all_samples()
    best: Optional[ApproxResult] = None
    for degree in degree_ladder:
        fitter.extend(degree)
        poly = fitter.fit_values(values)
        achieved = _sup_error(target, poly, grid)
        result = ApproxResult(
            poly=poly,
            achieved_error=achieved,
            requested_tol=tol,
            met=achieved <= tol,
            degree=degree,
            valuation=valuation,
            validation_points=len(grid),
        )
        if best is None or result.achieved_error < best.achieved_error:
            best = result
        if result.met:
            return result
    return best
