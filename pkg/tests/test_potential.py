import math

import numpy as np
import pytest
from mpmath import mp, mpc, mpf

from utaylor.geometry import DomainDesc
from utaylor.potential import (
    ArcOnCircle,
    DomainError,
    MINIMALLY_THIN,
    NOT_MINIMALLY_THIN,
    PreconditionError,
    green_arc_complement,
    green_arc_complement_np,
    green_disc,
    minthin_psi_test,
    poisson_kernel,
    psi_j_barrier,
    superharmonicity_check,
)
from utaylor.quadrature import Quadrature


class TestPoissonKernel:
    def test_center(self):
        assert poisson_kernel(0, 1) == 1
        assert poisson_kernel(0, 1j) == 1

    def test_half(self):
        assert abs(poisson_kernel(0.5, 1) - 3) < 1e-70

    def test_point_nine(self):
        assert abs(poisson_kernel(mpf("0.9"), 1) - 19) < 1e-70

    def test_outside_rejected(self):
        with pytest.raises(DomainError):
            poisson_kernel(1.0, 1)
        with pytest.raises(DomainError):
            poisson_kernel(0.5, 0.8)

    def test_positive_and_total_mass(self):
        # trapezoid over the circle reproduces total mass 1
        for z in (0.3 + 0.2j, -0.7j, 0.95):
            thetas = np.linspace(0, 2 * math.pi, 4096, endpoint=False)
            vals = [float(poisson_kernel(z, complex(np.cos(t), np.sin(t)))) for t in thetas[::64]]
            assert all(v > 0 for v in vals)
            kernel = (1 - abs(z) ** 2) / np.abs(z - np.exp(1j * thetas)) ** 2
            assert abs(np.mean(kernel) - 1) < 1e-6


class TestGreenDisc:
    def test_values(self):
        assert abs(green_disc(mp.exp(-1)) - 1) < 1e-70
        assert abs(green_disc(mpf(1) / 2) - mp.log(2)) < 1e-70

    def test_boundary_limit(self):
        assert green_disc(mpf("0.999999")) < 1e-5

    def test_domain_errors(self):
        for bad in (0, 1, 1.5):
            with pytest.raises(DomainError):
                green_disc(bad)


class TestGreenArcComplement:
    arc = ArcOnCircle(-math.pi / 3, math.pi / 3)

    def test_zero_on_arc(self):
        assert green_arc_complement(mp.exp(1j * mpf("0.2")), self.arc) == 0

    def test_positive_off_arc(self):
        for z in (0, 2, -1, 0.5 + 0.5j, 1j):
            assert green_arc_complement(z, self.arc) > 0

    def test_reflection_symmetry(self):
        z = mpc("0.4", "0.33")
        g1 = green_arc_complement(z, self.arc)
        g2 = green_arc_complement(mp.conj(z), self.arc)
        assert abs(g1 - g2) < 1e-40

    def test_capacity_asymptote(self):
        # G(R) - log R tends to log(1/sin(beta/2)): capacity of the arc
        for beta in (math.pi / 6, math.pi / 3, 2 * math.pi / 3):
            arc = ArcOnCircle(-beta, beta)
            R = mpf(10) ** 6
            g = green_arc_complement(R, arc)
            expected = -mp.log(mp.sin(mpf(beta) / 2))
            assert abs(g - mp.log(R) - expected) < 1e-3

    def test_dominates_log_modulus(self):
        # capacity <= 1 always, so G(z) >= log |z| outside the unit circle
        for z in (1.5, 2 + 1j, -3, 10j):
            assert green_arc_complement(z, self.arc) >= mp.log(abs(mpc(z))) - mpf(1e-30)

    def test_decreases_to_zero_along_normal(self):
        # moving inward along the normal toward the arc midpoint
        vals = [
            green_arc_complement(r, self.arc) for r in (mpf("0.9"), mpf("0.99"), mpf("0.999"))
        ]
        assert vals[0] > vals[1] > vals[2] > 0

    def test_numpy_variant_agrees(self):
        zs = np.array([2 + 1j, -3 + 0.5j, 0.2 + 0.1j, 5.0 + 0j, -0.9j])
        gn = green_arc_complement_np(zs, self.arc)
        gm = [float(green_arc_complement(mpc(z), self.arc)) for z in zs]
        assert np.max(np.abs(gn - np.array(gm))) < 1e-10


class TestPsiBarrier:
    arc = ArcOnCircle(-0.5, 0.5)

    def test_inner_value(self):
        assert psi_j_barrier(0.3, 2, self.arc) == mpf(-1) / 2

    def test_outer_positive(self):
        v = psi_j_barrier(mpf("0.75"), 3, self.arc)
        assert v > 0

    def test_piecewise_boundary(self):
        j = 4
        inner = psi_j_barrier(mpf(1) - mpf(1) / j - mpf("1e-20"), j, self.arc)
        outer = psi_j_barrier(mpf(1) - mpf(1) / j, j, self.arc)
        assert inner == mpf(-1) / 2
        assert outer > 0

    def test_limit_reached_once_annulus_excludes_point(self):
        # fixed z: the barrier sits at its limit value -1/2 as soon as
        # 1 - 1/j exceeds |z|; before that it takes the positive ratio
        z = mpf("0.6")
        assert psi_j_barrier(z, 2, self.arc) > 0
        assert psi_j_barrier(z, 3, self.arc) == mpf(-1) / 2
        assert psi_j_barrier(z, 50, self.arc) == mpf(-1) / 2

    def test_rejects_outside(self):
        with pytest.raises(DomainError):
            psi_j_barrier(1.5, 3, self.arc)
        with pytest.raises(ValueError):
            psi_j_barrier(0.5, 1, self.arc)


class TestMinimalThinness:
    def test_power_family_verdicts(self):
        verdicts = {}
        for a in (0.5, 1.0, 1.5, 2.0):
            verdicts[a] = minthin_psi_test(lambda t, a=a: t**a).verdict
        assert verdicts[0.5] == NOT_MINIMALLY_THIN
        assert verdicts[1.0] == NOT_MINIMALLY_THIN
        assert verdicts[1.5] == MINIMALLY_THIN
        assert verdicts[2.0] == MINIMALLY_THIN

    def test_constant_psi_divergent(self):
        assert minthin_psi_test(lambda t: 1.0).verdict == NOT_MINIMALLY_THIN

    def test_profile_validation(self):
        with pytest.raises(PreconditionError):
            minthin_psi_test(lambda t: 2 * t)  # exceeds 1
        with pytest.raises(PreconditionError):
            minthin_psi_test(lambda t: 1 - t)  # decreasing


class TestSuperharmonicity:
    def test_green_pole_superharmonic(self):
        dom = DomainDesc.unit_disc()
        rep = superharmonicity_check(
            lambda z: mp.log(1 / abs(z)) if abs(z) > 0 else mpf(700),
            dom,
            trials=40,
            seed=7,
        )
        assert rep.violations == 0

    def test_clamped_kernel_superharmonic(self):
        dom = DomainDesc.unit_disc()
        level = mpf(2)
        rep = superharmonicity_check(
            lambda z: min(poisson_kernel(z, 1), level),
            dom,
            trials=40,
            seed=11,
        )
        assert rep.violations == 0

    def test_modulus_squared_subharmonic(self):
        dom = DomainDesc.unit_disc()
        rep = superharmonicity_check(lambda z: abs(z) ** 2, dom, trials=40, seed=3)
        assert rep.violations == rep.trials
