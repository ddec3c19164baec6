import math

import numpy as np
import pytest
from mpmath import mp, mpf

from utaylor.geometry import DomainDesc
from utaylor.potential import PreconditionError
from utaylor.wos import (
    harmonic_measure,
    modified_measure_functional,
    poisson_integral_np,
)

DISC = DomainDesc.unit_disc()


def test_total_mass_exact():
    est = harmonic_measure(DISC, 0.3 + 0.1j, lambda p: np.ones_like(p, float), 2000, seed=5)
    assert est.functional_value == 1.0
    assert est.confidence_radius == 0.0
    assert est.discarded == 0


def test_symmetry_at_origin():
    est = harmonic_measure(DISC, 0, lambda p: np.real(p), 20000, seed=9)
    assert abs(est.functional_value) <= max(est.confidence_radius, 1e-3)


def test_half_circle_indicator_matches_poisson():
    z = 0.5
    phi = lambda p: (np.real(p) > 0).astype(float)
    est = harmonic_measure(DISC, z, phi, 100_000, seed=13)
    oracle = poisson_integral_np(z, lambda t: (np.cos(t) > 0).astype(float))
    assert abs(est.functional_value - oracle) <= est.confidence_radius


def test_determinism():
    phi = lambda p: np.real(p) ** 2
    a = harmonic_measure(DISC, 0.2j, phi, 5000, seed=42)
    b = harmonic_measure(DISC, 0.2j, phi, 5000, seed=42)
    assert a == b
    c = harmonic_measure(DISC, 0.2j, phi, 5000, seed=43)
    assert c.functional_value != a.functional_value


def test_start_point_validation():
    with pytest.raises(PreconditionError):
        harmonic_measure(DISC, 1.5, lambda p: np.real(p), 100, seed=1)


def test_scalar_phi_fallback():
    est = harmonic_measure(DISC, 0.1, lambda p: abs(p) ** 2, 500, seed=2)
    assert abs(est.functional_value - 1.0) < 1e-9  # |endpoint| = 1 on the circle


class TestModifiedMeasure:
    U = DomainDesc.disc(0.75, 0.25)

    def test_total_mass_within_confidence(self):
        est = modified_measure_functional(
            self.U, 0.75, lambda p: np.ones_like(p, float), 100_000, seed=21
        )
        assert abs(est.functional_value - 1.0) <= est.confidence_radius

    def test_positivity(self):
        est = modified_measure_functional(
            self.U, 0.7, lambda p: np.abs(np.imag(p)), 20_000, seed=22
        )
        assert est.functional_value >= -est.confidence_radius

    def test_two_estimators_agree(self):
        # integral of log(1/|zeta|) against the reweighted measure equals the
        # integral of its square against plain harmonic measure over log(1/|z|)
        z = 0.78
        phi_log = lambda p: np.log(1.0 / np.abs(p))
        a = modified_measure_functional(self.U, z, phi_log, 100_000, seed=23)
        b = harmonic_measure(self.U, z, lambda p: np.log(1.0 / np.abs(p)) ** 2, 100_000, seed=24)
        b_scaled = b.functional_value / float(mp.log(1 / mpf(z)))
        tol = a.confidence_radius + 3 * b.confidence_radius / float(mp.log(1 / mpf(z)))
        assert abs(a.functional_value - b_scaled) <= tol

    def test_origin_in_closure_rejected(self):
        bad = DomainDesc.disc(0.1, 0.2)
        with pytest.raises(PreconditionError):
            modified_measure_functional(bad, 0.15, lambda p: np.real(p), 100, seed=1)


def test_strip_domain_walks_terminate():
    dom = DomainDesc.strip()
    est = harmonic_measure(dom, 0.0, lambda p: (np.real(p) > 0).astype(float), 20_000, seed=31)
    # symmetric strip: exit through either wall with probability 1/2
    assert abs(est.functional_value - 0.5) <= max(est.confidence_radius, 0.02)
    assert not est.inconclusive
