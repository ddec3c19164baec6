import math

import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpc, mpf

from utaylor.geometry import (
    ApproachRegion,
    CompactSet,
    DomainDesc,
    connected_complement_check,
    disc_set,
    lens_set,
    rectangle_set,
    region_samples,
    segment_set,
    tangent_disc,
    union_set,
)
from utaylor.potential import poisson_kernel


class TestApproachRegion:
    def test_boundary_strictness_at_origin(self):
        # alpha (1 - |0|) equals alpha t exactly: strict inequality fails
        r = ApproachRegion(1, 2, 1)
        assert not r.membership(0)

    def test_interior_point(self):
        assert ApproachRegion(1, 2, 1).membership(0.5)

    def test_depth_cut(self):
        assert not ApproachRegion(1, 2, 0.1).membership(0.5)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            ApproachRegion(1, 1.0, 0.5)
        with pytest.raises(ValueError):
            ApproachRegion(1, 2.0, 0.0)
        with pytest.raises(ValueError):
            ApproachRegion(0.5, 2.0, 0.5)


class TestRegionSamples:
    def test_single_sample_is_member(self):
        r = ApproachRegion(1, 2, 1)
        pts = region_samples(r, 1, 1)
        assert len(pts) == 1 and r.membership(pts[0])

    def test_all_members_and_counts(self):
        r = ApproachRegion(mp.exp(1j * mpf("0.7")), 3, 0.5)
        pts = region_samples(r, 4, 7)
        assert len(pts) == 28
        assert all(r.membership(z) for z in pts)

    def test_strata_moduli(self):
        r = ApproachRegion(1, 2, 1)
        pts = region_samples(r, 3, 5)
        for m in range(1, 4):
            for z in pts[(m - 1) * 5 : m * 5]:
                assert abs((1 - abs(z)) - mpf(2) ** (-m)) < mpf(2) ** (-200)

    @settings(max_examples=20, deadline=None)
    @given(
        st.floats(min_value=1.1, max_value=8.0),
        st.floats(min_value=0.05, max_value=1.0),
        st.integers(min_value=1, max_value=5),
        st.integers(min_value=1, max_value=9),
    )
    def test_membership_property(self, alpha, t, depth, per_level):
        r = ApproachRegion(1j, alpha, t)
        pts = region_samples(r, depth, per_level)
        assert all(r.membership(z) for z in pts)


class TestTangentDisc:
    def test_level_one(self):
        c, r = tangent_disc(1, 1)
        assert abs(c - mpf(1) / 2) < 1e-30 and abs(r - mpf(1) / 2) < 1e-30

    def test_internal_tangency(self):
        for zeta in (1, mp.exp(2j), -1j):
            for level in (0.5, 1, 4):
                c, r = tangent_disc(zeta, level)
                assert abs(c + r * zeta - zeta) < 1e-30

    def test_small_level_fills_disc(self):
        c, r = tangent_disc(1, 1e-8)
        assert abs(c) < 1e-7 and abs(r - 1) < 1e-7

    def test_boundary_is_level_set(self):
        # P(., zeta) equals the level on the tangent circle
        zeta = mp.exp(1j * mpf("0.3"))
        c, r = tangent_disc(zeta, 2)
        worst = mpf(0)
        for i in range(1000):
            th = 2 * mp.pi * (i + 0.5) / 1000
            z = c + r * mp.exp(1j * th)
            if abs(z) < 1:
                worst = max(worst, abs(poisson_kernel(z, zeta) - 2))
        assert worst < 1e-10

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            tangent_disc(1, 0)
        with pytest.raises(ValueError):
            tangent_disc(0.7, 1)


class TestCompactSets:
    def test_disc_samples_on_circle(self):
        cs = disc_set("d", 1 + 1j, 0.5, n_boundary=32, n_interior=10)
        for z in cs.boundary_samples:
            assert abs(abs(z - (1 + 1j)) - 0.5) < 1e-12
        for z in cs.interior_samples:
            assert abs(z - (1 + 1j)) < 0.5

    def test_d_max_is_sample_max(self):
        cs = disc_set("d", 2, 0.25, n_boundary=64)
        assert abs(cs.d_max - max(abs(z) for z in cs.all_samples())) == 0

    def test_densified_scales_counts(self):
        cs = disc_set("d", 0, 1, n_boundary=16, n_interior=4)
        dense = cs.densified(4)
        assert len(dense.boundary_samples) >= 4 * len(cs.boundary_samples) - 8
        assert dense.kind == "disc"

    def test_rectangle_and_segment(self):
        rect = rectangle_set("r", 0, 1, 2, n_per_side=8, n_interior=9)
        assert all(
            abs(z.real) <= 1 + 1e-12 and abs(z.imag) <= 2 + 1e-12
            for z in rect.all_samples()
        )
        seg = segment_set("s", -1, 1j, n_points=10, end_ladder_levels=3)
        assert len(seg.boundary_samples) == 16

    def test_lens_inside_strip(self):
        lens = lens_set("a", bulge=0.35, n_boundary=64, n_interior=32, tip_ladder_levels=8)
        for z in lens.all_samples():
            assert abs(z.real) < 1  # tips excluded
            assert abs(z.imag) <= 0.35 + 1e-9

    def test_roundtrip_dict(self):
        cs = union_set(
            "u", [disc_set("a", 0, 1, 16), rectangle_set("b", 2, 0.5, 0.5, 8)]
        )
        again = CompactSet.from_dict(cs.to_dict())
        assert again.kind == "union"
        assert len(again.all_samples()) == len(cs.all_samples())


class TestConnectedComplement:
    def test_single_disc_passes(self):
        assert connected_complement_check([disc_set("d", 0, 1, 64)], grid_n=64) == "pass"

    def test_two_discs_pass(self):
        sets = [disc_set("a", 0, 0.5, 64), disc_set("b", 2, 0.5, 64)]
        assert connected_complement_check(sets, grid_n=64) == "pass"

    def test_annulus_of_discs_fails(self):
        ring = []
        for i in range(24):
            th = 2 * math.pi * i / 24
            ring.append(
                disc_set(f"r{i}", complex(math.cos(th), math.sin(th)), 0.2, 16)
            )
        verdict = connected_complement_check(ring, grid_n=128)
        assert verdict == "fail"

    def test_adding_set_never_rescues_failure(self):
        ring = [
            disc_set(f"r{i}", complex(math.cos(t), math.sin(t)), 0.2, 16)
            for i in range(24)
            for t in [2 * math.pi * i / 24]
        ]
        extra = ring + [disc_set("x", 3, 0.3, 16)]
        assert connected_complement_check(extra, grid_n=128) == "fail"

    def test_min_grid_enforced(self):
        with pytest.raises(ValueError):
            connected_complement_check([disc_set("d", 0, 1, 16)], grid_n=32)


class TestDomains:
    def test_unit_disc_consistency(self):
        dom = DomainDesc.unit_disc()
        assert dom.validate_consistency()

    def test_disc_nearest(self):
        import numpy as np

        dom = DomainDesc.disc(1 + 0j, 0.5)
        pts = np.array([1.2 + 0.1j])
        near = dom.nearest_np(pts)
        assert abs(abs(near[0] - 1) - 0.5) < 1e-12

    def test_strip(self):
        dom = DomainDesc.strip()
        assert dom.inside(0.99) and not dom.inside(1.01)
        assert dom.distance(0) == 1.0

    def test_psi_region(self):
        dom = DomainDesc.psi_region(lambda t: t**2, lipschitz=2.0)
        assert dom.inside(complex(0.998, 0.06))
        assert not dom.inside(0.5)
        assert dom.validate_consistency()
