"""Reference laws for the continuum limits: densities, moments, predictions."""
import math

import numpy as np
import pytest
from scipy.integrate import quad

from dissectree import crt_reference as crt


class TestDiameterSeries:
    def test_first_moment_is_exact(self):
        want = 2.0 * math.sqrt(2.0 * math.pi) / 3.0
        assert crt.diam_moment(1) == pytest.approx(want, abs=1e-6)
        assert crt.EXPECTED_DIAMETER == pytest.approx(want, abs=1e-12)

    def test_measured_mass_is_not_one(self):
        # transcription artifact kept verbatim: the series integrates to
        # 1/(2 sqrt(2)), not 1, even though its first moment is exact
        assert crt.diam_moment(0) == pytest.approx(1.0 / (2.0 * math.sqrt(2.0)),
                                                   abs=1e-8)

    def test_vanishes_at_origin_and_far_tail(self):
        assert crt.diameter_density(0.0) == 0.0
        assert crt.diameter_density(-1.0) == 0.0
        assert abs(crt.diameter_density(0.05)) < 1e-6
        assert abs(crt.diameter_density(20.0)) < 1e-6
        assert abs(crt.diameter_density(30.0)) < 1e-12

    def test_bulk_is_positive_with_a_far_negative_dip(self):
        # second transcription artifact: the series turns negative past
        # x ~ 8.2, bottoming near -0.024, before decaying back to zero
        for x in (1.5, 2.0, 2.5, 3.0, 4.0, 8.0):
            assert crt.diameter_density(x) > 0.0
        assert crt.diameter_density(8.3) < 0.0
        assert -0.03 < crt.diameter_density(9.0) < -0.01

    def test_rejects_negative_order(self):
        with pytest.raises(ValueError):
            crt.diam_moment(-1)


class TestRadius:
    def test_closed_moments(self):
        assert crt.radius_moment(0) == 1.0
        assert crt.radius_moment(1) == pytest.approx(math.sqrt(math.pi / 2.0),
                                                     abs=1e-15)
        assert crt.radius_moment(2) == pytest.approx(math.pi ** 2 / 6.0,
                                                     abs=1e-12)

    def test_continuity_at_one(self):
        base = math.sqrt(math.pi / 2.0)
        assert crt.radius_moment(1.0 + 1e-7) == pytest.approx(base, abs=1e-5)
        assert crt.radius_moment(1.0 - 1e-7) == pytest.approx(base, abs=1e-5)

    def test_density_is_a_probability_density(self):
        # the left tail below 1/4 carries less than 1e-30 of the mass, and
        # the series needs ~19/x terms per call there, so start just above 0
        mass, _ = quad(crt.radius_density, 0.25, 12.0, limit=200,
                       epsabs=1e-12, epsrel=1e-12)
        assert mass == pytest.approx(1.0, abs=1e-10)
        for x in np.linspace(0.05, 6.0, 60):
            # cancellation in the deep left tail leaves float-level noise
            assert crt.radius_density(float(x)) >= -1e-12

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_quadrature_oracle(self, p):
        val, _ = quad(lambda x: x ** p * crt.radius_density(x), 0.25, 12.0,
                      limit=200, epsabs=1e-12, epsrel=1e-12)
        assert crt.radius_moment(p) == pytest.approx(val, abs=1e-10)

    def test_rejects_negative_order(self):
        with pytest.raises(ValueError):
            crt.radius_moment(-0.5)


class TestHeightAtUniformTime:
    def test_closed_moments(self):
        assert crt.height_u_moment(0) == pytest.approx(1.0, abs=1e-15)
        assert crt.height_u_moment(1) == pytest.approx(
            0.5 * math.sqrt(math.pi / 2.0), abs=1e-15)
        assert crt.height_u_moment(2) == pytest.approx(0.5, abs=1e-15)
        assert crt.EXPECTED_HEIGHT_U == pytest.approx(crt.height_u_moment(1),
                                                      abs=1e-15)

    @pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 3.0])
    def test_quadrature_oracle(self, p):
        val, _ = quad(lambda x: x ** p * crt.height_u_density(x), 0.0, 10.0,
                      limit=200, epsabs=1e-13, epsrel=1e-13)
        assert crt.height_u_moment(p) == pytest.approx(val, abs=1e-10)

    def test_density_shape(self):
        mass, _ = quad(crt.height_u_density, 0.0, 10.0, limit=200)
        assert mass == pytest.approx(1.0, abs=1e-10)
        assert crt.height_u_density(-0.5) == 0.0
        assert crt.height_u_density(0.0) == 0.0
        # the mode sits at 1/2
        assert crt.height_u_density(0.5) > crt.height_u_density(0.3)
        assert crt.height_u_density(0.5) > crt.height_u_density(0.8)

    def test_rejects_negative_order(self):
        with pytest.raises(ValueError):
            crt.height_u_moment(-2)


class TestPredictions:
    def test_uniform_diameter_constant(self, uniform):
        want = (3.0 + math.sqrt(2.0)) * 2.0 ** 2.25 * math.sqrt(math.pi) / 21.0
        got = crt.predict(uniform, "diameter", 1)
        assert got == pytest.approx(want, abs=1e-6)
        assert got == pytest.approx(1.7723, abs=2e-4)

    def test_binary_radius_constant(self, tri):
        # (2 sqrt(2)/3) * sqrt(pi/2) = 2 sqrt(pi) / 3
        got = crt.predict(tri, "radius", 1)
        assert got == pytest.approx(2.0 * math.sqrt(math.pi) / 3.0, abs=1e-12)
        assert got == pytest.approx(1.181636, abs=1e-6)

    def test_binary_loop_constants(self, tri):
        want_loop = 2.0 * crt.EXPECTED_DIAMETER
        want_bar = 1.0 * crt.EXPECTED_DIAMETER
        assert crt.predict(tri, "loop_diameter", 1) == pytest.approx(
            want_loop, abs=1e-6)
        assert crt.predict(tri, "loopbar_diameter", 1) == pytest.approx(
            want_bar, abs=1e-6)

    def test_tree_diameter_uses_tree_constant(self, tri):
        want = 2.0 * math.sqrt(2.0) * crt.EXPECTED_DIAMETER
        assert crt.predict(tri, "tree_diameter", 1) == pytest.approx(want,
                                                                     abs=1e-6)

    def test_height_u_constant(self, tri):
        want = (2.0 * math.sqrt(2.0) / 3.0) * 0.5 * math.sqrt(math.pi / 2.0)
        assert crt.predict(tri, "height_u", 1) == pytest.approx(want,
                                                                abs=1e-12)

    def test_second_moment_composition(self, tri):
        from dissectree.offspring import constants
        c = constants(tri).c
        assert crt.predict(tri, "radius", 2) == pytest.approx(
            c ** 2 * math.pi ** 2 / 6.0, abs=1e-12)

    def test_unknown_statistic_rejected(self, tri):
        with pytest.raises(ValueError):
            crt.predict(tri, "girth", 1)
