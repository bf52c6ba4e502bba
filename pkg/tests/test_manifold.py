import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from holonomy import (
    LoopSpec,
    NotClosed,
    StandardLoopParams,
    TooFewSamples,
    LengthMismatch,
    circle_loop,
    closed_line_integral,
    combined_parameter_loop,
    make_loop,
    periodic_integral,
    standard_parameter_loops,
    subsystem_parameter_loop,
)

EPS_PAPER = math.sqrt(3.0) / 2.0


def unit_circle_3d(n=4096, cycles=1):
    return make_loop(
        lambda t: np.array([math.cos(2 * math.pi * cycles * t), math.sin(2 * math.pi * cycles * t), 0.0]),
        period=1.0,
        n_samples=n,
        cycles=cycles,
    )


def angle_form(loop):
    x, y = loop.points[:, 0], loop.points[:, 1]
    r2 = x**2 + y**2
    c = np.zeros_like(loop.points)
    c[:, 0] = -y / r2
    c[:, 1] = x / r2
    return c


class TestMakeLoop:
    def test_constant_map(self):
        loop = make_loop(lambda t: np.array([1.0, 0.0, 0.0]), 1.0, 16)
        assert loop.n_segments == 16
        assert np.all(loop.points == loop.points[0])

    def test_circle_closure(self):
        loop = unit_circle_3d()
        assert_allclose(loop.points[0], [1.0, 0.0, 0.0], atol=1e-15)
        assert_allclose(loop.points[-1], loop.points[0], atol=1e-12)

    def test_standard_family_value_at_zero(self):
        # X1(0) = a1*mu1*(1 + eps) for the standard drive
        p = StandardLoopParams(a1=2.0, a2=1.0, mu1=3.0, mu2=1.0, n1=1, n2=1,
                               base_rate=1.0, epsilon=EPS_PAPER)
        loop1, _ = standard_parameter_loops(p, 64)
        assert_allclose(loop1.points[0, 0], 2.0 * 3.0 * (1.0 + EPS_PAPER), rtol=1e-15)

    def test_not_closed(self):
        with pytest.raises(NotClosed):
            make_loop(lambda t: np.array([t]), 1.0, 32)

    def test_too_few_samples(self):
        with pytest.raises(TooFewSamples):
            make_loop(lambda t: np.array([1.0]), 1.0, 8)


class TestClosedLineIntegral:
    def test_winding_number(self):
        loop = unit_circle_3d()
        res = closed_line_integral(angle_form(loop), loop)
        assert abs(res.value - 2 * math.pi) < 1e-10
        assert res.error_estimate >= 0.0

    def test_equatorial_connection(self):
        # c = (B2 dB1 - B1 dB2) / (2 B (B + B3)) integrates to -pi on the equator
        loop = unit_circle_3d()
        b1, b2, b3 = loop.points.T
        b = np.sqrt(b1**2 + b2**2 + b3**2)
        denom = 2.0 * b * (b + b3)
        c = np.column_stack([b2 / denom, -b1 / denom, np.zeros_like(b)])
        res = closed_line_integral(c, loop)
        assert abs(res.value + math.pi) < 1e-9

    def test_constant_loop_vanishes(self):
        loop = make_loop(lambda t: np.array([1.0, 2.0, 3.0]), 1.0, 64)
        c = np.ones_like(loop.points)
        assert closed_line_integral(c, loop).value == 0.0

    def test_orientation_reversal_negates(self):
        loop = unit_circle_3d(n=512)
        c = angle_form(loop)
        fwd = closed_line_integral(c, loop).value
        rev = closed_line_integral(c[::-1], loop.reversed()).value
        assert abs(fwd + rev) <= 1e-12 * abs(fwd)

    def test_doubling_samples_converges(self):
        # smooth non-band-limited integrand: rational function on the circle
        def coeffs(loop):
            x, y = loop.points[:, 0], loop.points[:, 1]
            den = 1.0 + 0.5 * x
            c = np.zeros_like(loop.points)
            c[:, 0] = -y / den
            c[:, 1] = x / den
            return c

        v1 = closed_line_integral(coeffs(unit_circle_3d(1024)), unit_circle_3d(1024)).value
        v2 = closed_line_integral(coeffs(unit_circle_3d(2048)), unit_circle_3d(2048)).value
        assert abs(v2 - v1) < 1e-8 * abs(v2)

    def test_length_mismatch(self):
        loop = unit_circle_3d(n=64)
        with pytest.raises(LengthMismatch):
            closed_line_integral(np.zeros((10, 3)), loop)


class TestPeriodicIntegral:
    def test_constant(self):
        res = periodic_integral(np.full(65, 2.5), 2.0)
        assert_allclose(res.value, 5.0, rtol=1e-15)

    def test_smooth_periodic(self):
        t = np.linspace(0, 2 * math.pi, 257)
        res = periodic_integral(1.0 / (2.0 + np.cos(t)), 2 * math.pi)
        assert_allclose(res.value, 2 * math.pi / math.sqrt(3.0), rtol=1e-12)


class TestStandardLoops:
    def test_epsilon_zero_freezes(self):
        p = StandardLoopParams(a1=1.5, a2=1.0, mu1=2.0, mu2=1.0, n1=1, n2=1,
                               base_rate=1.0, epsilon=0.0)
        loop1, _ = standard_parameter_loops(p, 64)
        assert np.all(loop1.points == loop1.points[0])
        assert_allclose(loop1.points[0], [1.5 * 2.0, 0.0, 1.5 / 2.0], rtol=1e-15)

    def test_frequency_invariant_along_loop(self):
        # X Z - Y^2 = a^2 (1 - eps^2) at every sample
        p = StandardLoopParams(a1=1.0, a2=2.0, mu1=1.0, mu2=3.0, n1=2, n2=1,
                               base_rate=1.0, epsilon=EPS_PAPER)
        loop1, loop2 = standard_parameter_loops(p, 512)
        for loop, a in ((loop1, p.a1), (loop2, p.a2)):
            x, y, z = loop.points.T
            assert_allclose(x * z - y**2, a**2 * (1 - EPS_PAPER**2), rtol=1e-12)
        x1, y1, z1 = loop1.points.T
        omega = np.sqrt(x1 * z1 - y1**2)
        assert_allclose(omega, p.a1 / 2.0, rtol=1e-12)  # a1 * sqrt(1 - 3/4)

    def test_common_period_and_cycles(self):
        p = StandardLoopParams(a1=1.0, a2=1.0, mu1=1.0, mu2=1.0, n1=3, n2=2,
                               base_rate=1.0, epsilon=0.3)
        loop1, loop2 = standard_parameter_loops(p, 126)
        assert_allclose(loop1.period, 2 * math.pi, rtol=1e-15)
        assert loop1.cycles == 3 and loop2.cycles == 2
        # loop 1 repeats after a third of the common period
        x1 = loop1.points[:, 0]
        assert_allclose(x1[: 126 // 3], x1[126 // 3 : 2 * 126 // 3], rtol=1e-12)
        sub = subsystem_parameter_loop(p, 1, 128)
        assert_allclose(sub.period, 2 * math.pi / 3.0, rtol=1e-15)

    def test_reduced_pair_required(self):
        with pytest.raises(ValueError):
            StandardLoopParams(a1=1, a2=1, mu1=1, mu2=1, n1=2, n2=4,
                               base_rate=1.0, epsilon=0.1)

    def test_combined_loop_shape(self):
        p = StandardLoopParams(a1=1.0, a2=1.0, mu1=1.0, mu2=1.0, n1=1, n2=1,
                               base_rate=1.0, epsilon=0.2)
        combined = combined_parameter_loop(p, 64)
        assert combined.dim == 6


class TestLoopSpecValidation:
    def test_non_closed_rejected(self):
        t = np.linspace(0, 1, 33)
        pts = np.column_stack([t, t])
        with pytest.raises(NotClosed):
            LoopSpec(1.0, t, pts)

    def test_circle_loop_is_uniform(self):
        loop = circle_loop(n_samples=128)
        assert loop.is_uniform
