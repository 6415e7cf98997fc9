import numpy as np
import pytest

from curvewind.geometry import RationalBezierCurve, line
from curvewind.moments import (
    AlreadyCentered,
    MixedCentering,
    MomentSet,
    ZeroMeasure,
    center_moments,
    centroid,
    curve_moments,
    dump_moments_csv,
    segment_moments,
    sum_moments,
    uncenter_moments,
)
from curvewind.oracle import quadrature_moments

from conftest import ccw_square_chords


def assert_matches_quadrature(m: MomentSet, a, b, x0, tol=1e-12):
    ref = quadrature_moments((a, b), x0, n=64)
    got = center_moments(m, x0) if not m.is_centered else m
    np.testing.assert_allclose(got.m0, ref.m0, atol=tol)
    np.testing.assert_allclose(got.m1, ref.m1, atol=tol)
    np.testing.assert_allclose(got.m2, ref.m2, atol=tol)


class TestSegmentMoments:
    def test_horizontal_segment_m0(self):
        m = segment_moments((0, 0), (2, 0))
        np.testing.assert_allclose(m.m0, (0, -2), atol=1e-15)

    def test_degenerate_segment_all_zero(self):
        m = segment_moments((1, 2), (1, 2))
        assert np.all(m.m0 == 0) and np.all(m.m1 == 0) and np.all(m.m2 == 0)
        assert m.weight_length == 0

    def test_horizontal_segment_m1(self):
        m = segment_moments((0, 0), (2, 0))
        np.testing.assert_allclose(m.m1, [[0, -2], [0, 0]], atol=1e-14)
        assert_matches_quadrature(m, (0, 0), (2, 0), (0, 0), tol=1e-14)

    def test_random_segments_match_quadrature(self):
        rng = np.random.default_rng(10)
        for _ in range(100):
            a, b = rng.uniform(-5, 5, (2, 2))
            x0 = rng.uniform(-5, 5, 2)
            assert_matches_quadrature(segment_moments(a, b), a, b, x0, tol=1e-11)

    def test_m2_first_index_symmetry(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            a, b = rng.uniform(-5, 5, (2, 2))
            m = segment_moments(a, b)
            np.testing.assert_array_equal(m.m2, np.swapaxes(m.m2, 0, 1))


class TestCurveMoments:
    def test_cubic_uses_chord(self):
        c = RationalBezierCurve([(0, 0), (0, 1), (1, 1), (1, 0)])
        m = curve_moments(c)
        ref = segment_moments((0, 0), (1, 0))
        np.testing.assert_array_equal(m.m0, ref.m0)
        np.testing.assert_array_equal(m.m2, ref.m2)

    def test_line_is_own_chord(self):
        c = line((1, 1), (4, 5))
        m = curve_moments(c)
        ref = segment_moments((1, 1), (4, 5))
        np.testing.assert_array_equal(m.m1, ref.m1)

    def test_closed_square_m0_vanishes(self):
        total = sum_moments([segment_moments(a, b) for a, b in ccw_square_chords()])
        assert np.max(np.abs(total.m0)) < 1e-14


class TestSumMoments:
    def test_doubling(self):
        m = segment_moments((0, 1), (2, 3))
        total = sum_moments([m, m])
        np.testing.assert_allclose(total.m2, 2 * m.m2)
        assert total.weight_length == pytest.approx(2 * m.weight_length)

    def test_empty_sum_is_zero(self):
        z = sum_moments([])
        assert np.all(z.m0 == 0) and z.weight_length == 0

    def test_subdivided_m0_telescopes(self):
        c = RationalBezierCurve([(0, 0), (1, 3), (2, -1), (3, 1)])
        left, right = c.subdivide(0.5)
        parts = sum_moments([curve_moments(left), curve_moments(right)])
        np.testing.assert_allclose(parts.m0, curve_moments(c).m0, atol=1e-14)

    def test_rejects_centered_part(self):
        m = segment_moments((0, 0), (1, 0))
        with pytest.raises(MixedCentering):
            sum_moments([m, center_moments(m, (1, 1))])

    def test_order_independence(self):
        rng = np.random.default_rng(12)
        parts = [segment_moments(*rng.uniform(-4, 4, (2, 2))) for _ in range(30)]
        fwd = sum_moments(parts)
        rev = sum_moments(parts[::-1])
        np.testing.assert_allclose(fwd.m2, rev.m2, atol=1e-13)
        np.testing.assert_allclose(fwd.m1, rev.m1, atol=1e-13)


class TestCenterMoments:
    def test_center_about_origin_is_identity(self):
        m = segment_moments((1, 2), (3, -1))
        c = center_moments(m, (0, 0))
        np.testing.assert_array_equal(c.m1, m.m1)
        np.testing.assert_array_equal(c.m2, m.m2)

    def test_double_centering_rejected(self):
        c = center_moments(segment_moments((0, 0), (1, 0)), (1, 1))
        with pytest.raises(AlreadyCentered):
            center_moments(c, (0, 0))

    def test_symmetric_segment_centered_first_row_vanishes(self):
        # midpoint at the center: the position factor integrates to zero
        m = center_moments(segment_moments((-1, 0), (1, 0)), (0, 0))
        np.testing.assert_allclose(m.m1, np.zeros((2, 2)), atol=1e-15)

    def test_centering_distributes_over_sum(self):
        rng = np.random.default_rng(13)
        parts = [segment_moments(*rng.uniform(-4, 4, (2, 2))) for _ in range(10)]
        x0 = rng.uniform(-4, 4, 2)
        whole = center_moments(sum_moments(parts), x0)
        summed = [center_moments(p, x0) for p in parts]
        m1 = sum(p.m1 for p in summed)
        m2 = sum(p.m2 for p in summed)
        np.testing.assert_allclose(whole.m1, m1, atol=1e-12)
        np.testing.assert_allclose(whole.m2, m2, atol=1e-12)

    def test_uncenter_round_trip(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            a, b = rng.uniform(-4, 4, (2, 2))
            x0 = rng.uniform(-4, 4, 2)
            m = segment_moments(a, b)
            back = uncenter_moments(center_moments(m, x0))
            np.testing.assert_allclose(back.m1, m.m1, atol=1e-12)
            np.testing.assert_allclose(back.m2, m.m2, atol=1e-12)


class TestCentroid:
    def test_single_segment(self):
        np.testing.assert_allclose(centroid(segment_moments((0, 0), (2, 0))), (1, 0))

    def test_two_equal_segments(self):
        parts = sum_moments([segment_moments((-1, -1), (1, 1)), segment_moments((1, 1), (3, 3))])
        np.testing.assert_allclose(centroid(parts), (1, 1), atol=1e-14)

    def test_closed_square_center(self):
        total = sum_moments([segment_moments(a, b) for a, b in ccw_square_chords()])
        np.testing.assert_allclose(centroid(total), (0.5, 0.5), atol=1e-14)

    def test_zero_measure_raises(self):
        with pytest.raises(ZeroMeasure):
            centroid(segment_moments((1, 1), (1, 1)))


def test_dump_csv_round_trips_values():
    m = segment_moments((0, 0), (2, 0))
    text = dump_moments_csv([m], labels=["chord"])
    header, row = text.strip().split("\n")
    assert header.startswith("label,centered,m0x")
    vals = row.split(",")
    assert vals[0] == "chord" and float(vals[3]) == -2.0
