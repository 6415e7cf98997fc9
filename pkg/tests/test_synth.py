"""Generators for test geometry: watertightness, orientation, determinism."""

import math

import numpy as np
import pytest

from curvewind import direct, synth
from curvewind.oracle import shape_polyline_winding


class TestArcPrimitives:
    def test_points_on_circle(self):
        arc = synth.circular_arc(0.3, 0.3 + 1.2, radius=2.0, center=(1.0, -0.5))
        pts = arc.evaluate_many(np.linspace(0.0, 1.0, 33))
        r = np.hypot(pts[:, 0] - 1.0, pts[:, 1] + 0.5)
        np.testing.assert_allclose(r, 2.0, atol=1e-12)

    def test_endpoints_exact(self):
        arc = synth.circular_arc(0.0, 0.5 * math.pi)
        np.testing.assert_array_equal(arc.first, [1.0, 0.0])
        np.testing.assert_allclose(arc.last, [0.0, 1.0], atol=1e-16)

    def test_rejects_wide_span(self):
        with pytest.raises(ValueError):
            synth.circular_arc(0.0, 0.51 * math.pi)

    def test_circle_chains_and_winds(self):
        curves = synth.circle(radius=1.5, center=(0.2, 0.1))
        for a, b in zip(curves, curves[1:] + curves[:1]):
            np.testing.assert_array_equal(a.last, b.first)
        w, _ = direct.curve_winding((0.2, 0.1), curves[0]), None
        total = sum(direct.curve_winding((0.2, 0.1), c) for c in curves)
        assert total == pytest.approx(1.0, abs=1e-12)
        outside = sum(direct.curve_winding((5.0, 5.0), c) for c in curves)
        assert outside == pytest.approx(0.0, abs=1e-12)

    def test_clockwise_circle(self):
        curves = synth.circle(clockwise=True)
        total = sum(direct.curve_winding((0.0, 0.0), c) for c in curves)
        assert total == pytest.approx(-1.0, abs=1e-12)


class TestPolygonsAndBlobs:
    def test_polygon_closure(self):
        curves = synth.regular_polygon(7, radius=1.2, phase=0.3)
        assert len(curves) == 7
        for a, b in zip(curves, curves[1:] + curves[:1]):
            np.testing.assert_array_equal(a.last, b.first)
        total = sum(direct.curve_winding((0.0, 0.0), c) for c in curves)
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_blob_watertight(self):
        rng = np.random.default_rng(11)
        curves = synth.blob(rng)
        for a, b in zip(curves, curves[1:] + curves[:1]):
            np.testing.assert_array_equal(a.last, b.first)
        queries = rng.uniform(-2.0, 2.0, size=(60, 2))
        w, flags = direct.direct_field(queries, curves)
        ok = ~flags
        assert np.abs(w[ok] - np.round(w[ok])).max() < 1e-9

    def test_stacked_polygons_wind_k(self):
        rng = np.random.default_rng(12)
        for k in (1, 3):
            shape = synth.stacked_polygons(k, rng)
            w, _ = direct.direct_field(np.array([[0.0, 0.0]]), shape.curves)
            assert w[0] == pytest.approx(k, abs=1e-9)

    def test_opened_loop_breaks_integrality(self):
        rng = np.random.default_rng(13)
        shape = synth.opened_loop(rng)
        assert len(shape.curves) == 7
        center = shape.global_aabb.center
        w, _ = direct.direct_field(center[None, :], shape.curves)
        assert abs(w[0] - round(w[0])) > 1e-3


class TestShapeCollections:
    def test_ten_named_shapes(self):
        shapes = synth.constructed_shapes(np.random.default_rng(14))
        assert len(shapes) == 10
        names = [name for name, _ in shapes]
        assert len(set(names)) == 10
        for _, shape in shapes:
            assert len(shape) > 0
            assert shape.global_aabb.diagonal > 0

    def test_nesting_conventions(self):
        shapes = dict(synth.constructed_shapes(np.random.default_rng(15)))
        w, _ = direct.direct_field(np.array([[0.0, 0.0]]), shapes["nested-rings"].curves)
        assert w[0] == pytest.approx(2.0, abs=1e-9)      # two CCW rings stack
        hole = np.array([[0.0, 0.0]])
        annulus = np.array([[0.9, 0.0]])
        curves = shapes["ring-with-hole"].curves
        assert direct.direct_field(hole, curves)[0][0] == pytest.approx(0.0, abs=1e-9)
        assert direct.direct_field(annulus, curves)[0][0] == pytest.approx(1.0, abs=1e-9)

    def test_deterministic_per_seed(self):
        a = synth.constructed_shapes(np.random.default_rng(16))
        b = synth.constructed_shapes(np.random.default_rng(16))
        for (_, sa), (_, sb) in zip(a, b):
            assert len(sa) == len(sb)
            for ca, cb in zip(sa.curves, sb.curves):
                np.testing.assert_array_equal(ca.control_points, cb.control_points)
                np.testing.assert_array_equal(ca.weights, cb.weights)

    def test_small_arcs_scatter(self):
        rng = np.random.default_rng(17)
        shape = synth.random_small_arcs(50, rng, extent=4.0)
        assert len(shape) == 50
        assert sorted(c.id for c in shape.curves) == list(range(50))
        box = shape.global_aabb
        assert np.all(box.min > -4.5) and np.all(box.max < 4.5)


class TestQuerySampler:
    def test_distance_guarantee(self):
        rng = np.random.default_rng(18)
        shape = synth.stacked_polygons(2, rng)
        queries = synth.off_boundary_queries(shape, 300, rng,
                                             min_distance_fraction=5e-3)
        # verify against a denser sampling than the generator used
        ts = np.linspace(0.0, 1.0, 4096)
        cloud = np.vstack([c.evaluate_many(ts) for c in shape.curves])
        from scipy.spatial import cKDTree
        dist, _ = cKDTree(cloud).query(queries, k=1)
        assert dist.min() > 0.98 * 5e-3 * shape.global_aabb.diagonal

    def test_count_and_bounds(self):
        rng = np.random.default_rng(19)
        shape = synth.stacked_polygons(1, rng)
        queries = synth.off_boundary_queries(shape, 77, rng, pad_fraction=0.25)
        assert queries.shape == (77, 2)
        box = shape.global_aabb
        pad = 0.25 * box.diagonal
        assert np.all(queries >= box.min - pad - 1e-12)
        assert np.all(queries <= box.max + pad + 1e-12)

    def test_deterministic(self):
        shape = synth.stacked_polygons(1, np.random.default_rng(20))
        qa = synth.off_boundary_queries(shape, 40, np.random.default_rng(21))
        qb = synth.off_boundary_queries(shape, 40, np.random.default_rng(21))
        np.testing.assert_array_equal(qa, qb)
