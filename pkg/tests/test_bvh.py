"""BVH construction, moment sweeps, and the far-sphere test."""

import io
import json
import math

import numpy as np
import pytest

from curvewind import bvh, moments
from curvewind.geometry import RationalBezierCurve, line
from curvewind.svg import parse_svg_paths, shape_from_curves
from conftest import random_curve, unit_circle_curves


def _tree(curves):
    return bvh.build(shape_from_curves(curves))


def segments_on_a_line(n=4):
    return [line((2.0 * i, 0.0), (2.0 * i + 1.0, 0.0), i) for i in range(n)]


class TestConstruction:
    def test_single_leaf(self):
        c = line((0.0, 0.0), (3.0, 4.0), 0)
        tree = _tree([c])
        assert len(tree) == 1
        assert tree.leaf_count == 1
        root = tree.root
        assert root.is_leaf and root.curve is c
        assert root.radius == pytest.approx(0.5 * 5.0)    # half the box diagonal

    def test_four_segments_make_seven_nodes(self):
        tree = _tree(segments_on_a_line(4))
        assert len(tree) == 7
        assert tree.leaf_count == 4
        internal = sum(1 for n in tree.nodes() if not n.is_leaf)
        assert internal == 3

    def test_every_curve_in_exactly_one_leaf(self):
        rng = np.random.default_rng(2)
        curves = [random_curve(rng, degree=3) for _ in range(33)]
        for i, c in enumerate(curves):
            c.id = i
        tree = _tree(curves)
        seen = sorted(leaf.curve.id for leaf in tree.leaves())
        assert seen == list(range(33))

    def test_parent_boxes_contain_children(self):
        rng = np.random.default_rng(3)
        curves = [random_curve(rng, degree=2) for _ in range(40)]
        for i, c in enumerate(curves):
            c.id = i
        tree = _tree(curves)
        for node in tree.nodes():
            if node.is_leaf:
                continue
            for child in node.children_nodes:
                assert np.all(node.box.min <= child.box.min)
                assert np.all(node.box.max >= child.box.max)

    def test_depth_bound(self):
        rng = np.random.default_rng(4)
        for count in (1, 2, 3, 7, 16, 33, 100):
            curves = [random_curve(rng, degree=1) for _ in range(count)]
            for i, c in enumerate(curves):
                c.id = i
            tree = _tree(curves)
            assert tree.max_depth_reached <= math.ceil(math.log2(max(count, 1))) + 2

    def test_rebuild_determinism(self):
        shape = parse_svg_paths("M 0 0 C 0 9 9 9 9 0 A 3 2 15 1 0 -4 -4 Z")
        a, b = bvh.build(shape), bvh.build(shape)
        for name in ("boxes", "children", "leaf_curve", "centroids", "radii",
                     "m0", "m1", "m2", "packed"):
            np.testing.assert_array_equal(getattr(a, name), getattr(b, name))

    def test_empty_shape_rejected(self):
        with pytest.raises(bvh.EmptyShape):
            bvh.build(shape_from_curves([]))


class TestMoments:
    def test_root_m0_is_sum_of_leaf_chords(self):
        # m0 does not change under centering, so the root's m0 must equal the
        # plain sum of chord m0 over all curves
        segs = segments_on_a_line(4)
        tree = _tree(segs)
        total = moments.sum_moments([moments.curve_moments(c) for c in segs])
        np.testing.assert_allclose(tree.root.moments.m0, total.m0, atol=1e-12)

    def test_uncentered_reconstruction_matches_descendant_sums(self):
        rng = np.random.default_rng(7)
        curves = [random_curve(rng, degree=3) for _ in range(25)]
        for i, c in enumerate(curves):
            c.id = i
        tree = _tree(curves)

        def descendants(node):
            if node.is_leaf:
                return [node.curve]
            l, r = node.children_nodes
            return descendants(l) + descendants(r)

        for node in tree.nodes():
            expect = moments.sum_moments([moments.curve_moments(c) for c in descendants(node)])
            got = moments.uncenter_moments(node.moments)
            scale = max(np.abs(expect.m2).max(), 1.0)
            np.testing.assert_allclose(got.m0, expect.m0, atol=1e-12)
            np.testing.assert_allclose(got.m1, expect.m1, atol=1e-12 * scale)
            np.testing.assert_allclose(got.m2, expect.m2, atol=1e-12 * scale)

    def test_node_moments_centered_at_centroid(self):
        tree = _tree(unit_circle_curves())
        for node in tree.nodes():
            m = node.moments
            assert m.is_centered
            np.testing.assert_array_equal(m.centered_about, node.centroid)

    def test_leaf_moments_match_curve_chord(self):
        rng = np.random.default_rng(8)
        curves = [random_curve(rng, degree=2) for _ in range(9)]
        for i, c in enumerate(curves):
            c.id = i
        tree = _tree(curves)
        for leaf in tree.leaves():
            expect = moments.center_moments(moments.curve_moments(leaf.curve), leaf.centroid)
            got = leaf.moments
            np.testing.assert_allclose(got.m1, expect.m1, atol=1e-12)
            np.testing.assert_allclose(got.m2, expect.m2, atol=1e-12)

    def test_packed_coefficients_match_tensors(self):
        from curvewind.taylor import pack_coefficients
        tree = _tree(unit_circle_curves())
        for i, node in enumerate(tree.nodes()):
            m = node.moments
            np.testing.assert_array_equal(tree.packed[i],
                                          pack_coefficients(m.m0, m.m1, m.m2))

    def test_zero_measure_node_uses_box_center(self):
        loop = RationalBezierCurve([(0, 0), (2, 3), (2, -3), (0, 0)], np.ones(4), 0)
        tree = _tree([loop])
        root = tree.root
        np.testing.assert_array_equal(root.centroid, root.box.center)
        assert not np.any(root.moments.m0)


class TestIsFar:
    def _unit_radius_node(self):
        # box 1.2 x 1.6 has diagonal 2.0; chord midpoint sits at the origin
        tree = _tree([line((-0.6, -0.8), (0.6, 0.8), 0)])
        node = tree.root
        assert node.radius == pytest.approx(1.0)
        np.testing.assert_allclose(node.centroid, [0.0, 0.0], atol=1e-15)
        return node

    def test_strictly_outside(self):
        assert bvh.is_far(self._unit_radius_node(), (2.1, 0.0), 2.0)

    def test_boundary_is_near(self):
        assert not bvh.is_far(self._unit_radius_node(), (2.0, 0.0), 2.0)

    def test_infinite_beta_never_far(self):
        node = self._unit_radius_node()
        assert not bvh.is_far(node, (1e12, 1e12), math.inf)
        point_tree = _tree([RationalBezierCurve([(1, 1), (1, 1)], np.ones(2), 0)])
        # zero-radius node: inf * 0 must not slip through as nan
        assert not bvh.is_far(point_tree.root, (5.0, 5.0), math.inf)

    def test_beta_validation(self):
        with pytest.raises(ValueError):
            bvh.is_far(self._unit_radius_node(), (1.0, 1.0), 0.0)


def test_dump_tree_json():
    tree = _tree(segments_on_a_line(4))
    buf = io.StringIO()
    bvh.dump_tree(tree, buf)
    data = json.loads(buf.getvalue())
    assert data["leaf_count"] == 4
    assert len(data["nodes"]) == 7
    kinds = ["curve_id" in n for n in data["nodes"]]
    assert sum(kinds) == 4
    assert data["nodes"][0]["depth"] == 0
