import random

import pytest

from mwtrees.construct import draw_tree_pair, lower_strip_ratio
from mwtrees.errors import InvalidEps, NotIsomorphic
from mwtrees.geometry import BETA_INF, Point
from mwtrees.proximity import (
    check_parallelogram_drawing,
    strip_ratio,
    verify,
    verify_universal,
)
from mwtrees.tree_model import (
    RootedTree,
    Tree,
    gen_random_tree,
    isomorphism_map,
)


def rooted(edges, n, root=0):
    return RootedTree.from_tree(Tree(n, tuple(edges)), root)


def assert_universal(d):
    reports = verify_universal(d)
    for rep in reports:
        assert rep.ok, (rep.beta, rep.violations[:3])
    assert check_parallelogram_drawing(d).all_ok


class TestSmall:
    def test_single_vertices_use_reference_parallelogram(self):
        rt = rooted([], 1)
        d = draw_tree_pair(rt, rt)
        ann = d.parallelogram
        assert (ann.a0, ann.b0, ann.a1, ann.b1) == \
            (Point(0, 3), Point(1, 1), Point(3, 0), Point(2, 2))
        assert d.points0 == (Point(0, 3),)
        assert d.points1 == (Point(3, 0),)

    def test_two_vertex_pair(self):
        rt = rooted([(0, 1)], 2)
        d = draw_tree_pair(rt, rt)
        assert_universal(d)

    def test_k12_at_selected_betas(self):
        rt = rooted([(0, 1), (0, 2)], 3)
        d = draw_tree_pair(rt, rt)
        for beta in (1.0, 2.0, BETA_INF):
            assert verify(d, beta, "strict").ok
        assert_universal(d)

    def test_star_and_chain(self):
        assert_universal(draw_tree_pair(rooted([(0, i) for i in range(1, 6)], 6),
                                        rooted([(0, i) for i in range(1, 6)], 6)))
        chain = rooted([(0, 1), (1, 2), (2, 3)], 4)
        assert_universal(draw_tree_pair(chain, chain))

    def test_not_isomorphic_rejected(self):
        a = rooted([(0, 1), (0, 2)], 3)          # rooted at the center
        b = rooted([(0, 1), (1, 2)], 3)          # rooted at an end
        with pytest.raises(NotIsomorphic):
            draw_tree_pair(a, b)


class TestRandomPairs:
    def test_relabeled_pairs(self):
        rng = random.Random(123)
        for trial in range(12):
            n = rng.randint(2, 22)
            t0 = gen_random_tree(n, 50 + trial, max_depth=4)
            perm = list(range(n))
            rng.shuffle(perm)
            t1 = Tree(n, tuple((perm[u], perm[v]) for u, v in t0.edges))
            r1, _ = isomorphism_map(t0, t1, 0)
            d = draw_tree_pair(RootedTree.from_tree(t0, 0),
                               RootedTree.from_tree(t1, r1))
            assert_universal(d)

    def test_depth_five(self):
        t = gen_random_tree(28, 314, max_depth=5)
        rt = RootedTree.from_tree(t, 0)
        d = draw_tree_pair(rt, rt)
        assert_universal(d)

    def test_coordinates_independent_of_beta(self):
        # one drawing serves every beta: the points never change
        rt = RootedTree.from_tree(gen_random_tree(12, 9, max_depth=3), 0)
        d = draw_tree_pair(rt, rt)
        again = draw_tree_pair(rt, rt)
        assert d.points0 == again.points0 and d.points1 == again.points1

    def test_extraction_round_trip_at_every_beta(self):
        from mwtrees.proximity import extract_mw_graphs
        rt = RootedTree.from_tree(gen_random_tree(14, 21, max_depth=3), 0)
        d = draw_tree_pair(rt, rt)
        for beta in (1.0, 2.0, 10.0, BETA_INF):
            for closed in (True, False):
                e0, e1 = extract_mw_graphs(d.points0, d.points1, beta, closed)
                assert set(e0) == set(d.edges0)
                assert set(e1) == set(d.edges1)


class TestStripRatio:
    def setup_method(self):
        rt = RootedTree.from_tree(gen_random_tree(8, 100, max_depth=2), 0)
        self.d = draw_tree_pair(rt, rt)

    def test_already_small_is_unchanged(self):
        sigma = strip_ratio(self.d)
        out = lower_strip_ratio(self.d, sigma * 2)
        assert out is self.d

    @pytest.mark.parametrize("eps", [0.1, 0.01, 0.001])
    def test_lowering_keeps_validity(self, eps):
        out = lower_strip_ratio(self.d, eps)
        assert strip_ratio(out) < eps
        assert_universal(out)

    def test_idempotent_once_below(self):
        out = lower_strip_ratio(self.d, 0.01)
        again = lower_strip_ratio(out, 0.01)
        assert again is out

    def test_x_order_preserved(self):
        out = lower_strip_ratio(self.d, 0.001)
        for before, after in ((self.d.points0, out.points0),
                              (self.d.points1, out.points1)):
            order_b = sorted(range(len(before)), key=lambda i: before[i].x)
            order_a = sorted(range(len(after)), key=lambda i: after[i].x)
            assert order_b == order_a

    def test_bad_eps(self):
        with pytest.raises(InvalidEps):
            lower_strip_ratio(self.d, 0.0)
        with pytest.raises(InvalidEps):
            lower_strip_ratio(self.d, -1.0)
