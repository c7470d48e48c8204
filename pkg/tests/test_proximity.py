import math

import pytest

from mwtrees.errors import DegenerateInput, MissingAnnotation
from mwtrees.geometry import BETA_INF, Point, rotate_about
from mwtrees.proximity import (
    DrawingPair,
    ParallelogramAnnotation,
    check_parallelogram_drawing,
    extract_mw_graphs,
    strip_ratio,
    verify,
    verify_universal,
)
from conftest import brute_mw_edges, random_points

PATH0 = (Point(0, 0), Point(1, 0), Point(2, 0))
PATH1 = (Point(0, -0.5), Point(1, -0.5), Point(2, -0.5))
PATH_EDGES = ((0, 1), (1, 2))


class TestExtract:
    def test_reference_star_pair(self):
        e0, e1 = extract_mw_graphs([(0, 5), (0, 3)], [(2, 0), (2, 2)], 1.0, True)
        assert e0 == ((0, 1),)
        assert e1 == ((0, 1),)

    def test_far_apart_cliques(self):
        a = [(0, 0), (1, 0), (0.5, 1)]
        b = [(1000, 1000), (1001, 1000), (1000.5, 1001)]
        e0, e1 = extract_mw_graphs(a, b, 1.0, True)
        assert len(e0) == 3 and len(e1) == 3

    @pytest.mark.parametrize("closed", [True, False])
    def test_path_pair_rows(self, closed):
        e0, e1 = extract_mw_graphs(PATH0, PATH1, 1.0, closed)
        assert e0 == PATH_EDGES and e1 == PATH_EDGES

    def test_coincident_rejected(self):
        with pytest.raises(DegenerateInput):
            extract_mw_graphs([(0, 0), (0, 0)], [(1, 1)], 1.0, True)

    def test_matches_bruteforce(self, rng):
        for beta in (1.0, 1.7, 3.0, BETA_INF):
            for closed in (True, False):
                a = random_points(rng, 7)
                b = random_points(rng, 6)
                assert extract_mw_graphs(a, b, beta, closed) == \
                    brute_mw_edges(a, b, beta, closed)

    def test_closure_nesting_and_beta_monotonicity(self, rng):
        for _ in range(25):
            a = random_points(rng, 6)
            b = random_points(rng, 6)
            closed0, closed1 = extract_mw_graphs(a, b, 1.5, True)
            open0, open1 = extract_mw_graphs(a, b, 1.5, False)
            assert set(closed0) <= set(open0)
            assert set(closed1) <= set(open1)
            hi0, hi1 = extract_mw_graphs(a, b, 4.0, True)
            assert set(hi0) <= set(closed0)
            assert set(hi1) <= set(closed1)


class TestVerify:
    def test_oracle_round_trip(self, rng):
        for beta in (1.0, 2.0, BETA_INF):
            a = random_points(rng, 8)
            b = random_points(rng, 8)
            for closed, mode in ((True, "closed"), (False, "open")):
                e0, e1 = extract_mw_graphs(a, b, beta, closed)
                d = DrawingPair(a, b, e0, e1)
                assert verify(d, beta, mode).ok

    def test_path_pair_strict(self):
        d = DrawingPair(PATH0, PATH1, PATH_EDGES, PATH_EDGES)
        assert verify(d, 1.0, "strict").ok

    def test_shifted_pair_missing_witness(self):
        far = tuple(Point(p.x, -2.0) for p in PATH1)
        d = DrawingPair(PATH0, far, PATH_EDGES, PATH_EDGES)
        rep = verify(d, 1.0, "strict")
        missing = {(v.side, v.pair) for v in rep.violations
                   if v.kind == "MissingWitness"}
        assert (0, (0, 2)) in missing and (1, (0, 2)) in missing

    def test_forbidden_witness_reported(self):
        d = DrawingPair(PATH0, ((1.0, -0.2),), ((0, 2),), ())
        rep = verify(d, 1.0, "closed")
        assert any(v.kind == "ForbiddenWitness" and v.witness == 0
                   for v in rep.violations)

    def test_strict_implies_open_and_closed(self, rng):
        for _ in range(20):
            a = random_points(rng, 6)
            b = random_points(rng, 6)
            e0, e1 = extract_mw_graphs(a, b, 1.0, True)
            d = DrawingPair(a, b, e0, e1)
            if verify(d, 1.0, "strict").ok:
                assert verify(d, 1.0, "closed").ok
                assert verify(d, 1.0, "open").ok

    def test_rigid_motion_invariance(self, rng):
        for _ in range(20):
            a = random_points(rng, 7)
            b = random_points(rng, 7)
            ref = extract_mw_graphs(a, b, 1.0, True)
            ang = rng.uniform(0, 2 * math.pi)
            center = (rng.uniform(-5, 5), rng.uniform(-5, 5))
            a2 = [Point(p.x + 3.25, p.y - 1.5) for p in rotate_about(a, center, ang)]
            b2 = [Point(p.x + 3.25, p.y - 1.5) for p in rotate_about(b, center, ang)]
            assert extract_mw_graphs(a2, b2, 1.0, True) == ref

    def test_single_vertex_sides_vacuous(self):
        d = DrawingPair((Point(0, 0),), (Point(5, 5),))
        for rep in verify_universal(d):
            assert rep.ok

    def test_bad_mode(self):
        d = DrawingPair(PATH0, PATH1, PATH_EDGES, PATH_EDGES)
        with pytest.raises(DegenerateInput):
            verify(d, 1.0, "weird")


CANON = ParallelogramAnnotation(Point(0, 3), Point(1, 1), Point(3, 0), Point(2, 2),
                                a0_id=0, a1_id=0)


class TestParallelogramChecks:
    def test_base_case_flags(self):
        d = DrawingPair((Point(0, 3),), (Point(3, 0),), parallelogram=CANON)
        chk = check_parallelogram_drawing(d)
        assert chk.all_ok

    def test_vertical_edge_detected(self):
        ann = ParallelogramAnnotation(Point(0, 3), Point(1, 1), Point(3, 0),
                                      Point(2, 2), a0_id=0, b0_id=1,
                                      a1_id=0, b1_id=1)
        d = DrawingPair((Point(0, 3), Point(1, 1), Point(1, 1.5)),
                        (Point(3, 0), Point(2, 2)),
                        ((0, 1), (1, 2)), ((0, 1),),
                        parallelogram=ann)
        chk = check_parallelogram_drawing(d)
        assert not chk.no_vertical_edges

    def test_missing_annotation(self):
        d = DrawingPair(PATH0, PATH1)
        with pytest.raises(MissingAnnotation):
            check_parallelogram_drawing(d)
        with pytest.raises(MissingAnnotation):
            strip_ratio(d)

    def test_strip_ratio_golden(self):
        d = DrawingPair((Point(0, 3),), (Point(3, 0),), parallelogram=CANON)
        assert strip_ratio(d) == pytest.approx(1 / 3)

    def test_strip_ratio_degenerate(self):
        ann = ParallelogramAnnotation(Point(0, 1), Point(1, 0.5), Point(3, 1),
                                      Point(2, 0.8))
        d = DrawingPair((Point(0, 1),), (Point(3, 1),), parallelogram=ann)
        with pytest.raises(DegenerateInput):
            strip_ratio(d)


class TestDrawingPairValidation:
    def test_rejects_self_edge(self):
        with pytest.raises(DegenerateInput):
            DrawingPair(PATH0, PATH1, ((1, 1),), ())

    def test_rejects_duplicate_edge(self):
        with pytest.raises(DegenerateInput):
            DrawingPair(PATH0, PATH1, ((0, 1), (1, 0)), ())

    def test_rejects_out_of_range(self):
        with pytest.raises(DegenerateInput):
            DrawingPair(PATH0, PATH1, ((0, 7),), ())
