"""Constructive drawing algorithms for tree pairs.

Four constructions are provided:

* ``draw_star_pair``       -- two isomorphic stars inside a winged
  parallelogram (closed Gabriel semantics),
* ``draw_caterpillar_pair``-- two isomorphic caterpillars, linearly
  separable, valid under closed Gabriel semantics,
* ``draw_tree_pair``       -- two isomorphic rooted trees inside a nicely
  oriented parallelogram, valid under both open and closed semantics for
  every beta in [1, inf],
* ``draw_pruned_tree_pair``-- a tree against itself minus a sparse leaf
  set, same universal validity.

All constructions are deterministic.  Internal verification gates re-run
the brute-force verifier on intermediate results and raise
DegenerateGeometry rather than return an invalid drawing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

from .errors import (
    DegenerateGeometry,
    DegenerateInput,
    EmptyKeepSet,
    HeightTooSmall,
    InvalidEps,
    MissingAnnotation,
    NoSafeEps,
    SparseViolation,
)
from .geometry import (
    BETA_INF,
    TOL,
    Line,
    Point,
    Segment,
    WingedParallelogram,
    angle_at,
    build_winged_parallelogram,
    cross,
    dist,
    dot,
    norm,
    region_margin,
    region_scale,
    rotate_about,
    unit,
    vsub,
)
from .proximity import (
    ConstructionTrace,
    DrawingPair,
    ParallelogramAnnotation,
    strip_ratio,
    verify,
)
from .tree_model import (
    CaterpillarDecomposition,
    RootedTree,
    SparseLeafSet,
    is_sparse,
    reorder_children_for_pruning,
    rooted_isomorphism,
    subtree_type,
)

# A drawing annotated with parallelogram corners; see DrawingPair.parallelogram.
ParallelogramDrawing = DrawingPair

# Anchor offset beyond the outermost leaf of a star row, in row units.
ANCHOR_OFFSET = 0.1

# Base-case parallelogram for single-vertex pairs.
_CANON = (Point(0.0, 3.0), Point(1.0, 1.0), Point(3.0, 0.0), Point(2.0, 2.0))

# Relative slack used when choosing construction offsets; dwarfs TOL.
_SLACK = 1e-6

_DYNAMIC_RANGE_LIMIT = 1e12


# ---------------------------------------------------------------------------
# stars in a winged parallelogram
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WPDrawing:
    """Star-pair drawing supported by a winged parallelogram.

    Vertex 0 of each side is the star center (at the outer corners); vertex
    ``1 + j`` is leaf ``j``.  Leaf 0 occupies the inner corner and the
    remaining leaves sit on the anchor segment ``sigma`` of their side.
    """

    drawing: DrawingPair
    wp: WingedParallelogram
    sigma0: Segment
    sigma1: Segment

    @property
    def leaf_count(self) -> int:
        return len(self.drawing.points0) - 1


def draw_star_pair(k: int) -> WPDrawing:
    """Mutual witness Gabriel drawing of two stars with ``k + 1`` leaves each.

    For ``k = 0`` the layout is a fixed small parallelogram.  For larger
    ``k`` the two leaf rows are horizontal at heights +-0.5 with spacing 2,
    the drawing is point symmetric through the origin, and each center is
    lifted to height ``2 k^2 + 0.5`` above its row so none of its edges can
    pick up a witness from the far side.
    """
    if not isinstance(k, int) or k < 0:
        raise DegenerateInput(f"leaf index bound must be a nonnegative integer, got {k!r}")
    if k == 0:
        a0, b0 = Point(0.0, 5.0), Point(0.0, 3.0)
        a1, b1 = Point(2.0, 0.0), Point(2.0, 2.0)
        q0, q1 = Point(1.1, 3.0), Point(0.9, 2.0)
        pts0 = (a0, b0)
        pts1 = (a1, b1)
        sigma0 = Segment(b0, b0)
        sigma1 = Segment(b1, b1)
    else:
        leaves0 = [Point(2.0 * i - k + 0.5, 0.5) for i in range(k + 1)]
        r0 = Point(0.5 - k, 2.0 * k * k + 0.5)
        pts0 = (r0, *leaves0)
        pts1 = tuple(Point(-p.x, -p.y) for p in pts0)
        a0, b0 = r0, leaves0[0]
        a1 = pts1[0]
        b1 = pts1[1]
        q0 = Point(k + 0.5 + ANCHOR_OFFSET, 0.5)
        q1 = Point(-q0.x, -q0.y)
        sigma0 = Segment(b0, leaves0[-1])
        sigma1 = Segment(b1, Point(-leaves0[-1].x, -leaves0[-1].y))
    wp = build_winged_parallelogram(a0, b0, a1, b1, q0, q1)
    edges = tuple((0, 1 + j) for j in range(len(pts0) - 1))
    line = Line(Point(0.0, (b0.y + b1.y) / 2.0), Point(1.0, 0.0))
    d = DrawingPair(pts0, pts1, edges, edges, separating_line=line)
    return WPDrawing(d, wp, sigma0, sigma1)


def redraw_pruned_stars(wpd: WPDrawing, keep0: Sequence[int], keep1: Sequence[int]) -> WPDrawing:
    """Star pair with a leaf subset, redrawn in the same winged parallelogram.

    The kept leaves are respaced uniformly along the original anchor
    segments; the corner slots stay occupied, so pruning the corner leaf
    effectively swaps another kept leaf into its place.
    """
    k0 = sorted(set(int(i) for i in keep0))
    k1 = sorted(set(int(i) for i in keep1))
    if not k0 or not k1 or len(k0) != len(k1):
        raise EmptyKeepSet("keep sets must be nonempty and of equal size")
    leaf_ids = set(range(1, len(wpd.drawing.points0)))
    if not set(k0) <= leaf_ids or not set(k1) <= leaf_ids:
        raise EmptyKeepSet("keep sets must reference leaf vertex ids")
    c = len(k0)
    if c > len(leaf_ids):
        raise EmptyKeepSet("cannot keep more leaves than the drawing has")

    def grid(seg: Segment) -> List[Point]:
        if c == 1:
            return [seg.a]
        return [seg.lerp(i / (c - 1)) for i in range(c)]

    pts0 = (wpd.drawing.points0[0], *grid(wpd.sigma0))
    pts1 = (wpd.drawing.points1[0], *grid(wpd.sigma1))
    edges = tuple((0, 1 + j) for j in range(c))
    d = DrawingPair(pts0, pts1, edges, edges,
                    separating_line=wpd.drawing.separating_line)
    return WPDrawing(d, wpd.wp, wpd.sigma0, wpd.sigma1)


# ---------------------------------------------------------------------------
# safe perturbation search
# ---------------------------------------------------------------------------

def _min_pair_distance(points: Sequence[Point]) -> float:
    best = math.inf
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            best = min(best, dist(points[i], points[j]))
    return best


def _extent(points: Sequence[Point]) -> float:
    xs = [p.x for p in points]
    ys = [p.y for p in points]
    return max(max(xs) - min(xs), max(ys) - min(ys), 1.0)


def _translate_subset(d: DrawingPair, block0: Set[int], block1: Set[int],
                      offset: Tuple[float, float]) -> DrawingPair:
    ox, oy = offset
    pts0 = tuple(Point(p.x + ox, p.y + oy) if i in block0 else p
                 for i, p in enumerate(d.points0))
    pts1 = tuple(Point(p.x + ox, p.y + oy) if i in block1 else p
                 for i, p in enumerate(d.points1))
    return replace(d, points0=pts0, points1=pts1)


def _pair_verdicts(d: DrawingPair, beta: float):
    """Per-side dict: pair -> (is_edge, best witness margin, local scale)."""
    import numpy as np
    from .proximity import _side_margin_tables

    out = []
    for side in (0, 1):
        own = d.side(side)
        other = d.side(1 - side)
        edge_set = set(d.edges(side))
        iu, jv, marg, scale = _side_margin_tables(own, other, beta)
        table: Dict[Tuple[int, int], Tuple[bool, float, float]] = {}
        if marg is not None:
            best = np.argmax(marg, axis=1)
            rows = np.arange(len(iu))
            bm = marg[rows, best]
            bs = scale[rows, best]
            for idx in range(len(iu)):
                pair = (int(iu[idx]), int(jv[idx]))
                table[pair] = (pair in edge_set, float(bm[idx]), float(bs[idx]))
        out.append(table)
    return out


def compute_safe_perturbation(d: DrawingPair, block0: Set[int], block1: Set[int],
                              direction: Tuple[float, float] = (-1.0, 0.0)) -> float:
    """Largest halving-search offset that repairs the block's crossing edges.

    Target pairs are the edges with exactly one endpoint in the moving
    block.  A candidate offset is accepted when, after the move, every
    target edge is strictly witness-free in its closed Gabriel region, no
    new closed-mode violation appears, and every previously strict verdict
    keeps a margin above tolerance.
    """
    u = unit(direction)
    b0 = set(int(i) for i in block0)
    b1 = set(int(i) for i in block1)
    all_pts = list(d.points0) + list(d.points1)
    scale = _extent(all_pts)
    min_d = _min_pair_distance(all_pts)
    if min_d == 0.0:
        raise DegenerateInput("drawing has coincident points")
    base = min_d / 10.0
    floor = 1e-12 * scale

    targets = []
    for side, block in ((0, b0), (1, b1)):
        for (a, b) in d.edges(side):
            if (a in block) != (b in block):
                targets.append((side, (a, b)))
    target_set = set(targets)

    before = _pair_verdicts(d, 1.0)

    def violated(is_edge, margin, s):
        tol = TOL * s
        return margin >= -tol if is_edge else margin < -tol

    orig_bad = set()
    for side in (0, 1):
        for pair, (is_edge, m, s) in before[side].items():
            if violated(is_edge, m, s):
                orig_bad.add((side, pair))

    if not targets and not orig_bad:
        return base

    eps = base
    while eps >= floor:
        moved = _translate_subset(d, b0, b1, (eps * u.x, eps * u.y))
        after = _pair_verdicts(moved, 1.0)
        ok = True
        for side, pair in targets:
            is_edge, m, s = after[side][pair]
            if m >= -TOL * s:
                ok = False
                break
        if ok:
            for side in (0, 1):
                for pair, (is_edge, m, s) in after[side].items():
                    key = (side, pair)
                    tol = TOL * s
                    now_bad = (m >= -tol) if is_edge else (m < -tol)
                    if now_bad and (key not in orig_bad or key in target_set):
                        ok = False
                        break
                    was_edge, m0, s0 = before[side][pair]
                    if key not in orig_bad and key not in target_set:
                        strict_before = (-m0 if was_edge else m0) > TOL * s0
                        strict_after = (-m if is_edge else m) > TOL * s
                        if strict_before and not strict_after:
                            ok = False
                            break
                if not ok:
                    break
        if ok:
            return eps
        eps /= 2.0
    raise NoSafeEps(f"no safe offset above {floor:g}")


# ---------------------------------------------------------------------------
# caterpillars
# ---------------------------------------------------------------------------

def _path_order(tree) -> List[int]:
    if tree.n == 1:
        return [0]
    ends = [v for v in range(tree.n) if tree.degree(v) == 1]
    start = min(ends)
    order = [start]
    prev, cur = None, start
    while len(order) < tree.n:
        nxt = [w for w in tree.adj[cur] if w != prev]
        prev, cur = cur, nxt[0]
        order.append(cur)
    return order


def _draw_path_pair(tree) -> DrawingPair:
    order = _path_order(tree)
    pos0 = {}
    pos1 = {}
    for i, v in enumerate(order):
        pos0[v] = Point(float(i), 0.0)
        pos1[v] = Point(float(i), -0.5)
    pts0 = tuple(pos0[v] for v in range(tree.n))
    pts1 = tuple(pos1[v] for v in range(tree.n))
    line = Line(Point(0.0, -0.25), Point(1.0, 0.0))
    trace = ConstructionTrace({"kind": "path", "north": 0.0, "south": -0.5})
    return DrawingPair(pts0, pts1, tree.edges, tree.edges,
                       separating_line=line, trace=trace)


def _edge_strictly_clean(d: DrawingPair, side: int, pair: Tuple[int, int]) -> bool:
    """True when no opposite point is within tolerance of the pair's Gabriel disk."""
    own = d.side(side)
    p, q = own[pair[0]], own[pair[1]]
    for w in d.side(1 - side):
        m = region_margin(p, q, 1.0, w)
        if m >= -TOL * region_scale(p, q, w):
            return False
    return True


def draw_caterpillar_pair(cat: CaterpillarDecomposition) -> DrawingPair:
    """Linearly separable closed-Gabriel drawing of an isomorphic caterpillar pair.

    Star blocks congruent to the largest one are chained left to right:
    after a leafed block the next spine vertex lands on the block's upper
    port, after a leafless one the next block is hung from the lower port.
    Leaf rows always span the full anchor segments so consecutive blocks
    can witness each other's extreme leaves; single-leaf blocks put their
    upper leaf on the right end and their lower leaf on the left end for
    the same reason, and the partner of a leafless spine vertex trails it
    horizontally so it can witness the pairs the leaf rows cannot reach.
    A final right-to-left nudge of each suffix realizes the spine edges
    whose witnesses sit exactly on their disk boundaries.
    """
    tree = cat.tree
    if cat.is_path:
        return _draw_path_pair(tree)

    counts = [len(l) for l in cat.leaves]
    h = max(range(len(counts)), key=lambda j: (counts[j], -j))
    k = max(1, counts[h] - 1)
    base = draw_star_pair(k)
    wp = base.wp
    north, south = wp.a0.y, wp.a1.y

    # The partner of a leafless spine vertex trails it by ``u_star``.  The
    # trail distance u must let the partner witness the pair formed by the
    # rightmost leaf slot and the leafless vertex,
    #     (u - 2W) u + 2N^2 + N <= 0,        W = half span slot-to-port,
    # while staying outside the Gabriel disk of the incoming spine edge,
    #     u^2 - P u + 4N^2 > 0,              P = span root-to-port.
    # Both conditions are intervals in u; take the midpoint of the overlap.
    w_half = (wp.p0.x - base.sigma0.b.x) / 2.0
    p_span = wp.p0.x - wp.a0.x
    two_n = north - south
    half_n = two_n / 2.0
    wit_disc = w_half * w_half - 2.0 * half_n * half_n - half_n
    if wit_disc < 0.0:
        raise DegenerateGeometry("no trail window for leafless spine vertices")
    s_w = math.sqrt(wit_disc)
    lo_u = max(w_half - s_w, 0.0)
    hi_u = w_half + s_w
    excl_disc = p_span * p_span - 4.0 * two_n * two_n
    if excl_disc > 0.0:
        hi_u = min(hi_u, (p_span - math.sqrt(excl_disc)) / 2.0)
    if not hi_u > lo_u:
        raise DegenerateGeometry("empty trail window for leafless spine vertices")
    u_star = (lo_u + hi_u) / 2.0
    # spacing between consecutive leafless pairs: the middle partner must
    # witness the outer pair while both spine edges stay witness-free
    delta_ll = 0.5 * (math.hypot(u_star, two_n)
                      + u_star + two_n * two_n / u_star)
    lone_bottom_local = Point(wp.a0.x - u_star, south)

    def block_points(c: int) -> Tuple[List[Point], List[Point]]:
        if c == 0:
            return [wp.a0], [lone_bottom_local]
        if c == 1:
            return [wp.a0, base.sigma0.b], [wp.a1, base.sigma1.b]
        if c == k + 1:
            bd = base.drawing
        else:
            keep = list(range(1, c + 1))
            bd = redraw_pruned_stars(base, keep, keep).drawing
        return list(bd.points0), list(bd.points1)

    taus: List[Point] = [Point(0.0, 0.0)]
    for j in range(1, len(counts)):
        prev = taus[-1]
        if counts[j - 1] >= 1:
            port = Point(wp.p0.x + prev.x, wp.p0.y + prev.y)
            taus.append(Point(port.x - wp.a0.x, port.y - wp.a0.y))
        elif counts[j] >= 1:
            bottom_prev = Point(lone_bottom_local.x + prev.x,
                                lone_bottom_local.y + prev.y)
            taus.append(Point(bottom_prev.x - wp.p1.x, bottom_prev.y - wp.p1.y))
        else:
            taus.append(Point(prev.x + delta_ll, prev.y))

    pos0: Dict[int, Point] = {}
    pos1: Dict[int, Point] = {}
    block_ids: List[Tuple[List[int], List[int]]] = []
    for j, sid in enumerate(cat.spine):
        tau = taus[j]
        loc0, loc1 = block_points(counts[j])
        ids0 = [sid]
        ids1 = [sid]
        pos0[sid] = Point(loc0[0].x + tau.x, loc0[0].y + tau.y)
        pos1[sid] = Point(loc1[0].x + tau.x, loc1[0].y + tau.y)
        for rank, leaf in enumerate(cat.leaves[j]):
            pos0[leaf] = Point(loc0[1 + rank].x + tau.x, loc0[1 + rank].y + tau.y)
            pos1[leaf] = Point(loc1[1 + rank].x + tau.x, loc1[1 + rank].y + tau.y)
            ids0.append(leaf)
            ids1.append(leaf)
        block_ids.append((ids0, ids1))

    pts0 = tuple(pos0[v] for v in range(tree.n))
    pts1 = tuple(pos1[v] for v in range(tree.n))
    line = Line(Point(0.0, (north + south) / 2.0), Point(1.0, 0.0))
    d = DrawingPair(pts0, pts1, tree.edges, tree.edges, separating_line=line)

    eps_values: List[float] = []
    for gap in range(len(cat.spine) - 2, -1, -1):
        pair = (min(cat.spine[gap], cat.spine[gap + 1]),
                max(cat.spine[gap], cat.spine[gap + 1]))
        if _edge_strictly_clean(d, 0, pair) and _edge_strictly_clean(d, 1, pair):
            eps_values.append(0.0)
            continue
        moving0: Set[int] = set()
        moving1: Set[int] = set()
        for ids0, ids1 in block_ids[gap + 1:]:
            moving0.update(ids0)
            moving1.update(ids1)
        eps = compute_safe_perturbation(d, moving0, moving1, (-1.0, 0.0))
        eps_values.append(eps)
        d = _translate_subset(d, moving0, moving1, (-eps, 0.0))

    trace = ConstructionTrace({
        "kind": "caterpillar",
        "north": north,
        "south": south,
        "largest_star_index": h,
        "offsets": [(t.x, t.y) for t in taus],
        "suffix_nudges": eps_values[::-1],
    })
    d = replace(d, trace=trace)
    report = verify(d, 1.0, "closed")
    if not report.ok:
        raise DegenerateGeometry(
            f"caterpillar drawing failed closed verification: {report.violations[:3]}")
    return d


# ---------------------------------------------------------------------------
# recursive parallelogram drawings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Sub:
    """Subtree drawing in its own frame, with corner annotations."""

    pos0: Dict[int, Point]
    pos1: Dict[int, Point]
    edges0: Tuple[Tuple[int, int], ...]
    edges1: Tuple[Tuple[int, int], ...]
    a0: Point
    b0: Point
    a1: Point
    b1: Point
    b0_id: Optional[int]
    b1_id: Optional[int]
    root0: int
    root1: int

    def width(self) -> float:
        return self.a1.x - self.a0.x

    def height(self) -> float:
        return self.a0.y - self.a1.y

    def all_points(self) -> List[Point]:
        return list(self.pos0.values()) + list(self.pos1.values())


def _xform_sub(sub: _Sub, s: float, tx: float, ty: float) -> _Sub:
    def f(p: Point) -> Point:
        return Point(s * p.x + tx, s * p.y + ty)

    return replace(
        sub,
        pos0={k: f(p) for k, p in sub.pos0.items()},
        pos1={k: f(p) for k, p in sub.pos1.items()},
        a0=f(sub.a0), b0=f(sub.b0), a1=f(sub.a1), b1=f(sub.b1),
    )


def _scale_to_strip(sub: _Sub) -> _Sub:
    h = sub.height()
    s = 1.0 / h
    return _xform_sub(sub, s, -sub.a0.x * s, -sub.a1.y * s)


def _sub_drawing(sub: _Sub) -> DrawingPair:
    ids0 = sorted(sub.pos0)
    ids1 = sorted(sub.pos1)
    idx0 = {v: i for i, v in enumerate(ids0)}
    idx1 = {v: i for i, v in enumerate(ids1)}
    return DrawingPair(
        tuple(sub.pos0[v] for v in ids0),
        tuple(sub.pos1[v] for v in ids1),
        tuple((idx0[a], idx0[b]) for a, b in sub.edges0),
        tuple((idx1[a], idx1[b]) for a, b in sub.edges1),
    )


def _gate_sub(sub: _Sub) -> bool:
    if len(sub.pos0) < 2 and len(sub.pos1) < 2:
        return True
    d = _sub_drawing(sub)
    return verify(d, 1.0, "strict").ok and verify(d, BETA_INF, "strict").ok


def _edge_points(sub: _Sub, side: int) -> List[Tuple[Point, Point]]:
    pos = sub.pos0 if side == 0 else sub.pos1
    edges = sub.edges0 if side == 0 else sub.edges1
    return [(pos[a], pos[b]) for a, b in edges]


def _place_children(subs: List[_Sub]) -> List[_Sub]:
    """Scale children to the unit strip and chain them left to right.

    The offset of each child is the smallest shift making the child's upper
    root a strict witness between every earlier lower-side vertex and every
    lower-side vertex of the child (and mirrored for the earlier lower
    roots), while keeping every vertex of one child outside the
    perpendicular slabs of the other children's edges; ten percent of the
    wider adjacent child is added as slack.
    """
    scaled = [_scale_to_strip(s) for s in subs]
    placed = [scaled[0]]
    for d in range(1, len(scaled)):
        cand = scaled[d]
        need = 0.0
        r0d = cand.a0
        cand_pts = cand.all_points()
        cand_s1 = list(cand.pos1.values())
        cand_s0 = list(cand.pos0.values())
        cand_edges = [(0, _edge_points(cand, 0)), (1, _edge_points(cand, 1))]
        for sub in placed:
            # obtuse angle at the candidate's upper root between every earlier
            # lower vertex and every own lower vertex:
            #   (w - (r0d + delta)) . (v - r0d) < 0, coefficient (v - r0d).x > 0
            for v in cand_s1:
                ev = vsub(v, r0d)
                for w in list(sub.pos1.values()):
                    need = max(need, dot(vsub(w, r0d), ev) / ev[0])
            # mirrored at the earlier child's lower root:
            #   (u - r1c) . (v + delta - r1c) < 0, coefficient (u - r1c).x < 0
            r1c = sub.a1
            for u in list(sub.pos0.values()):
                eu = vsub(u, r1c)
                if eu[0] >= 0.0:
                    raise DegenerateGeometry("upper vertex right of its lower root")
                for v in cand_s0:
                    need = max(need, -dot(eu, vsub(v, r1c)) / eu[0])
            # static edges of sub vs moving opposite-side points of cand
            for side, edges in ((1, _edge_points(sub, 1)), (0, _edge_points(sub, 0))):
                opp = list(cand.pos0.values()) if side == 1 else list(cand.pos1.values())
                for (pu, pv) in edges:
                    e = vsub(pv, pu)
                    a = e[0]
                    L2 = dot(e, e)
                    for w in opp:
                        c = dot(vsub(w, pu), e)
                        if a > 0:
                            need = max(need, (L2 - c) / a)
                        elif a < 0:
                            need = max(need, -c / a)
                        else:
                            raise DegenerateGeometry("vertical edge during placement")
            # moving edges of cand vs static opposite-side points of sub
            for side, edges in cand_edges:
                opp = list(sub.pos0.values()) if side == 1 else list(sub.pos1.values())
                for (pu, pv) in edges:
                    e = vsub(pv, pu)
                    a = e[0]
                    L2 = dot(e, e)
                    for w in opp:
                        c = dot(vsub(w, pu), e)
                        if a > 0:
                            need = max(need, c / a)
                        elif a < 0:
                            need = max(need, (c - L2) / a)
                        else:
                            raise DegenerateGeometry("vertical edge during placement")
        slack = 0.1 * max(placed[-1].width(), cand.width(), 1e-6)
        placed.append(_xform_sub(cand, 1.0, need + slack, 0.0))
    return placed


def _in_slab(w: Point, pu: Point, pv: Point, rel: float = _SLACK) -> bool:
    e = vsub(pv, pu)
    L2 = dot(e, e)
    c = dot(vsub(w, pu), e)
    return -rel * L2 <= c <= L2 * (1.0 + rel)


def _roots_clear_of_slabs(placed: List[_Sub], p0: Point, p1: Point) -> bool:
    edges1: List[Tuple[Point, Point]] = []
    edges0: List[Tuple[Point, Point]] = []
    for sub in placed:
        edges1 += _edge_points(sub, 1)
        edges0 += _edge_points(sub, 0)
        edges1.append((p1, sub.pos1[sub.root1]))
        edges0.append((p0, sub.pos0[sub.root0]))
    for (pu, pv) in edges1:
        if _in_slab(p0, pu, pv):
            return False
    for (pu, pv) in edges0:
        if _in_slab(p1, pu, pv):
            return False
    return True


def _acute_with_vertical(v: Tuple[float, float]) -> float:
    return math.atan2(abs(v[0]), abs(v[1]))


def _root_levels(placed: List[_Sub], w1_point: Optional[Point]) -> Tuple[float, float, Dict]:
    """Root elevation above/below the strip (before any boost).

    Three families of constraints, each solved exactly against the actual
    vertex positions: the perpendicular slab of every new root edge must
    exclude every opposite vertex; every non-adjacent pair formed by a new
    root needs its designated witness strictly inside the Gabriel disk; and
    the two slanted sides of the final parallelogram must clear the child
    parallelograms, which bounds the root rays by half the smallest corner
    angle.
    """
    l0x = placed[0].a0.x
    l1x = placed[-1].a1.x
    side0_pts: List[Point] = []
    side1_pts: List[Point] = []
    for sub in placed:
        side0_pts += list(sub.pos0.values())
        side1_pts += list(sub.pos1.values())

    # slab exclusion for the edges from the upper root to the child roots
    h_slab0 = 0.0
    for sub in placed:
        xj = sub.pos0[sub.root0].x
        coef = l0x - xj
        for w in side1_pts:
            h_slab0 = max(h_slab0, (w.x - xj) * coef / (1.0 - w.y))
    # mirrored for the lower root
    h_slab1 = 0.0
    for sub in placed:
        xj = sub.pos1[sub.root1].x
        coef = l1x - xj
        for w in side0_pts:
            h_slab1 = max(h_slab1, (w.x - xj) * coef / w.y)

    # witness depth for non-adjacent pairs of the upper root
    z2_0 = -math.inf
    if w1_point is None:
        for sub in placed:
            if sub.b1_id is None:
                continue
            b = sub.b1
            for vid, v in sub.pos0.items():
                if vid == sub.root0:
                    continue
                bnum = v.y - b.y
                if bnum >= 0.0:
                    raise DegenerateGeometry("side-0 vertex at or above its b1 corner")
                a = (v.x - b.x) * (l0x - b.x)
                z2_0 = max(z2_0, b.y - a / bnum)
    else:
        for sub in placed:
            for vid, v in sub.pos0.items():
                if vid == sub.root0:
                    continue
                bnum = v.y - w1_point.y
                if bnum >= 0.0:
                    raise DegenerateGeometry("side-0 vertex at or above the shared witness")
                a = (v.x - w1_point.x) * (l0x - w1_point.x)
                z2_0 = max(z2_0, w1_point.y - a / bnum)

    z2_1 = math.inf
    for sub in placed:
        if sub.b0_id is None:
            continue
        b = sub.b0
        for vid, v in sub.pos1.items():
            if vid == sub.root1:
                continue
            bnum = v.y - b.y
            if bnum <= 0.0:
                raise DegenerateGeometry("side-1 vertex at or below its b0 corner")
            a = (v.x - b.x) * (l1x - b.x)
            z2_1 = min(z2_1, b.y - a / bnum)

    alpha0 = _acute_with_vertical(vsub(placed[0].b0, placed[0].a0))
    alpha1 = _acute_with_vertical(vsub(placed[-1].b1, placed[-1].a1))
    alpha = min(alpha0, alpha1)
    if alpha <= 0.0:
        raise DegenerateGeometry("degenerate corner angle")
    span = l1x - l0x
    h_contain = span / math.tan(alpha / 2.0)

    elev = max(h_slab0, h_slab1, z2_0 - 1.0, -z2_1, h_contain - 1.0, 0.0)
    elev = 1.05 * elev + 1.0
    info = {
        "L0x": l0x, "L1x": l1x,
        "h_slab": (h_slab0, h_slab1),
        "z_dprime": (z2_0, z2_1),
        "h_contain": h_contain,
        "alpha": alpha,
    }
    return elev, span, info


def _choose_rotation(placed: List[_Sub], p0: Point, p1: Point) -> Tuple[Point, Dict]:
    """Direction that becomes horizontal, satisfying all post-rotation checks."""
    r00 = placed[0].pos0[placed[0].root0]
    r1m = placed[-1].pos1[placed[-1].root1]
    b00 = placed[0].b0
    b1m = placed[-1].b1
    base = vsub(p1, r00)
    gamma0 = angle_at(p1, r00, b00)
    gamma1 = angle_at(p0, r1m, b1m)
    gamma = min(gamma0, gamma1)
    # Start close to the bound: the rotation angle controls the aspect ratio
    # of the rotated drawing (width/height ~ cot of this angle), and small
    # angles compound into exponential coordinate growth across levels.
    gp = 0.9 * gamma

    edge_pts: List[Tuple[Point, Point]] = []
    others: List[Point] = []
    for sub in placed:
        edge_pts += _edge_points(sub, 0) + _edge_points(sub, 1)
        edge_pts.append((p0, sub.pos0[sub.root0]))
        edge_pts.append((p1, sub.pos1[sub.root1]))
        for vid, pt in sub.pos0.items():
            others.append(pt)
        for vid, pt in sub.pos1.items():
            others.append(pt)
    others = [pt for pt in others
              if pt != r00 and pt != r1m]

    for _ in range(600):
        ca, sa = math.cos(gp), math.sin(gp)
        f = unit((base[0] * ca - base[1] * sa, base[0] * sa + base[1] * ca))

        def above(vec) -> bool:
            # the band gaps this guarantees feed the witness-depth bounds of
            # the enclosing level, so keep them well clear of roundoff
            return cross(f, vec) > 1e-5 * norm(vec)

        ok = (above(vsub(r1m, r00)) and above(vsub(p0, r1m)) and above(vsub(r00, p1)))
        if ok:
            for pt in others:
                if not (above(vsub(pt, r00)) and above(vsub(r1m, pt))):
                    ok = False
                    break
        if ok:
            for a, b in ((p0, r00), (r00, r1m), (r1m, p1)):
                if dot(f, vsub(b, a)) <= 1e-9 * dist(a, b):
                    ok = False
                    break
        if ok:
            for (pu, pv) in edge_pts:
                e = vsub(pv, pu)
                if abs(dot(f, e)) <= 1e-7 * norm(e):
                    ok = False
                    break
        if ok:
            return f, {"gamma": gamma, "gamma_prime": gp}
        gp *= 0.9
    raise DegenerateGeometry("no rotation angle satisfies the shape constraints")


def _assemble_level(subs: List[_Sub], root0: int, root1: int, *,
                    boost: float = 1.0, w1_mode: bool = False,
                    trace_log: Optional[List[Dict]] = None) -> _Sub:
    placed = _place_children(subs)
    w1_point: Optional[Point] = None
    if w1_mode:
        last = placed[-1]
        if last.b1_id is None:
            raise DegenerateGeometry("rightmost child has no inner corner vertex")
        w1_point = last.b1
    elev, span, info = _root_levels(placed, w1_point)
    elev *= boost

    l0x, l1x = info["L0x"], info["L1x"]
    doublings = 0
    while True:
        p0 = Point(l0x, 1.0 + elev)
        p1 = Point(l1x, -elev)
        if _roots_clear_of_slabs(placed, p0, p1):
            break
        elev *= 2.0
        doublings += 1
        if doublings > 200:
            raise DegenerateGeometry("root elevation search did not converge")

    f, rot_info = _choose_rotation(placed, p0, p1)
    theta = -math.atan2(f.y, f.x)

    pos0: Dict[int, Point] = {root0: p0}
    pos1: Dict[int, Point] = {root1: p1}
    edges0: List[Tuple[int, int]] = []
    edges1: List[Tuple[int, int]] = []
    for sub in placed:
        pos0.update(sub.pos0)
        pos1.update(sub.pos1)
        edges0 += list(sub.edges0) + [(root0, sub.root0)]
        edges1 += list(sub.edges1) + [(root1, sub.root1)]

    ids0 = sorted(pos0)
    ids1 = sorted(pos1)
    all_pts = [pos0[i] for i in ids0] + [pos1[i] for i in ids1]
    cxs = sum(p.x for p in all_pts) / len(all_pts)
    cys = sum(p.y for p in all_pts) / len(all_pts)
    rotated = rotate_about(all_pts, (cxs, cys), theta)
    pos0 = {v: rotated[i] for i, v in enumerate(ids0)}
    pos1 = {v: rotated[len(ids0) + i] for i, v in enumerate(ids1)}

    b0_id = placed[0].root0
    b1_id = placed[-1].root1
    a0p, b0p = pos0[root0], pos0[b0_id]
    a1p, b1p = pos1[root1], pos1[b1_id]
    if not (a0p.y > b1p.y > b0p.y > a1p.y and
            a0p.x < b0p.x < b1p.x < a1p.x):
        raise DegenerateGeometry("rotated corners lost the required ordering")

    if trace_log is not None:
        trace_log.append({
            **info, **rot_info,
            "elevation": elev,
            "rotation": theta,
            "offsets": [s.a0.x for s in placed],
            "boost": boost,
        })

    return _Sub(pos0, pos1, tuple(edges0), tuple(edges1),
                a0p, b0p, a1p, b1p, b0_id, b1_id, root0, root1)


def _canon_sub(v0: int, v1: int) -> _Sub:
    a0, b0, a1, b1 = _CANON
    return _Sub({v0: a0}, {v1: a1}, (), (), a0, b0, a1, b1, None, None, v0, v1)


def _build_tree_sub(rt: RootedTree, v: int, side1: Callable[[int], int],
                    trace_log: Optional[List[Dict]] = None) -> _Sub:
    kids = rt.children[v]
    if not kids:
        return _canon_sub(v, side1(v))
    subs = [_build_tree_sub(rt, c, side1, trace_log) for c in kids]
    for attempt in range(8):
        sub = _assemble_level(subs, v, side1(v), boost=2.0 ** attempt,
                              trace_log=trace_log if attempt == 0 else None)
        if _gate_sub(sub):
            return sub
    raise DegenerateGeometry(f"subtree at {v} failed verification at all elevations")


def _dynamic_range(points: Sequence[Point]) -> float:
    ext = _extent(points)
    min_d = _min_pair_distance(points)
    if min_d == 0.0:
        return math.inf
    return ext / min_d


def draw_tree_pair(rt0: RootedTree, rt1: RootedTree) -> ParallelogramDrawing:
    """Parallelogram drawing of two isomorphic rooted trees.

    The output is valid under both open and closed semantics for every
    beta in [1, inf]; the vertex coordinates do not depend on beta.
    """
    mapping = rooted_isomorphism(rt0, rt1)
    levels: List[Dict] = []
    sub = _build_tree_sub(rt0, rt0.root, lambda u: mapping[u], levels)
    n = rt0.tree.n
    pts0 = tuple(sub.pos0[i] for i in range(n))
    pts1 = tuple(sub.pos1[i] for i in range(n))
    if _dynamic_range(pts0 + pts1) > _DYNAMIC_RANGE_LIMIT:
        raise DegenerateGeometry("coordinate dynamic range exceeds 1e12")
    ann = ParallelogramAnnotation(
        sub.a0, sub.b0, sub.a1, sub.b1,
        a0_id=rt0.root, b0_id=sub.b0_id, a1_id=rt1.root, b1_id=sub.b1_id)
    edges1 = tuple((mapping[a], mapping[b]) for a, b in rt0.tree.edges)
    trace = ConstructionTrace({"kind": "tree", "levels": levels})
    return DrawingPair(pts0, pts1, rt0.tree.edges, edges1,
                       parallelogram=ann, trace=trace)


# ---------------------------------------------------------------------------
# strip ratio manipulation
# ---------------------------------------------------------------------------

def _sub_ratio(sub: _Sub) -> float:
    return (sub.b1.y - sub.b0.y) / (sub.a0.y - sub.a1.y)


def _lower_sub(sub: _Sub, t: float) -> _Sub:
    u0 = unit(vsub(sub.a0, sub.b0))
    u1 = unit(vsub(sub.a1, sub.b1))
    na0 = Point(sub.a0.x + t * u0.x, sub.a0.y + t * u0.y)
    na1 = Point(sub.a1.x + t * u1.x, sub.a1.y + t * u1.y)
    pos0 = dict(sub.pos0)
    pos1 = dict(sub.pos1)
    pos0[sub.root0] = na0
    pos1[sub.root1] = na1
    return replace(sub, pos0=pos0, pos1=pos1, a0=na0, a1=na1)


def _sub_from_drawing(d: DrawingPair) -> _Sub:
    ann = d.parallelogram
    pos0 = {i: p for i, p in enumerate(d.points0)}
    pos1 = {i: p for i, p in enumerate(d.points1)}
    return _Sub(pos0, pos1, d.edges0, d.edges1,
                ann.a0, ann.b0, ann.a1, ann.b1,
                ann.b0_id, ann.b1_id, ann.a0_id, ann.a1_id)


def lower_strip_ratio(pd: ParallelogramDrawing, eps: float) -> ParallelogramDrawing:
    """Move the outer roots outward along their sides until the ratio drops.

    The move corresponds to raising the roots further above the rest of the
    drawing, which only widens the clearances of the root-incident pairs;
    a verification pass guards the result.
    """
    if not (isinstance(eps, (int, float)) and math.isfinite(eps) and eps > 0.0):
        raise InvalidEps(f"eps must be a positive real, got {eps!r}")
    if pd.parallelogram is None:
        raise MissingAnnotation("drawing carries no parallelogram corners")
    sigma = strip_ratio(pd)
    if sigma < eps:
        return pd
    sub = _sub_from_drawing(pd)
    band = sub.b1.y - sub.b0.y
    height = sub.a0.y - sub.a1.y
    u0 = unit(vsub(sub.a0, sub.b0))
    u1 = unit(vsub(sub.a1, sub.b1))
    dy = u0.y - u1.y
    if dy <= 0.0:
        raise DegenerateGeometry("root rays do not widen the drawing")
    t = (band / (0.5 * eps) - height) / dy
    for _ in range(60):
        cand = _lower_sub(sub, t)
        if _sub_ratio(cand) < eps and _gate_sub(cand):
            ann = pd.parallelogram
            new_ann = replace(ann, a0=cand.a0, a1=cand.a1)
            pts0 = tuple(cand.pos0[i] for i in range(len(pd.points0)))
            pts1 = tuple(cand.pos1[i] for i in range(len(pd.points1)))
            return replace(pd, points0=pts0, points1=pts1, parallelogram=new_ann)
        t *= 2.0
    raise DegenerateGeometry("strip ratio reduction failed to verify")


# ---------------------------------------------------------------------------
# pruned pairs
# ---------------------------------------------------------------------------

def _side0_band_top(sub: _Sub) -> float:
    """Largest normalized height of a side-0 non-root vertex."""
    h = sub.height()
    tops = [(p.y - sub.a1.y) / h for vid, p in sub.pos0.items() if vid != sub.root0]
    return max(tops, default=-math.inf)


def _prep_strip_ratios(subs: List[_Sub]) -> List[_Sub]:
    """Lower the earlier children until the last child's inner corner tops them.

    Extending a child along its side rays drives its band toward the middle
    of the strip, while the inner corner of the (untouched) last child stays
    strictly above the middle; the target is halfway between the two.
    """
    last = subs[-1]
    lam = (last.b1.y - last.a1.y) / last.height()
    if not _side0_band_top(last) < lam:
        raise DegenerateGeometry("shared witness is not above its own side-0 band")
    if not lam > 0.5:
        raise DegenerateGeometry("shared witness corner is not above the strip middle")
    target = 0.5 + 0.5 * (lam - 0.5)
    out = []
    for j, sub in enumerate(subs):
        if j == len(subs) - 1:
            out.append(sub)
            continue
        cur = sub
        for _ in range(200):
            if _side0_band_top(cur) < target:
                break
            cur = _lower_sub(cur, cur.height())
        else:
            raise DegenerateGeometry("could not push a sibling band below the witness")
        out.append(cur)
    return out


def _delete_side1(sub: _Sub, gone: Set[int]) -> _Sub:
    pos1 = {v: p for v, p in sub.pos1.items() if v not in gone}
    edges1 = tuple((a, b) for a, b in sub.edges1 if a not in gone and b not in gone)
    return replace(sub, pos1=pos1, edges1=edges1)


def _build_pruned_sub(rt: RootedTree, v: int, members: frozenset,
                      trace_log: Optional[List[Dict]] = None) -> _Sub:
    in_subtree = set(rt.subtree_vertices(v))
    if not (members & in_subtree):
        return _build_tree_sub(rt, v, lambda u: u, trace_log)
    kids = rt.children[v]
    subs: List[_Sub] = []
    gone: Set[int] = set()
    for c in kids:
        ty = subtree_type(rt, c, members)
        if ty == "D":
            subs.append(_build_pruned_sub(rt, c, members, trace_log))
        else:
            subs.append(_build_tree_sub(rt, c, lambda u: u, trace_log))
            if ty == "B":
                gone.update(x for x in rt.children[c] if x in members)
    subs = _prep_strip_ratios(subs)
    for attempt in range(60):
        sub = _assemble_level(subs, v, v, boost=2.0 ** attempt, w1_mode=True,
                              trace_log=trace_log if attempt == 0 else None)
        pruned = _delete_side1(sub, gone)
        if _gate_sub(pruned):
            return pruned
    raise DegenerateGeometry(f"pruned subtree at {v} failed verification at all elevations")


def draw_pruned_tree_pair(rt: RootedTree, leaf_set) -> DrawingPair:
    """Drawing of a tree against itself minus a sparse leaf set.

    Valid under both open and closed semantics for every beta in [1, inf];
    the two sides have different cardinalities.
    """
    members = frozenset(leaf_set.leaf_ids if isinstance(leaf_set, SparseLeafSet)
                        else leaf_set)
    if rt.height() < 2:
        raise HeightTooSmall("pruning needs a rooted tree of height at least 2")
    ok, violations = is_sparse(rt, members)
    if not ok:
        raise SparseViolation(f"leaf set is not sparse: {violations[:3]}")
    rt_ord = reorder_children_for_pruning(rt, members)
    levels: List[Dict] = []
    sub = _build_pruned_sub(rt_ord, rt_ord.root, members, levels)

    n = rt.tree.n
    pts0 = tuple(sub.pos0[i] for i in range(n))
    survivors = sorted(sub.pos1)
    relabel = {v: i for i, v in enumerate(survivors)}
    pts1 = tuple(sub.pos1[v] for v in survivors)
    edges1 = tuple((relabel[a], relabel[b]) for a, b in sub.edges1)
    if _dynamic_range(pts0 + pts1) > _DYNAMIC_RANGE_LIMIT:
        raise DegenerateGeometry("coordinate dynamic range exceeds 1e12")
    ann = ParallelogramAnnotation(
        sub.a0, sub.b0, sub.a1, sub.b1,
        a0_id=rt.root, b0_id=sub.b0_id,
        a1_id=relabel[sub.root1], b1_id=relabel[sub.b1_id])
    trace = ConstructionTrace({
        "kind": "pruned",
        "levels": levels,
        "removed": sorted(members),
        "side1_relabel": {str(k): v for k, v in relabel.items()},
    })
    return DrawingPair(pts0, pts1, rt.tree.edges, edges1,
                       parallelogram=ann, trace=trace)
