"""Brute-force mutual witness graph extraction and drawing verification.

The extractor is the ground truth: for every vertex pair of one side it
scans all vertices of the other side and keeps the edge exactly when no
witness lies in the pair's beta region.  The verifier reuses the same
margin computation to diff a claimed drawing against that rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateInput, MissingAnnotation
from .geometry import TOL, BETA_INF, Line, Point

DEFAULT_BETAS: Tuple[float, ...] = (1.0, 1.5, 2.0, 5.0, 10.0, BETA_INF)


@dataclass(frozen=True)
class ParallelogramAnnotation:
    """Corner points of the bounding parallelogram plus corner occupants.

    ``*_id`` fields give the vertex id drawn at the corner (None when the
    corner is unoccupied, which only happens on single-vertex sides).
    """

    a0: Point
    b0: Point
    a1: Point
    b1: Point
    a0_id: Optional[int] = None
    b0_id: Optional[int] = None
    a1_id: Optional[int] = None
    b1_id: Optional[int] = None


@dataclass(frozen=True)
class ConstructionTrace:
    """Free-form record of intermediate construction geometry."""

    data: Dict = field(default_factory=dict)


def _normalize_edges(edges, n: int, side: str) -> Tuple[Tuple[int, int], ...]:
    out = []
    seen = set()
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise DegenerateInput(f"{side} edge ({u}, {v}) out of range")
        if u == v:
            raise DegenerateInput(f"{side} self-edge at {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DegenerateInput(f"duplicate {side} edge {key}")
        seen.add(key)
        out.append(key)
    return tuple(sorted(out))


@dataclass(frozen=True)
class DrawingPair:
    """Two indexed point sets with their edge lists and optional annotations."""

    points0: Tuple[Point, ...]
    points1: Tuple[Point, ...]
    edges0: Tuple[Tuple[int, int], ...] = ()
    edges1: Tuple[Tuple[int, int], ...] = ()
    separating_line: Optional[Line] = None
    parallelogram: Optional[ParallelogramAnnotation] = None
    trace: Optional[ConstructionTrace] = None

    def __post_init__(self):
        pts0 = tuple(Point(*p) for p in self.points0)
        pts1 = tuple(Point(*p) for p in self.points1)
        if not pts0 or not pts1:
            raise DegenerateInput("both sides need at least one point")
        object.__setattr__(self, "points0", pts0)
        object.__setattr__(self, "points1", pts1)
        object.__setattr__(self, "edges0", _normalize_edges(self.edges0, len(pts0), "side-0"))
        object.__setattr__(self, "edges1", _normalize_edges(self.edges1, len(pts1), "side-1"))

    def side(self, i: int) -> Tuple[Point, ...]:
        return self.points0 if i == 0 else self.points1

    def edges(self, i: int) -> Tuple[Tuple[int, int], ...]:
        return self.edges0 if i == 0 else self.edges1


@dataclass(frozen=True)
class Violation:
    side: int
    pair: Tuple[int, int]
    kind: str  # "MissingWitness" | "ForbiddenWitness"
    witness: Optional[int]
    margin: float


@dataclass(frozen=True)
class VerificationReport:
    mode: str
    beta: float
    violations: Tuple[Violation, ...]
    borderline: Tuple[Tuple[int, Tuple[int, int], float], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class ParallelogramDrawingCheck:
    nicely_oriented: bool
    roots_at_outer_corners: bool
    b_corners_adjacent_to_roots: bool
    others_strictly_in_band: bool
    no_vertical_edges: bool

    @property
    def all_ok(self) -> bool:
        return (self.nicely_oriented and self.roots_at_outer_corners
                and self.b_corners_adjacent_to_roots
                and self.others_strictly_in_band and self.no_vertical_edges)


# ---------------------------------------------------------------------------
# vectorized margins
# ---------------------------------------------------------------------------

def _as_array(points: Sequence[Point]) -> np.ndarray:
    return np.asarray([(p[0], p[1]) for p in points], dtype=float)


def pair_witness_margins(P: np.ndarray, Q: np.ndarray, W: np.ndarray,
                         beta: float) -> Tuple[np.ndarray, np.ndarray]:
    """Margins and scales of every witness against every (p, q) pair.

    ``P``/``Q`` are ``(m, 2)`` pair endpoints, ``W`` is ``(k, 2)``.  Returns
    ``(margin, scale)`` of shape ``(m, k)``; positive margin means the
    witness is inside the open region by that Euclidean depth.
    """
    d = np.linalg.norm(Q - P, axis=1)
    if np.any(d == 0.0):
        raise DegenerateInput("beta region undefined for coincident points")
    dw_p = np.linalg.norm(W[None, :, :] - P[:, None, :], axis=2)
    dw_q = np.linalg.norm(W[None, :, :] - Q[:, None, :], axis=2)
    scale = np.maximum(d[:, None], np.maximum(dw_p, dw_q))
    if math.isinf(beta):
        u = (Q - P) / d[:, None]
        rel = W[None, :, :] - P[:, None, :]
        proj = np.einsum("mc,mkc->mk", u, rel)
        margin = np.minimum(proj, d[:, None] - proj)
        return margin, scale
    if not (beta >= 1.0 and math.isfinite(beta)):
        raise DegenerateInput(f"beta must lie in [1, inf], got {beta!r}")
    half = beta / 2.0
    c1 = (1.0 - half) * P + half * Q
    c2 = half * P + (1.0 - half) * Q
    r = half * d
    m1 = r[:, None] - np.linalg.norm(W[None, :, :] - c1[:, None, :], axis=2)
    m2 = r[:, None] - np.linalg.norm(W[None, :, :] - c2[:, None, :], axis=2)
    return np.minimum(m1, m2), scale


def _all_pairs(n: int) -> Tuple[np.ndarray, np.ndarray]:
    iu, jv = np.triu_indices(n, k=1)
    return iu, jv


def _side_margin_tables(points_own: Sequence[Point], points_other: Sequence[Point],
                        beta: float):
    """Pair indices plus the (pairs x witnesses) margin/scale tables."""
    n = len(points_own)
    iu, jv = _all_pairs(n)
    if len(iu) == 0:
        return iu, jv, None, None
    A = _as_array(points_own)
    W = _as_array(points_other)
    margin, scale = pair_witness_margins(A[iu], A[jv], W, beta)
    return iu, jv, margin, scale


def _check_distinct(points: Sequence[Point], side: str):
    seen = {}
    for i, p in enumerate(points):
        key = (p[0], p[1])
        if key in seen:
            raise DegenerateInput(f"{side} has coincident points {seen[key]} and {i}")
        seen[key] = i


def extract_mw_graphs(points0: Sequence[Point], points1: Sequence[Point],
                      beta: float, closed: bool):
    """Ground-truth mutual witness graphs of two point sets.

    An edge (u, v) is present on side i exactly when no point of the other
    side lies in the (closed or open) beta region of u and v.
    """
    pts0 = [Point(*p) for p in points0]
    pts1 = [Point(*p) for p in points1]
    if not pts0 or not pts1:
        raise DegenerateInput("both sides need at least one point")
    _check_distinct(pts0, "side 0")
    _check_distinct(pts1, "side 1")
    result = []
    for own, other in ((pts0, pts1), (pts1, pts0)):
        iu, jv, margin, scale = _side_margin_tables(own, other, beta)
        edges = []
        if margin is not None:
            tol = TOL * scale
            inside = margin >= -tol if closed else margin > tol
            blocked = inside.any(axis=1)
            edges = [(int(a), int(b)) for a, b, bl in zip(iu, jv, blocked) if not bl]
        result.append(tuple(sorted(edges)))
    return result[0], result[1]


def verify(d: DrawingPair, beta: float, mode: str = "strict",
           margin: float = TOL) -> VerificationReport:
    """Check a drawing pair against the mutual witness rule.

    ``closed`` mode tests the closed-region semantics, ``open`` the open
    ones, and ``strict`` demands both at once: adjacent pairs keep their
    closed region witness-free while non-adjacent pairs have a witness in
    the open region.  Violations carry the relevant witness margin;
    borderline verdicts (within tolerance of the boundary) are listed
    separately.
    """
    if mode not in ("open", "closed", "strict"):
        raise DegenerateInput(f"unknown mode {mode!r}")
    violations: List[Violation] = []
    borderline: List[Tuple[int, Tuple[int, int], float]] = []
    for side in (0, 1):
        own = d.side(side)
        other = d.side(1 - side)
        edge_set = set(d.edges(side))
        iu, jv, marg, scale = _side_margin_tables(own, other, beta)
        if marg is None:
            continue
        tol = np.maximum(TOL, margin) * scale
        closed_in = marg >= -tol
        open_in = marg > tol
        best = np.argmax(marg, axis=1)
        rows = np.arange(len(iu))
        best_margin = marg[rows, best]
        for idx in range(len(iu)):
            pair = (int(iu[idx]), int(jv[idx]))
            is_edge = pair in edge_set
            has_closed = bool(closed_in[idx].any())
            has_open = bool(open_in[idx].any())
            bm = float(best_margin[idx])
            if abs(bm) <= float(tol[idx, best[idx]]):
                borderline.append((side, pair, bm))
            if mode == "closed":
                if is_edge and has_closed:
                    w = int(np.argmax(marg[idx]))
                    violations.append(Violation(side, pair, "ForbiddenWitness", w, bm))
                elif not is_edge and not has_closed:
                    violations.append(Violation(side, pair, "MissingWitness", None, bm))
            elif mode == "open":
                if is_edge and has_open:
                    w = int(np.argmax(marg[idx]))
                    violations.append(Violation(side, pair, "ForbiddenWitness", w, bm))
                elif not is_edge and not has_open:
                    violations.append(Violation(side, pair, "MissingWitness", None, bm))
            else:  # strict
                if is_edge and has_closed:
                    w = int(np.argmax(marg[idx]))
                    violations.append(Violation(side, pair, "ForbiddenWitness", w, bm))
                elif not is_edge and not has_open:
                    violations.append(Violation(side, pair, "MissingWitness", None, bm))
    return VerificationReport(mode, beta, tuple(violations), tuple(borderline))


def verify_universal(d: DrawingPair, betas: Optional[Sequence[float]] = None
                     ) -> List[VerificationReport]:
    """Strict-mode verification at each sampled beta (default sample)."""
    if betas is None:
        betas = DEFAULT_BETAS
    for b in betas:
        if not (b >= 1.0):
            raise DegenerateInput(f"beta {b!r} outside [1, inf]")
    return [verify(d, b, "strict") for b in betas]


# ---------------------------------------------------------------------------
# parallelogram drawing checks
# ---------------------------------------------------------------------------

def _extent(points: Sequence[Point]) -> float:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return max(max(xs) - min(xs), max(ys) - min(ys), 1e-300)


def check_parallelogram_drawing(d: DrawingPair) -> ParallelogramDrawingCheck:
    """Shape conditions for a drawing annotated with parallelogram corners."""
    ann = d.parallelogram
    if ann is None:
        raise MissingAnnotation("drawing carries no parallelogram corners")
    s = _extent(list(d.points0) + list(d.points1) + [ann.a0, ann.b0, ann.a1, ann.b1])
    tol = TOL * s

    nicely = (ann.a0.y > ann.b1.y + tol and ann.b1.y > ann.b0.y + tol
              and ann.b0.y > ann.a1.y + tol
              and ann.a0.x < ann.b0.x - tol and ann.b0.x < ann.b1.x - tol
              and ann.b1.x < ann.a1.x - tol)

    def at(idx: Optional[int], side: int, corner: Point) -> bool:
        if idx is None:
            return False
        p = d.side(side)[idx]
        return abs(p.x - corner.x) <= tol and abs(p.y - corner.y) <= tol

    roots_ok = at(ann.a0_id, 0, ann.a0) and at(ann.a1_id, 1, ann.a1)

    def b_ok(side: int, b_id: Optional[int], corner: Point, root_id: Optional[int]) -> bool:
        if len(d.side(side)) == 1:
            return True  # vacuous for a single-vertex side
        if b_id is None or root_id is None or not at(b_id, side, corner):
            return False
        key = (min(b_id, root_id), max(b_id, root_id))
        return key in set(d.edges(side))

    b_adj = b_ok(0, ann.b0_id, ann.b0, ann.a0_id) and b_ok(1, ann.b1_id, ann.b1, ann.a1_id)

    corner_ids0 = {ann.a0_id, ann.b0_id}
    corner_ids1 = {ann.a1_id, ann.b1_id}
    in_band = True
    for side, skip in ((0, corner_ids0), (1, corner_ids1)):
        for idx, p in enumerate(d.side(side)):
            if idx in skip:
                continue
            if not (ann.b0.y + tol < p.y < ann.b1.y - tol):
                in_band = False

    no_vertical = True
    for side in (0, 1):
        pts = d.side(side)
        for u, v in d.edges(side):
            e = (pts[v].x - pts[u].x, pts[v].y - pts[u].y)
            ln = math.hypot(*e)
            if ln == 0.0 or abs(e[0]) <= TOL * ln:
                no_vertical = False

    return ParallelogramDrawingCheck(nicely, roots_ok, b_adj, in_band, no_vertical)


def strip_ratio(d: DrawingPair) -> float:
    """Height of the inner corner band over the full parallelogram height."""
    ann = d.parallelogram
    if ann is None:
        raise MissingAnnotation("drawing carries no parallelogram corners")
    denom = abs(ann.a0.y - ann.a1.y)
    s = _extent([ann.a0, ann.b0, ann.a1, ann.b1])
    if denom <= TOL * s:
        raise DegenerateInput("outer corners share a height")
    return abs(ann.b1.y - ann.b0.y) / denom
