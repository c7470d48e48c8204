import math
import random

import pytest

from mwtrees.geometry import Point


def brute_region_member(p, q, beta, w, closed):
    """Independent membership test straight from the two-disk definition."""
    d = math.dist(p, q)
    if math.isinf(beta):
        ux, uy = (q[0] - p[0]) / d, (q[1] - p[1]) / d
        t = (w[0] - p[0]) * ux + (w[1] - p[1]) * uy
        return (0.0 <= t <= d) if closed else (0.0 < t < d)
    half = beta / 2.0
    c1 = ((1 - half) * p[0] + half * q[0], (1 - half) * p[1] + half * q[1])
    c2 = (half * p[0] + (1 - half) * q[0], half * p[1] + (1 - half) * q[1])
    r = half * d
    d1, d2 = math.dist(w, c1), math.dist(w, c2)
    if closed:
        return d1 <= r and d2 <= r
    return d1 < r and d2 < r


def brute_mw_edges(points0, points1, beta, closed):
    """Reference extraction with plain loops, no shared code paths."""
    out = []
    for own, other in ((points0, points1), (points1, points0)):
        edges = []
        for i in range(len(own)):
            for j in range(i + 1, len(own)):
                if not any(brute_region_member(own[i], own[j], beta, w, closed)
                           for w in other):
                    edges.append((i, j))
        out.append(tuple(edges))
    return tuple(out)


def random_points(rng, n, span=10.0):
    pts = set()
    while len(pts) < n:
        pts.add((round(rng.uniform(-span, span), 6), round(rng.uniform(-span, span), 6)))
    return [Point(x, y) for x, y in sorted(pts)]


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
