import math

import numpy as np
import pytest

from wirelay.clipping import clip_triangle_rect, convex_clip, polygon_area


def rotated_rect(cx, cy, w, h, ang):
    c, s = math.cos(ang), math.sin(ang)
    half = [(-w / 2, -h / 2), (w / 2, -h / 2), (w / 2, h / 2), (-w / 2, h / 2)]
    return [(cx + c * x - s * y, cy + s * x + c * y) for x, y in half]


def mc_area(tri, rect, samples, rng):
    """Monte Carlo oracle: fraction of rect-bbox samples inside both shapes."""
    xs = [p[0] for p in rect]
    ys = [p[1] for p in rect]
    lo = np.array([min(xs), min(ys)])
    hi = np.array([max(xs), max(ys)])
    pts = lo + rng.random((samples, 2)) * (hi - lo)

    def inside(poly):
        ok = np.ones(len(pts), dtype=bool)
        n = len(poly)
        for i in range(n):
            x0, y0 = poly[i]
            x1, y1 = poly[(i + 1) % n]
            ok &= (x1 - x0) * (pts[:, 1] - y0) - (y1 - y0) * (pts[:, 0] - x0) >= 0
        return ok

    frac = np.count_nonzero(inside(tri) & inside(rect)) / samples
    return frac * float(np.prod(hi - lo))


def test_half_square():
    tri = [(0, 0), (1, 0), (0, 1)]
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    assert clip_triangle_rect(tri, sq) == pytest.approx(0.5, abs=1e-12)


def test_rect_inside_triangle():
    tri = [(0, 0), (10, 0), (0, 10)]
    rect = [(1, 1), (2, 1), (2, 2), (1, 2)]
    assert clip_triangle_rect(tri, rect) == pytest.approx(1.0, abs=1e-12)


def test_disjoint_is_zero():
    tri = [(5, 5), (6, 5), (5, 6)]
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    assert clip_triangle_rect(tri, sq) == 0.0


def test_degenerate_touching_is_zero():
    tri = [(1, 0), (2, 0), (1, 1)]  # shares only the edge x=1 with the square
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    assert clip_triangle_rect(tri, sq) == pytest.approx(0.0, abs=1e-12)


def test_polygon_area_signs():
    ccw = [(0, 0), (1, 0), (1, 1), (0, 1)]
    assert polygon_area(ccw) == pytest.approx(1.0)
    assert polygon_area(list(reversed(ccw))) == pytest.approx(-1.0)


def test_clip_commutes_with_order():
    tri = [(0.1, 0.1), (0.9, 0.2), (0.3, 0.8)]
    rect = rotated_rect(0.5, 0.4, 0.6, 0.3, 0.4)
    a = clip_triangle_rect(tri, rect)
    poly = convex_clip(rect, tri)
    b = abs(polygon_area(poly))
    assert a == pytest.approx(b, rel=1e-12)


def test_monte_carlo_random_pairs():
    rng = np.random.default_rng(7)
    for _ in range(25):
        while True:
            p = rng.random((3, 2))
            if polygon_area([tuple(q) for q in p]) < 0:
                p = p[::-1]
            if polygon_area([tuple(q) for q in p]) > 0.05:
                break
        tri = [tuple(q) for q in p]
        rect = rotated_rect(
            rng.random() * 0.8 + 0.1,
            rng.random() * 0.8 + 0.1,
            rng.random() * 0.7 + 0.1,
            rng.random() * 0.7 + 0.1,
            rng.random() * math.pi,
        )
        exact = clip_triangle_rect(tri, rect)
        approx = mc_area(tri, rect, 200_000, rng)
        assert exact == pytest.approx(approx, abs=2e-3)
