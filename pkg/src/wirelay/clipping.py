"""Convex polygon clipping and areas in pattern space.

All polygons are sequences of (x, y) pairs in counter-clockwise order.
The clipper is Sutherland-Hodgman restricted to convex clip polygons,
which is all the strip/triangle intersections in this toolkit need.
"""

from __future__ import annotations


def polygon_area(poly) -> float:
    """Signed shoelace area; positive for counter-clockwise polygons."""
    n = len(poly)
    if n < 3:
        return 0.0
    acc = 0.0
    x0, y0 = poly[-1]
    for x1, y1 in poly:
        acc += x0 * y1 - x1 * y0
        x0, y0 = x1, y1
    return 0.5 * acc


def convex_clip(subject, clip):
    """Clip a convex CCW subject polygon by a convex CCW clip polygon.

    Returns the intersection polygon (possibly empty). Degenerate output
    (fewer than 3 vertices) is returned as-is; its area is zero.
    """
    output = list(subject)
    if not output:
        return []
    cx0, cy0 = clip[-1]
    for cx1, cy1 in clip:
        if not output:
            return []
        ex, ey = cx1 - cx0, cy1 - cy0
        inp = output
        output = []
        sx, sy = inp[-1]
        s_in = ex * (sy - cy0) - ey * (sx - cx0) >= 0.0
        for px, py in inp:
            p_in = ex * (py - cy0) - ey * (px - cx0) >= 0.0
            if p_in != s_in:
                # segment crosses the clip line; add the intersection point
                dx, dy = px - sx, py - sy
                denom = ex * dy - ey * dx
                if denom != 0.0:
                    t = (ex * (cy0 - sy) - ey * (cx0 - sx)) / denom
                    output.append((sx + t * dx, sy + t * dy))
            if p_in:
                output.append((px, py))
            sx, sy, s_in = px, py, p_in
        cx0, cy0 = cx1, cy1
    return output


def clip_triangle_rect(tri, rect) -> float:
    """Area of the intersection of a CCW triangle with a CCW rectangle.

    Returns 0.0 for disjoint or degenerate intersections.
    """
    poly = convex_clip(tri, rect)
    if len(poly) < 3:
        return 0.0
    area = polygon_area(poly)
    return area if area > 0.0 else 0.0


def box_clip_areas(tris, x1, half: float):
    """Intersection areas of many triangles with boxes [0, x1] x [-half, half].

    tris: (n, 3, 2) float array of CCW triangles already transformed into
    the box frame; x1 is a scalar or an (n,) array of per-row box lengths.
    Vectorized Sutherland-Hodgman on padded vertex arrays; matches
    clip_triangle_rect up to floating-point roundoff.
    """
    import numpy as np

    tris = np.asarray(tris, dtype=np.float64)
    n = len(tris)
    if n == 0:
        return np.zeros(0)
    x1 = np.broadcast_to(np.asarray(x1, dtype=np.float64), (n,))[:, None]
    # After clipping a triangle by 4 halfplanes the polygon has at most 7
    # vertices; pad to 8 slots.
    m_cap = 8
    pts = np.full((n, m_cap, 2), np.nan)
    pts[:, :3, :] = tris
    counts = np.full(n, 3, dtype=np.int64)

    # halfplanes as (axis, sign, bound): keep sign*p[axis] <= bound
    planes = ((0, -1.0, 0.0), (0, 1.0, x1), (1, -1.0, half), (1, 1.0, half))
    for axis, sign, bound in planes:
        vals = sign * pts[:, :, axis]
        inside = vals <= bound
        idx = np.arange(m_cap)
        valid = idx[None, :] < counts[:, None]
        inside &= valid
        nxt = (idx + 1) % np.maximum(counts, 1)[:, None]
        rows = np.arange(n)[:, None]
        p0 = pts
        p1 = pts[rows, nxt]
        in0 = inside
        in1 = inside[rows, nxt]
        v0 = vals
        v1 = (sign * p1[:, :, axis])
        # intersection parameter along each directed edge
        denom = v1 - v0
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (bound - v0) / denom
            cross = in0 != in1
            ipt = p0 + t[:, :, None] * (p1 - p0)  # nan where unused, masked below

        # each edge emits: p0 if in0; intersection if crossing
        emit0 = in0 & valid
        emit1 = cross & valid
        emitted = emit0.astype(np.int64) + emit1.astype(np.int64)
        new_counts = emitted.sum(axis=1)
        offsets = np.cumsum(emitted, axis=1) - emitted
        out = np.full((n, m_cap, 2), np.nan)
        r0, c0 = np.nonzero(emit0)
        out[r0, offsets[r0, c0]] = p0[r0, c0]
        r1, c1 = np.nonzero(emit1)
        out[r1, offsets[r1, c1] + emit0[r1, c1]] = ipt[r1, c1]
        pts = out
        counts = new_counts

    # shoelace over the padded polygons
    idx = np.arange(m_cap)
    valid = idx[None, :] < counts[:, None]
    x = np.where(valid, pts[:, :, 0], 0.0)
    y = np.where(valid, pts[:, :, 1], 0.0)
    nxt = (idx + 1) % np.maximum(counts, 1)[:, None]
    rows = np.arange(n)[:, None]
    xs = x[rows, nxt]
    ys = y[rows, nxt]
    area = 0.5 * np.where(valid, x * ys - xs * y, 0.0).sum(axis=1)
    area[counts < 3] = 0.0
    return np.maximum(area, 0.0)
