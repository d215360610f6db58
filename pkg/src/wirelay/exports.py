"""Pattern-space exports: SVG heatmaps and layout overlays, PLY, CSV."""

from __future__ import annotations

import csv
import math

import numpy as np

from .layout import ArcSeg, LineSeg, WireLayout
from .mesh import GarmentMesh
from .strain import StrainField

HEAT_BINS = 8
# blue -> red ramp
_RAMP = [
    (33, 102, 172),
    (67, 147, 195),
    (146, 197, 222),
    (209, 229, 240),
    (253, 219, 199),
    (244, 165, 130),
    (214, 96, 77),
    (178, 24, 43),
]


def log_bins(densities, bins: int = HEAT_BINS):
    """Logarithmic bin edges over the positive density range.

    Returns (edges, floor) where edges has bins+1 entries; densities at or
    below the floor fall into bin 0.
    """
    d = np.asarray(densities)
    pos = d[d > 0]
    if len(pos) == 0:
        return [0.0] * (bins + 1), 0.0
    hi = float(pos.max())
    lo = float(pos.min())
    if hi <= lo:
        hi = lo * 10.0
    lo = max(lo, hi * 1e-9)
    edges = [0.0] + [
        10.0 ** (math.log10(lo) + (math.log10(hi) - math.log10(lo)) * i / (bins - 1))
        for i in range(bins)
    ]
    return edges, lo


def bin_of(value: float, edges) -> int:
    for i in range(len(edges) - 1, 0, -1):
        if value >= edges[i]:
            return min(i, len(edges) - 2)
    return 0


def _bounds(mesh: GarmentMesh, pad: float = 0.02):
    p = np.asarray(mesh.pattern)
    lo = p.min(axis=0)
    hi = p.max(axis=0)
    span = max(hi[0] - lo[0], hi[1] - lo[1])
    return lo - pad * span, hi + pad * span


class _Svg:
    def __init__(self, lo, hi, width=900):
        self.lo, self.hi = lo, hi
        span_x = hi[0] - lo[0]
        span_y = hi[1] - lo[1]
        self.scale = width / span_x
        self.w = width
        self.h = span_y * self.scale
        self.parts = []

    def pt(self, p):
        # flip y so the pattern's +v points up
        return (
            (p[0] - self.lo[0]) * self.scale,
            self.h - (p[1] - self.lo[1]) * self.scale,
        )

    def poly(self, pts, fill="none", stroke="none", width=1.0, opacity=1.0):
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in (self.pt(p) for p in pts))
        self.parts.append(
            f'<polygon points="{coords}" fill="{fill}" stroke="{stroke}" '
            f'stroke-width="{width}" fill-opacity="{opacity}"/>'
        )
    def path(self, d, stroke="black", width=1.5, fill="none"):
        self.parts.append(
            f'<path d="{d}" stroke="{stroke}" stroke-width="{width}" fill="{fill}"/>'
        )

    def circle(self, p, r, fill):
        x, y = self.pt(p)
        self.parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r}" fill="{fill}"/>')

    def text(self, p, s, size=12):
        x, y = self.pt(p)
        self.parts.append(f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}">{s}</text>')

    def raw_text(self, x, y, s, size=12):
        self.parts.append(f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}">{s}</text>')

    def raw_rect(self, x, y, w, h, fill):
        self.parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" fill="{fill}"/>'
        )

    def tostring(self) -> str:
        legend_h = 60
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.w:.0f}" '
            f'height="{self.h + legend_h:.0f}" viewBox="0 0 {self.w:.0f} {self.h + legend_h:.0f}">'
            + "".join(self.parts)
            + "</svg>"
        )


def heatmap_svg(mesh: GarmentMesh, field: StrainField) -> str:
    """Pattern triangles colored by log-binned density plus a legend."""
    lo, hi = _bounds(mesh)
    svg = _Svg(lo, hi)
    edges, _ = log_bins(field.per_face_density)
    pattern = np.asarray(mesh.pattern)
    for fi, tri in enumerate(np.asarray(mesh.faces)):
        b = bin_of(float(field.per_face_density[fi]), edges)
        r, g, bl = _RAMP[b]
        svg.poly(pattern[tri], fill=f"rgb({r},{g},{bl})")
    for e in mesh.boundary_edges():
        u, v = mesh.edges[e]
        svg.poly([pattern[u], pattern[v]], stroke="black", width=1.0)
    # legend strip along the bottom, labelled with bin edges (Pa)
    y0 = svg.h + 18
    bw = svg.w / (len(_RAMP) + 1)
    for i, (r, g, bl) in enumerate(_RAMP):
        svg.raw_rect(i * bw, y0, bw, 14, f"rgb({r},{g},{bl})")
        svg.raw_text(i * bw, y0 + 28, f"{edges[i]:.2g}", size=10)
    svg.raw_text(len(_RAMP) * bw, y0 + 28, f"{edges[-1]:.2g} Pa (log scale)", size=10)
    return svg.tostring()


def _spline_path(svg: _Svg, spline) -> str:
    d = []
    first = True
    for seg in spline.segments:
        if isinstance(seg, LineSeg):
            p0 = svg.pt(seg.p0)
            p1 = svg.pt(seg.p1)
            if first:
                d.append(f"M {p0[0]:.2f} {p0[1]:.2f}")
                first = False
            d.append(f"L {p1[0]:.2f} {p1[1]:.2f}")
        elif isinstance(seg, ArcSeg):
            p0 = svg.pt(seg.p0)
            p1 = svg.pt(seg.p1)
            if first:
                d.append(f"M {p0[0]:.2f} {p0[1]:.2f}")
                first = False
            r = seg.radius * svg.scale
            # y-flip inverts the sweep direction
            sweep_flag = 0 if seg.sweep > 0 else 1
            d.append(f"A {r:.2f} {r:.2f} 0 0 {sweep_flag} {p1[0]:.2f} {p1[1]:.2f}")
    return " ".join(d)


def overlay_svg(
    mesh: GarmentMesh,
    field: StrainField,
    layouts,
    terminals=None,
) -> str:
    """Heatmap plus smoothed strip centerlines; layouts is [(name, WireLayout, color)]."""
    lo, hi = _bounds(mesh)
    svg = _Svg(lo, hi)
    edges_, _ = log_bins(field.per_face_density)
    pattern = np.asarray(mesh.pattern)
    for fi, tri in enumerate(np.asarray(mesh.faces)):
        b = bin_of(float(field.per_face_density[fi]), edges_)
        r, g, bl = _RAMP[b]
        svg.poly(pattern[tri], fill=f"rgb({r},{g},{bl})", opacity=0.6)
    for name, layout, color in layouts:
        for spline in layout.smoothed:
            svg.path(_spline_path(svg, spline), stroke=color, width=3.0)
    if terminals is not None:
        for t in terminals:
            svg.circle(pattern[int(t)], 5, "black")
    y = 16
    for name, _, color in layouts:
        svg.raw_rect(8, y - 10, 12, 12, color)
        svg.raw_text(26, y, name)
        y += 18
    return svg.tostring()


def write_face_colors_ply(path, mesh: GarmentMesh, field: StrainField) -> None:
    """3D mesh with per-face heat colors, for external viewers."""
    edges, _ = log_bins(field.per_face_density)
    with open(path, "w") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"element vertex {mesh.num_vertices}\n")
        fh.write("property float x\nproperty float y\nproperty float z\n")
        fh.write(f"element face {mesh.num_faces}\n")
        fh.write("property list uchar int vertex_indices\n")
        fh.write("property uchar red\nproperty uchar green\nproperty uchar blue\n")
        fh.write("end_header\n")
        for x, y, z in np.asarray(mesh.vertices):
            fh.write(f"{x} {y} {z}\n")
        for fi, (a, b, c) in enumerate(np.asarray(mesh.faces)):
            r, g, bl = _RAMP[bin_of(float(field.per_face_density[fi]), edges)]
            fh.write(f"3 {a} {b} {c} {r} {g} {bl}\n")


def write_metrics_csv(path, rows) -> None:
    cols = ["name", "deformationEnergy", "maxElongationRate", "avgElongationRate", "totalLength"]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols)
        w.writeheader()
        for row in rows:
            w.writerow({k: row[k] for k in cols})
