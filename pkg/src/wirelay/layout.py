"""Wire layout post-processing: branch extraction, arc-spline smoothing,
strip energies and elongation metrics.

A solved Steiner tree is split into branches at terminals and at
junction vertices (tree degree >= 3). Each branch polyline is smoothed
by replacing interior corners with circular-arc fillets tangent to both
segments. Fillet radii start at the minimum admissible value

    r_min = 1.05 * wd / 2

which keeps the curve as close as possible to the optimal tree path and
satisfies the strict curvature bound kappa < 2 / wd with a 5% margin.
When adjacent fillets would overlap on a segment the radii shrink by
0.8 per iteration; radii may never drop below r_min, so layouts whose
corners cannot host any admissible fillet fail with
CannotSatisfyCurvature (the caller may relax wd or refine the mesh).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .clipping import clip_triangle_rect, polygon_area
from .errors import CannotSatisfyCurvature, EmbeddingFailure, WirelayError
from .graph import WeightedWireGraph
from .grid import PatternGrid
from .mesh import GarmentMesh, MotionSet
from .solver import SteinerTree
from .strain import StrainField

CURVATURE_MARGIN = 1.05
SHRINK_FACTOR = 0.8
DEFAULT_MAX_ITER = 10
COLLINEAR_TOL = 1e-9  # radians


# ---------------------------------------------------------------------------
# Arc-spline primitives


@dataclass(frozen=True)
class LineSeg:
    p0: tuple
    p1: tuple

    @property
    def length(self) -> float:
        return math.dist(self.p0, self.p1)

    @property
    def curvature(self) -> float:
        return 0.0

    def point(self, s: float):
        t = 0.0 if self.length == 0 else s / self.length
        return (
            self.p0[0] + (self.p1[0] - self.p0[0]) * t,
            self.p0[1] + (self.p1[1] - self.p0[1]) * t,
        )

    def tangent(self, s: float):
        d = (self.p1[0] - self.p0[0], self.p1[1] - self.p0[1])
        n = math.hypot(*d)
        return (d[0] / n, d[1] / n)


@dataclass(frozen=True)
class ArcSeg:
    center: tuple
    radius: float
    a0: float  # start angle, radians
    sweep: float  # signed sweep; positive is counter-clockwise

    @property
    def length(self) -> float:
        return self.radius * abs(self.sweep)

    @property
    def curvature(self) -> float:
        return 1.0 / self.radius

    def angle_at(self, s: float) -> float:
        t = 0.0 if self.length == 0 else s / self.length
        return self.a0 + self.sweep * t

    def point(self, s: float):
        a = self.angle_at(s)
        return (
            self.center[0] + self.radius * math.cos(a),
            self.center[1] + self.radius * math.sin(a),
        )

    def tangent(self, s: float):
        a = self.angle_at(s)
        if self.sweep >= 0:
            return (-math.sin(a), math.cos(a))
        return (math.sin(a), -math.cos(a))

    @property
    def p0(self):
        return self.point(0.0)

    @property
    def p1(self):
        return self.point(self.length)


@dataclass(frozen=True)
class ArcSpline:
    segments: tuple

    @property
    def length(self) -> float:
        return sum(s.length for s in self.segments)

    @property
    def start(self):
        return self.segments[0].p0 if self.segments else None

    @property
    def end(self):
        return self.segments[-1].p1 if self.segments else None

    def max_curvature(self) -> float:
        return max((s.curvature for s in self.segments), default=0.0)

    def sample(self, spacing: float) -> np.ndarray:
        """Points along the spline at most `spacing` apart (endpoints kept)."""
        pts = []
        for seg in self.segments:
            n = max(1, int(math.ceil(seg.length / spacing)))
            for i in range(n):
                pts.append(seg.point(seg.length * i / n))
        if self.segments:
            pts.append(self.segments[-1].p1)
        return np.asarray(pts)

    def to_json_dict(self) -> dict:
        out = []
        for seg in self.segments:
            if isinstance(seg, LineSeg):
                out.append(
                    {"type": "line", "p0": list(seg.p0), "p1": list(seg.p1)}
                )
            else:
                out.append(
                    {
                        "type": "arc",
                        "center": list(seg.center),
                        "radius": seg.radius,
                        "startAngle": seg.a0,
                        "sweep": seg.sweep,
                    }
                )
        return {"segments": out}


# ---------------------------------------------------------------------------
# Branch extraction


def extract_branches(tree: SteinerTree, graph: WeightedWireGraph, mesh: GarmentMesh):
    """Split the tree into simple vertex paths at terminals and junctions.

    Returns a list of vertex-id lists. Each branch endpoint is a terminal
    or a junction (degree >= 3); interior vertices have degree 2 and are
    not terminals.
    """
    pairs = [tuple(int(x) for x in graph.edges[e]) for e in tree.edges]
    return branches_from_pairs(pairs, tree.terminals)


def branches_from_pairs(pairs, terminals):
    """Branch decomposition of a tree given as (u, v) vertex pairs."""
    if not pairs:
        return []
    adj: dict[int, list[int]] = {}
    for u, v in pairs:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    for nbrs in adj.values():
        nbrs.sort()
    terminals = set(int(t) for t in terminals)
    breakpoints = {v for v, nbrs in adj.items() if len(nbrs) != 2 or v in terminals}
    if not breakpoints:
        raise WirelayError("tree without terminals or junctions")

    visited = set()  # undirected edges (u, v) with u < v
    branches = []
    for start in sorted(breakpoints):
        for nxt in adj[start]:
            key = (start, nxt) if start < nxt else (nxt, start)
            if key in visited:
                continue
            path = [start]
            prev, cur = start, nxt
            visited.add(key)
            while cur not in breakpoints:
                path.append(cur)
                following = [w for w in adj[cur] if w != prev]
                prev, cur = cur, following[0]
                key = (prev, cur) if prev < cur else (cur, prev)
                visited.add(key)
            path.append(cur)
            branches.append(path)
    return branches


def branch_points(mesh: GarmentMesh, branch) -> np.ndarray:
    return np.asarray(mesh.pattern)[np.asarray(branch, dtype=np.int64)]


# ---------------------------------------------------------------------------
# Smoothing


def _merge_collinear(points: np.ndarray) -> np.ndarray:
    """Drop interior vertices whose turn angle is negligible."""
    if len(points) <= 2:
        return points
    keep = [0]
    for i in range(1, len(points) - 1):
        a = points[i] - points[keep[-1]]
        b = points[i + 1] - points[i]
        na, nb = np.hypot(*a), np.hypot(*b)
        if na == 0:
            continue
        cross = abs(a[0] * b[1] - a[1] * b[0]) / (na * nb)
        dot = (a[0] * b[0] + a[1] * b[1]) / (na * nb)
        if cross < COLLINEAR_TOL and dot > 0:
            continue
        keep.append(i)
    keep.append(len(points) - 1)
    return points[keep]


def smooth_branch(points, wd: float, max_iter: int = DEFAULT_MAX_ITER) -> ArcSpline:
    """Fillet every interior corner of a polyline into a circular arc.

    Endpoints stay fixed; tangency gives C1 continuity between lines and
    arcs. Raises CannotSatisfyCurvature when a corner cannot host the
    minimum admissible radius within max_iter shrink iterations.
    """
    if wd <= 0:
        raise WirelayError("strip width must be positive")
    pts = _merge_collinear(np.asarray(points, dtype=np.float64))
    if len(pts) < 2:
        raise WirelayError("branch needs at least two points")
    if len(pts) == 2:
        return ArcSpline(segments=(LineSeg(tuple(pts[0]), tuple(pts[1])),))

    r_min = CURVATURE_MARGIN * wd / 2.0
    ncorner = len(pts) - 2
    seg_len = np.hypot(*(np.diff(pts, axis=0).T))
    # turn angle psi at each interior vertex
    psi = np.empty(ncorner)
    for i in range(ncorner):
        a = pts[i + 1] - pts[i]
        b = pts[i + 2] - pts[i + 1]
        ca = (a @ b) / (np.hypot(*a) * np.hypot(*b))
        psi[i] = math.acos(max(-1.0, min(1.0, ca)))
    tan_half = np.tan(psi / 2.0)

    radius = np.full(ncorner, r_min)
    for it in range(max_iter):
        t = radius * tan_half
        ok = True
        for s in range(len(seg_len)):
            need = 0.0
            if s > 0:
                need += t[s - 1]
            if s < ncorner:
                need += t[s]
            if need > seg_len[s] * (1.0 - 1e-9):
                ok = False
                scale = SHRINK_FACTOR
                for c in (s - 1, s):
                    if 0 <= c < ncorner:
                        radius[c] *= scale
        if ok:
            break
        low = np.nonzero(radius < r_min)[0]
        if len(low):
            c = int(low[0])
            raise CannotSatisfyCurvature(
                c,
                f"segments around corner {c} are too short for radius {r_min:.4g}",
            )
    else:
        t = radius * tan_half
        for s in range(len(seg_len)):
            need = (t[s - 1] if s > 0 else 0.0) + (t[s] if s < ncorner else 0.0)
            if need > seg_len[s] * (1.0 - 1e-9):
                raise CannotSatisfyCurvature(
                    min(s, ncorner - 1), f"no admissible fillet after {max_iter} iterations"
                )

    segments = []
    cursor = pts[0]
    for i in range(ncorner):
        corner = pts[i + 1]
        a = pts[i + 1] - pts[i]
        b = pts[i + 2] - pts[i + 1]
        ua = a / np.hypot(*a)
        ub = b / np.hypot(*b)
        ti = radius[i] * tan_half[i]
        if psi[i] < COLLINEAR_TOL:
            continue
        p_in = corner - ua * ti
        p_out = corner + ub * ti
        if np.hypot(*(p_in - cursor)) > 1e-12:
            segments.append(LineSeg(tuple(cursor), tuple(p_in)))
        cross = ua[0] * ub[1] - ua[1] * ub[0]
        if cross > 0:  # left turn, CCW arc; center left of ua
            n_in = np.array([-ua[1], ua[0]])
        else:
            n_in = np.array([ua[1], -ua[0]])
        center = p_in + n_in * radius[i]
        a0 = math.atan2(p_in[1] - center[1], p_in[0] - center[0])
        a1 = math.atan2(p_out[1] - center[1], p_out[0] - center[0])
        sweep = a1 - a0
        while sweep > math.pi:
            sweep -= 2 * math.pi
        while sweep < -math.pi:
            sweep += 2 * math.pi
        segments.append(ArcSeg(tuple(center), float(radius[i]), a0, sweep))
        cursor = p_out
    if np.hypot(*(pts[-1] - cursor)) > 1e-12:
        segments.append(LineSeg(tuple(cursor), tuple(pts[-1])))
    return ArcSpline(segments=tuple(segments))


def strip_self_intersects(spline: ArcSpline, wd: float) -> bool:
    """True when the wd-wide strip around the curve overlaps itself.

    Two curve points closer than wd in the plane overlap unless they are
    near neighbors along the curve; the admissible-curvature exclusion
    window is ~1.3 wd of arc length, padded here to 1.6 wd.
    """
    spacing = wd / 4.0
    pts = spline.sample(spacing)
    if len(pts) < 3:
        return False
    window = int(math.ceil(1.6 * wd / spacing))
    d2 = wd * wd * (0.999**2)
    for i in range(len(pts)):
        for j in range(i + window + 1, len(pts)):
            dx = pts[i][0] - pts[j][0]
            dy = pts[i][1] - pts[j][1]
            if dx * dx + dy * dy < d2:
                return True
    return False


# ---------------------------------------------------------------------------
# Wire layout container


@dataclass(frozen=True)
class WireLayout:
    tree: SteinerTree
    branches: tuple  # vertex-id tuples
    smoothed: tuple  # ArcSpline per branch
    wd: float
    eta: float

    @property
    def total_length(self) -> float:
        return sum(s.length for s in self.smoothed)

    def to_json_dict(self) -> dict:
        return {
            "wd": self.wd,
            "eta": self.eta,
            "tree": self.tree.to_json_dict(),
            "branches": [[int(v) for v in b] for b in self.branches],
            "smoothedBranches": [s.to_json_dict() for s in self.smoothed],
        }


def make_layout(
    tree: SteinerTree,
    graph: WeightedWireGraph,
    mesh: GarmentMesh,
    max_iter: int = DEFAULT_MAX_ITER,
) -> WireLayout:
    branches = extract_branches(tree, graph, mesh)
    smoothed = tuple(
        smooth_branch(branch_points(mesh, b), graph.wd, max_iter=max_iter)
        for b in branches
    )
    return WireLayout(
        tree=tree,
        branches=tuple(tuple(b) for b in branches),
        smoothed=smoothed,
        wd=graph.wd,
        eta=graph.eta,
    )


# ---------------------------------------------------------------------------
# Strip polygons and deformation energy


def _strip_polygons(spline: ArcSpline, wd: float):
    """Decompose the strip around a spline into quads of length <= wd/2.

    Straight pieces become rectangles; arc pieces become trapezoids
    inscribed in the osculating circle (inner edge shortened by
    (r - wd/2)/r, outer lengthened by (r + wd/2)/r).
    """
    half = wd / 2.0
    polys = []
    for seg in spline.segments:
        n = max(1, int(math.ceil(seg.length / (wd / 2.0))))
        step = seg.length / n
        for i in range(n):
            s0, s1 = i * step, (i + 1) * step
            if isinstance(seg, LineSeg):
                p0 = seg.point(s0)
                p1 = seg.point(s1)
                tx, ty = seg.tangent(0.0)
                nx, ny = -ty, tx
                polys.append(
                    [
                        (p0[0] - nx * half, p0[1] - ny * half),
                        (p1[0] - nx * half, p1[1] - ny * half),
                        (p1[0] + nx * half, p1[1] + ny * half),
                        (p0[0] + nx * half, p0[1] + ny * half),
                    ]
                )
            else:
                r = seg.radius
                if r <= half:
                    raise WirelayError("arc radius at or below wd/2; curvature bound broken")
                c = seg.center
                a0 = seg.angle_at(s0)
                a1 = seg.angle_at(s1)
                inner = r - half
                outer = r + half
                d0 = (math.cos(a0), math.sin(a0))
                d1 = (math.cos(a1), math.sin(a1))
                quad = [
                    (c[0] + inner * d0[0], c[1] + inner * d0[1]),
                    (c[0] + inner * d1[0], c[1] + inner * d1[1]),
                    (c[0] + outer * d1[0], c[1] + outer * d1[1]),
                    (c[0] + outer * d0[0], c[1] + outer * d0[1]),
                ]
                if polygon_area(quad) < 0:
                    quad.reverse()
                polys.append(quad)
    return polys


def _polygons_energy(polys, field: StrainField, mesh: GarmentMesh, eta: float, grid=None):
    if grid is None:
        grid = PatternGrid.for_strips(mesh, 2.0 * float(np.median(mesh.edge_pattern_lengths())))
    densities = np.asarray(field.per_face_density)
    faces = np.asarray(mesh.faces)
    pattern = np.asarray(mesh.pattern)
    total = 0.0
    for poly in polys:
        xs = [p[0] for p in poly]
        ys = [p[1] for p in poly]
        for fi in grid.faces_near_box((min(xs), min(ys)), (max(xs), max(ys))):
            tri = [tuple(q) for q in pattern[faces[fi]]]
            a = clip_triangle_rect(tri, poly)
            if a > 0.0:
                total += (float(densities[fi]) + eta) * a
    return total


def curve_deformation_energy(
    layout: WireLayout,
    field: StrainField,
    mesh: GarmentMesh,
    grid: PatternGrid = None,
    eta: float = None,
) -> float:
    """Strip-integral energy of the smoothed layout (same bookkeeping as
    the edge weights, extended to trapezoids under the arcs).

    `eta` defaults to the layout's own regularizer; comparisons across
    layouts must pass one common value so the metric is commensurable.
    """
    polys = []
    for spline in layout.smoothed:
        polys.extend(_strip_polygons(spline, layout.wd))
    eta_eval = layout.eta if eta is None else float(eta)
    return _polygons_energy(polys, field, mesh, eta_eval, grid=grid)


def polyline_strip_energy(
    points, wd: float, field: StrainField, mesh: GarmentMesh, eta: float, grid=None
) -> float:
    """Energy of an unsmoothed polyline, for smoothing-drift checks."""
    pts = np.asarray(points, dtype=np.float64)
    spline = ArcSpline(
        segments=tuple(
            LineSeg(tuple(pts[i]), tuple(pts[i + 1]))
            for i in range(len(pts) - 1)
            if math.dist(pts[i], pts[i + 1]) > 0
        )
    )
    return _polygons_energy(_strip_polygons(spline, wd), field, mesh, eta, grid=grid)


# ---------------------------------------------------------------------------
# Elongation metrics


@dataclass(frozen=True)
class LayoutMetrics:
    deformation_energy: float
    max_elongation_rate: float  # percent, whole tree (length-weighted)
    avg_elongation_rate: float  # percent
    total_length: float
    per_sequence: tuple  # (name, max%, avg%) per sequence
    per_branch: tuple = ()  # (branch index, max%, avg%) per branch

    def to_json_dict(self) -> dict:
        return {
            "deformationEnergy": self.deformation_energy,
            "maxElongationRate": self.max_elongation_rate,
            "avgElongationRate": self.avg_elongation_rate,
            "totalLength": self.total_length,
            "perSequence": [
                {"name": n, "max": mx, "avg": av} for n, mx, av in self.per_sequence
            ],
            "perBranch": [
                {"branch": i, "max": mx, "avg": av} for i, mx, av in self.per_branch
            ],
        }


def _embed_samples(mesh: GarmentMesh, samples: np.ndarray, grid: PatternGrid):
    """(faces, bary) arrays embedding pattern points into mesh faces."""
    fids = np.empty(len(samples), dtype=np.int64)
    bary = np.empty((len(samples), 3))
    for i, p in enumerate(samples):
        hit = grid.locate_point(p)
        if hit is None:
            raise EmbeddingFailure(f"sample {p} lies outside the pattern")
        fids[i] = hit[0]
        bary[i] = hit[1]
    return fids, bary


def elongation_rates(
    layout: WireLayout,
    mesh: GarmentMesh,
    motions: MotionSet,
    grid: PatternGrid = None,
):
    """(max%, avg%, per-sequence, per-branch) wire elongation breakdown.

    Branch samples at wd/4 spacing are embedded barycentrically in their
    rest faces and tracked through every frame; shortening is ignored.
    Whole-tree rates weight branches by length; per-branch rates are also
    reported since a single wire segment may stretch more than the tree.
    """
    if grid is None:
        grid = PatternGrid.for_strips(mesh, layout.wd)
    spacing = layout.wd / 4.0
    branch_samples = []
    for spline in layout.smoothed:
        pts = spline.sample(spacing)
        fids, bary = _embed_samples(mesh, pts, grid)
        rest_len = float(np.sum(np.hypot(*(np.diff(pts, axis=0).T))))
        branch_samples.append((fids, bary, rest_len))
    total_rest = sum(b[2] for b in branch_samples)
    if total_rest <= 0:
        raise WirelayError("layout has zero rest length")

    nb = len(branch_samples)
    per_sequence = []
    all_rates = []
    max_rate = 0.0
    branch_max = [0.0] * nb
    branch_rates = [[] for _ in range(nb)]
    for seq in motions.sequences:
        seq_rates = []
        for j in range(seq.frame_count):
            frame = seq.frames[j]
            deformed_total = 0.0
            for bi, (fids, bary, rest_len) in enumerate(branch_samples):
                tri = frame[np.asarray(mesh.faces)[fids]]  # (s, 3, 3)
                pos = np.einsum("sij,si->sj", tri, bary)
                blen = float(np.sum(np.linalg.norm(np.diff(pos, axis=0), axis=1)))
                deformed_total += blen
                if rest_len > 0:
                    brate = max(0.0, (blen - rest_len) / rest_len) * 100.0
                    branch_max[bi] = max(branch_max[bi], brate)
                    branch_rates[bi].append(brate)
            rate = max(0.0, (deformed_total - total_rest) / total_rest) * 100.0
            seq_rates.append(rate)
        smax = max(seq_rates)
        savg = sum(seq_rates) / len(seq_rates)
        per_sequence.append((seq.name, smax, savg))
        all_rates.extend(seq_rates)
        max_rate = max(max_rate, smax)
    avg_rate = sum(all_rates) / len(all_rates)
    per_branch = tuple(
        (bi, branch_max[bi], sum(r) / len(r) if r else 0.0)
        for bi, r in enumerate(branch_rates)
    )
    return max_rate, avg_rate, tuple(per_sequence), per_branch


def evaluate_layout(
    layout: WireLayout,
    field: StrainField,
    mesh: GarmentMesh,
    motions: MotionSet,
    grid: PatternGrid = None,
    eta: float = None,
) -> LayoutMetrics:
    energy = curve_deformation_energy(layout, field, mesh, grid=grid, eta=eta)
    max_rate, avg_rate, per_seq, per_branch = elongation_rates(
        layout, mesh, motions, grid=grid
    )
    return LayoutMetrics(
        deformation_energy=energy,
        max_elongation_rate=max_rate,
        avg_elongation_rate=avg_rate,
        total_length=layout.total_length,
        per_sequence=per_seq,
        per_branch=per_branch,
    )


def compare_layouts(named_layouts, field, mesh, motions, grid: PatternGrid = None, eta: float = None):
    """Rows of metrics for (name, WireLayout) pairs under ONE energy
    functional: eta defaults to the largest regularizer among the layouts
    (a baseline solved with uniform weights carries eta 0 and would
    otherwise understate its energy)."""
    if eta is None:
        eta = max((layout.eta for _, layout in named_layouts), default=0.0)
    rows = []
    for name, layout in named_layouts:
        m = evaluate_layout(layout, field, mesh, motions, grid=grid, eta=eta)
        rows.append(
            {
                "name": name,
                "deformationEnergy": m.deformation_energy,
                "maxElongationRate": m.max_elongation_rate,
                "avgElongationRate": m.avg_elongation_rate,
                "totalLength": m.total_length,
            }
        )
    return rows
