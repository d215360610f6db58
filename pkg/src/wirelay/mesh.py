"""Garment mesh data model: 3D triangles, 2D rest pattern, motions, terminals.

The rest state is the flattened 2D pattern; every length, area, rectangle
and clipping operation downstream happens in pattern space. Vertices are
split per pattern chart, so each vertex carries exactly one (u, v) rest
coordinate and pattern pieces are the edge-connected face components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateFace,
    MotionMismatch,
    NonManifold,
    SeamEdge,
    WirelayError,
)

DEGENERATE_AREA = 1e-12  # m^2, double-precision noise floor at meter scale
BARY_TOL = 1e-9


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class GarmentMesh:
    """Immutable triangle mesh with per-vertex 2D rest-pattern coordinates.

    vertices      (n, 3) float64, meters
    pattern       (n, 2) float64, meters
    faces         (m, 3) int32, counter-clockwise in pattern space
    piece_id      (m,) int32, pattern piece per face
    edges         (e, 2) int32, u < v, sorted lexicographically
    edge_faces    tuple of per-edge incident face tuples (1 or 2 faces)
    source_vertex (n,) int32, originating input vertex (identity if none)
    glued_pairs   optional boundary-edge index pairs declared as seams
    """

    vertices: np.ndarray
    pattern: np.ndarray
    faces: np.ndarray
    piece_id: np.ndarray
    edges: np.ndarray
    edge_faces: tuple
    source_vertex: np.ndarray
    glued_pairs: tuple = ()
    _edge_index: dict = field(default=None, repr=False, compare=False)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_id(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        return self._edge_index[(u, v)]

    def boundary_edges(self) -> np.ndarray:
        return np.array(
            [i for i, fs in enumerate(self.edge_faces) if len(fs) == 1], dtype=np.int32
        )

    def face_pattern(self, f: int) -> np.ndarray:
        """(3, 2) pattern corners of face f."""
        return self.pattern[self.faces[f]]

    def pattern_areas(self) -> np.ndarray:
        """Signed rest areas of all faces (positive for CCW faces)."""
        p = self.pattern[self.faces]  # (m, 3, 2)
        a = p[:, 1] - p[:, 0]
        b = p[:, 2] - p[:, 0]
        return 0.5 * (a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])

    def edge_pattern_length(self, e: int) -> float:
        u, v = self.edges[e]
        return float(np.linalg.norm(self.pattern[v] - self.pattern[u]))

    def edge_pattern_lengths(self) -> np.ndarray:
        d = self.pattern[self.edges[:, 1]] - self.pattern[self.edges[:, 0]]
        return np.hypot(d[:, 0], d[:, 1])

    def edge_piece(self, e: int) -> int:
        """Piece of an edge; raises SeamEdge if its faces disagree."""
        pieces = {int(self.piece_id[f]) for f in self.edge_faces[e]}
        if len(pieces) != 1:
            raise SeamEdge(e)
        return pieces.pop()

    def content_hash(self) -> str:
        import hashlib

        h = hashlib.sha256()
        for a in (self.vertices, self.pattern, self.faces):
            h.update(np.ascontiguousarray(a).tobytes())
        for pair in self.glued_pairs:
            h.update(repr(tuple(pair)).encode())
        return h.hexdigest()


def build_mesh(
    vertices,
    faces,
    pattern,
    source_vertex=None,
    glued_pairs=(),
) -> GarmentMesh:
    """Validate raw arrays and derive adjacency, pieces and edge ordering."""
    vertices = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
    pattern = np.asarray(pattern, dtype=np.float64).reshape(-1, 2)
    faces = np.asarray(faces, dtype=np.int32).reshape(-1, 3)
    n = len(vertices)
    if len(pattern) != n:
        raise WirelayError(f"pattern count {len(pattern)} != vertex count {n}")
    if source_vertex is None:
        source_vertex = np.arange(n, dtype=np.int32)
    else:
        source_vertex = np.asarray(source_vertex, dtype=np.int32)

    if faces.size and (faces.min() < 0 or faces.max() >= n):
        raise WirelayError("face index out of range")

    # Degenerate faces: rest-pattern area above the noise floor, CCW required.
    p = pattern[faces]
    a = p[:, 1] - p[:, 0]
    b = p[:, 2] - p[:, 0]
    areas = 0.5 * (a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])
    bad = np.nonzero(areas <= DEGENERATE_AREA)[0]
    if len(bad):
        f = int(bad[0])
        raise DegenerateFace(f, float(areas[f]))

    # Undirected edge -> incident faces.
    edge_map: dict[tuple[int, int], list[int]] = {}
    for fi, (va, vb, vc) in enumerate(faces):
        for u, v in ((va, vb), (vb, vc), (vc, va)):
            key = (int(u), int(v)) if u < v else (int(v), int(u))
            edge_map.setdefault(key, []).append(fi)
    for key, fs in edge_map.items():
        if len(fs) > 2:
            raise NonManifold(key, len(fs))

    keys = sorted(edge_map)
    edges = np.array(keys, dtype=np.int32).reshape(-1, 2)
    edge_faces = tuple(tuple(edge_map[k]) for k in keys)
    edge_index = {k: i for i, k in enumerate(keys)}

    # Pattern pieces: connected components of faces over shared edges.
    parent = list(range(len(faces)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for fs in edge_faces:
        if len(fs) == 2:
            ra, rb = find(fs[0]), find(fs[1])
            if ra != rb:
                parent[rb] = ra
    roots = {}
    piece_id = np.empty(len(faces), dtype=np.int32)
    for fi in range(len(faces)):
        r = find(fi)
        piece_id[fi] = roots.setdefault(r, len(roots))

    for pair in glued_pairs:
        ea, eb = int(pair[0]), int(pair[1])
        for e in (ea, eb):
            if not 0 <= e < len(edges):
                raise WirelayError(f"glued edge {e} out of range")
            if len(edge_faces[e]) != 1:
                raise WirelayError(f"glued edge {e} is not a boundary edge")

    return GarmentMesh(
        vertices=_freeze(vertices),
        pattern=_freeze(pattern),
        faces=_freeze(faces),
        piece_id=_freeze(piece_id),
        edges=_freeze(edges),
        edge_faces=edge_faces,
        source_vertex=_freeze(source_vertex),
        glued_pairs=tuple((int(a), int(b)) for a, b in glued_pairs),
        _edge_index=edge_index,
    )


# ---------------------------------------------------------------------------
# Motions


@dataclass(frozen=True)
class MotionSequence:
    name: str
    frames: np.ndarray  # (k, n, 3) float64

    @property
    def frame_count(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True)
class MotionSet:
    sequences: tuple

    @property
    def names(self):
        return [s.name for s in self.sequences]

    def content_hash(self) -> str:
        import hashlib

        h = hashlib.sha256()
        for s in self.sequences:
            h.update(s.name.encode())
            h.update(np.ascontiguousarray(s.frames).tobytes())
        return h.hexdigest()


def build_motion_set(named_frames, mesh: GarmentMesh) -> MotionSet:
    """Assemble and validate motion sequences against a mesh.

    Each entry is (name, frames) with frames shaped (k, n, 3). Frames given
    for the original (pre-split) vertex count are expanded through the
    mesh's source_vertex mapping.
    """
    seqs = []
    n = mesh.num_vertices
    n_src = int(mesh.source_vertex.max()) + 1 if n else 0
    for name, frames in named_frames:
        frames = np.asarray(frames, dtype=np.float64)
        if frames.ndim != 3 or frames.shape[2] != 3:
            raise MotionMismatch(f"sequence {name!r}: frames must be (k, n, 3)")
        if frames.shape[0] < 1:
            raise MotionMismatch(f"sequence {name!r}: needs at least one frame")
        if frames.shape[1] == n:
            pass
        elif frames.shape[1] == n_src:
            frames = frames[:, mesh.source_vertex, :]
        else:
            raise MotionMismatch(
                f"sequence {name!r}: {frames.shape[1]} positions per frame, "
                f"mesh has {n} vertices ({n_src} source vertices)"
            )
        seqs.append(MotionSequence(name=name, frames=_freeze(frames)))
    if not seqs:
        raise MotionMismatch("motion set needs at least one sequence")
    return MotionSet(sequences=tuple(seqs))


def rest_motion(mesh: GarmentMesh, frames: int = 1, name: str = "rest") -> MotionSet:
    """Motion set that repeats the rest embedding (pattern lifted to z=0)."""
    rest = np.zeros((mesh.num_vertices, 3))
    rest[:, :2] = mesh.pattern
    return build_motion_set([(name, np.repeat(rest[None], frames, axis=0))], mesh)


# ---------------------------------------------------------------------------
# Terminals


@dataclass(frozen=True)
class TerminalSet:
    """Terminals as vertex ids or (face, barycentric) placements."""

    entries: tuple

    @property
    def count(self) -> int:
        return len(self.entries)


def make_terminal_set(entries) -> TerminalSet:
    """Validate terminal entries: ints, or (face, (b0, b1, b2)) pairs."""
    norm = []
    for t in entries:
        if isinstance(t, (int, np.integer)):
            norm.append(int(t))
        else:
            f, bary = t
            bary = tuple(float(x) for x in bary)
            if len(bary) != 3:
                raise WirelayError("barycentric coordinate needs 3 weights")
            if min(bary) < -BARY_TOL or abs(sum(bary) - 1.0) > BARY_TOL:
                raise WirelayError(f"invalid barycentric coordinate {bary}")
            norm.append((int(f), bary))
    if len(norm) < 2:
        raise WirelayError("terminal set needs at least 2 terminals")
    return TerminalSet(entries=tuple(norm))


# ---------------------------------------------------------------------------
# Terminal insertion (face subdivision)


def insert_terminal(mesh: GarmentMesh, face: int, bary, motions: MotionSet = None):
    """Insert a terminal inside a face, subdividing it around a new vertex.

    Returns (mesh, vertex_index, motions). Barycentric weights at a corner
    (>= 1 - 1e-9) snap to that corner without subdivision; weights at an
    edge (<= 1e-9) split the edge and both incident faces, keeping all mesh
    invariants. Motion frames, when given, are re-embedded with the same
    weights.
    """
    if not 0 <= face < mesh.num_faces:
        raise WirelayError(f"face {face} out of range")
    w = np.asarray(bary, dtype=np.float64)
    if w.shape != (3,) or w.min() < -BARY_TOL or abs(w.sum() - 1.0) > BARY_TOL:
        raise WirelayError(f"invalid barycentric coordinate {bary}")
    w = np.clip(w, 0.0, None)
    w = w / w.sum()
    corners = mesh.faces[face]

    hi = int(np.argmax(w))
    if w[hi] >= 1.0 - BARY_TOL:
        return mesh, int(corners[hi]), motions

    lo = int(np.argmin(w))
    vertices = np.asarray(mesh.vertices)
    pattern = np.asarray(mesh.pattern)
    faces = [tuple(f) for f in np.asarray(mesh.faces)]

    new_v = mesh.num_vertices
    new_pos3 = w @ vertices[corners]
    new_pos2 = w @ pattern[corners]

    if w[lo] <= BARY_TOL:
        # On an edge: split the edge, bisecting every incident face.
        u, v = (int(corners[(lo + 1) % 3]), int(corners[(lo + 2) % 3]))
        combo = {u: float(w[(lo + 1) % 3]), v: float(w[(lo + 2) % 3])}
        eid = mesh.edge_id(u, v)
        new_faces = []
        for fi, tri in enumerate(faces):
            if fi in mesh.edge_faces[eid]:
                a, b, c = tri
                # rotate so the split edge is (b, c)
                while {b, c} != {u, v}:
                    a, b, c = b, c, a
                new_faces.append((a, b, new_v))
                new_faces.append((a, new_v, c))
            else:
                new_faces.append(tri)
        faces = new_faces
    else:
        combo = {int(c): float(wi) for c, wi in zip(corners, w)}
        a, b, c = faces[face]
        faces = (
            faces[:face]
            + [(a, b, new_v), (b, c, new_v), (c, a, new_v)]
            + faces[face + 1 :]
        )

    vertices = np.vstack([vertices, new_pos3[None]])
    pattern = np.vstack([pattern, new_pos2[None]])
    source = np.append(np.asarray(mesh.source_vertex), -1).astype(np.int32)
    # Glued pairs reference edge ids, which shift under subdivision; the
    # split never touches boundary edges here, so remap by endpoint lookup.
    out = build_mesh(vertices, faces, pattern, source_vertex=source)
    if mesh.glued_pairs:
        remapped = []
        for ea, eb in mesh.glued_pairs:
            pa = tuple(int(x) for x in mesh.edges[ea])
            pb = tuple(int(x) for x in mesh.edges[eb])
            remapped.append((out.edge_id(*pa), out.edge_id(*pb)))
        out = GarmentMesh(
            vertices=out.vertices,
            pattern=out.pattern,
            faces=out.faces,
            piece_id=out.piece_id,
            edges=out.edges,
            edge_faces=out.edge_faces,
            source_vertex=out.source_vertex,
            glued_pairs=tuple(remapped),
            _edge_index=out._edge_index,
        )

    new_motions = None
    if motions is not None:
        seqs = []
        for s in motions.sequences:
            extra = np.zeros((s.frame_count, 1, 3))
            for vid, wt in combo.items():
                extra[:, 0, :] += wt * s.frames[:, vid, :]
            seqs.append(
                MotionSequence(
                    name=s.name, frames=_freeze(np.concatenate([s.frames, extra], axis=1))
                )
            )
        new_motions = MotionSet(sequences=tuple(seqs))
    return out, new_v, new_motions


def resolve_terminals(mesh: GarmentMesh, terminals: TerminalSet, motions: MotionSet = None):
    """Resolve every terminal to a vertex id, subdividing faces as needed.

    Returns (mesh, vertex_ids, motions). Face indices in later entries refer
    to the original mesh; subdivision is applied in order, so entries are
    mapped through the evolving face list by pattern-space location.
    """
    ids = []
    cur = mesh
    cur_motions = motions
    for entry in terminals.entries:
        if isinstance(entry, int):
            if not 0 <= entry < cur.num_vertices:
                raise WirelayError(f"terminal vertex {entry} out of range")
            ids.append(entry)
            continue
        f, bary = entry
        if cur is not mesh:
            # Re-locate the target point on the evolved mesh.
            target = np.asarray(bary) @ mesh.pattern[mesh.faces[f]]
            f, bary = _locate_in_mesh(cur, target, int(mesh.piece_id[f]))
        cur, vid, cur_motions = insert_terminal(cur, f, bary, cur_motions)
        ids.append(vid)
    if len(set(ids)) != len(ids):
        raise WirelayError("duplicate terminals after resolution")
    return cur, ids, cur_motions


def _locate_in_mesh(mesh: GarmentMesh, point, piece: int):
    """Find (face, bary) containing a pattern point within one piece."""
    p = np.asarray(point)
    best = None
    for fi in range(mesh.num_faces):
        if int(mesh.piece_id[fi]) != piece:
            continue
        tri = mesh.pattern[mesh.faces[fi]]
        b = barycentric_2d(tri, p)
        slack = min(b)
        if slack >= -BARY_TOL:
            return fi, tuple(np.clip(b, 0.0, None) / max(sum(np.clip(b, 0.0, None)), 1e-300))
        if best is None or slack > best[0]:
            best = (slack, fi, b)
    if best is not None and best[0] > -1e-6:
        b = np.clip(best[2], 0.0, None)
        return best[1], tuple(b / b.sum())
    raise WirelayError(f"pattern point {point} not inside any face of piece {piece}")


def barycentric_2d(tri, p):
    """Barycentric weights of a 2D point wrt a triangle (3, 2)."""
    a, b, c = tri
    m = np.array([[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]])
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) < 1e-300:
        raise DegenerateFace(-1)
    rhs = np.asarray(p) - a
    w1 = (rhs[0] * m[1, 1] - rhs[1] * m[0, 1]) / det
    w2 = (m[0, 0] * rhs[1] - m[1, 0] * rhs[0]) / det
    return (1.0 - w1 - w2, w1, w2)


# ---------------------------------------------------------------------------
# Strip rectangles


def edge_strip_rect(mesh: GarmentMesh, edge: int, wd: float):
    """Rectangle of width wd in pattern space with the edge as midline.

    Corners are returned CCW; the area equals pattern length x wd.
    """
    if wd <= 0:
        raise WirelayError("strip width must be positive")
    mesh.edge_piece(edge)  # raises SeamEdge when pieces disagree
    u, v = mesh.edges[edge]
    p0 = mesh.pattern[u]
    p1 = mesh.pattern[v]
    d = p1 - p0
    length = math.hypot(d[0], d[1])
    if length <= 0.0:
        raise DegenerateFace(-1, 0.0)
    tx, ty = d[0] / length, d[1] / length
    nx, ny = -ty, tx  # left normal
    h = 0.5 * wd
    return [
        (p0[0] - nx * h, p0[1] - ny * h),
        (p1[0] - nx * h, p1[1] - ny * h),
        (p1[0] + nx * h, p1[1] + ny * h),
        (p0[0] + nx * h, p0[1] + ny * h),
    ]


def subdivide_centroid(mesh: GarmentMesh, motions: MotionSet = None):
    """Split every face at its centroid (one subdivision level).

    Original vertices and edges survive, so optimal trees on the coarse
    mesh remain feasible on the fine one.
    """
    vertices = [np.asarray(mesh.vertices)]
    pattern = [np.asarray(mesh.pattern)]
    faces = []
    n = mesh.num_vertices
    centroids3 = np.asarray(mesh.vertices)[mesh.faces].mean(axis=1)
    centroids2 = np.asarray(mesh.pattern)[mesh.faces].mean(axis=1)
    for fi, (a, b, c) in enumerate(np.asarray(mesh.faces)):
        x = n + fi
        faces.extend([(a, b, x), (b, c, x), (c, a, x)])
    vertices.append(centroids3)
    pattern.append(centroids2)
    source = np.concatenate(
        [np.asarray(mesh.source_vertex), -np.ones(mesh.num_faces, dtype=np.int32)]
    )
    out = build_mesh(
        np.vstack(vertices), faces, np.vstack(pattern), source_vertex=source
    )
    new_motions = None
    if motions is not None:
        seqs = []
        for s in motions.sequences:
            cent = s.frames[:, mesh.faces, :].mean(axis=2)
            seqs.append(
                MotionSequence(
                    name=s.name,
                    frames=_freeze(np.concatenate([s.frames, cent], axis=1)),
                )
            )
        new_motions = MotionSet(sequences=tuple(seqs))
    return out, new_motions


def nearest_vertex(mesh: GarmentMesh, pattern_point, piece: int = None) -> int:
    """Vertex closest to a pattern point, optionally within one piece."""
    p = np.asarray(pattern_point)
    d = np.linalg.norm(np.asarray(mesh.pattern) - p[None], axis=1)
    if piece is not None:
        allowed = np.zeros(mesh.num_vertices, dtype=bool)
        for fi in range(mesh.num_faces):
            if int(mesh.piece_id[fi]) == piece:
                allowed[mesh.faces[fi]] = True
        d = np.where(allowed, d, np.inf)
    return int(np.argmin(d))
