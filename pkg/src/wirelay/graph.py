"""Deformation-weighted wire graph over the mesh 1-skeleton.

Each mesh edge gets the weight

    w(e) = sum over faces f with area(f ^ strip(e)) > 0
           of (density(f) + eta) * area(f ^ strip(e))

where strip(e) is the width-wd rectangle around the edge in pattern
space. The strain part and the bare area part are kept separately, so a
new eta only rescales cached integrals instead of re-clipping.

Seam glue: a declared pair of boundary edges is the same physical seam
line. Their endpoints are identified (matched by 3D position), the two
mesh edges collapse into one graph edge whose pattern length is the
average of the two sides and whose strip integrals are the sum of both
sides (each side's strip only covers its own piece).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .clipping import box_clip_areas
from .errors import DisconnectedTerminals, WirelayError
from .grid import PatternGrid
from .mesh import GarmentMesh, edge_strip_rect
from .strain import StrainField

log = logging.getLogger(__name__)

ETA_FLOOR_FACTOR = 1e-6  # times median positive density


@dataclass(frozen=True)
class EdgeIntegrals:
    """Per-edge strip integrals, independent of eta.

    strain_part[e] = sum_f density(f) * area(f ^ strip(e))
    area_part[e]   = sum_f area(f ^ strip(e))
    """

    strain_part: np.ndarray
    area_part: np.ndarray
    length: np.ndarray
    wd: float


@dataclass(frozen=True)
class WeightedWireGraph:
    num_nodes: int
    edges: np.ndarray  # (e, 2) int32, u < v, lexicographic order
    length: np.ndarray  # pattern length per edge (m)
    weight: np.ndarray  # w(e) per edge
    terminals: tuple
    eta: float
    wd: float
    uniform: bool = False
    mesh_edge: np.ndarray = None  # graph edge -> source mesh edge id

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def adjacency(self):
        """Per-vertex list of (neighbor, edge_id)."""
        adj = [[] for _ in range(self.num_nodes)]
        for eid, (u, v) in enumerate(np.asarray(self.edges)):
            adj[int(u)].append((int(v), eid))
            adj[int(v)].append((int(u), eid))
        return adj

    def to_json_dict(self) -> dict:
        return {
            "nodes": self.num_nodes,
            "edges": [
                {
                    "u": int(u),
                    "v": int(v),
                    "len": float(self.length[i]),
                    "w": float(self.weight[i]),
                }
                for i, (u, v) in enumerate(np.asarray(self.edges))
            ],
            "terminals": [int(t) for t in self.terminals],
            "params": {"eta": self.eta, "wd": self.wd, "uniform": self.uniform},
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "WeightedWireGraph":
        edges = np.array([[e["u"], e["v"]] for e in data["edges"]], dtype=np.int32)
        length = np.array([e["len"] for e in data["edges"]])
        weight = np.array([e["w"] for e in data["edges"]])
        params = data.get("params", {})
        return cls(
            num_nodes=int(data["nodes"]),
            edges=edges,
            length=length,
            weight=weight,
            terminals=tuple(int(t) for t in data["terminals"]),
            eta=float(params.get("eta", 0.0)),
            wd=float(params.get("wd", 0.0)),
            uniform=bool(params.get("uniform", False)),
        )


def _strip_integral(mesh, densities, edge, wd, grid):
    """(strain_part, area_part) of one edge's strip.

    Candidate triangles are rotated into the edge frame, where the strip
    is the axis-aligned box [0, len] x [-wd/2, wd/2], and clipped in one
    vectorized pass.
    """
    rect = edge_strip_rect(mesh, edge, wd)  # also validates piece/width
    xs = [c[0] for c in rect]
    ys = [c[1] for c in rect]
    piece = mesh.edge_piece(edge)
    cands = grid.faces_near_box((min(xs), min(ys)), (max(xs), max(ys)))
    if not cands:
        return 0.0, 0.0
    cands = np.asarray(cands, dtype=np.int64)
    cands = cands[np.asarray(mesh.piece_id)[cands] == piece]
    if len(cands) == 0:
        return 0.0, 0.0

    u, v = mesh.edges[edge]
    pattern = np.asarray(mesh.pattern)
    p0 = pattern[int(u)]
    p1 = pattern[int(v)]
    d = p1 - p0
    length = float(np.hypot(d[0], d[1]))
    tx, ty = d[0] / length, d[1] / length
    tris = pattern[np.asarray(mesh.faces)[cands]] - p0  # (n, 3, 2)
    local = np.empty_like(tris)
    local[:, :, 0] = tris[:, :, 0] * tx + tris[:, :, 1] * ty
    local[:, :, 1] = -tris[:, :, 0] * ty + tris[:, :, 1] * tx
    areas = box_clip_areas(local, length, 0.5 * wd)
    return float(areas @ np.asarray(densities)[cands]), float(areas.sum())


def edge_weight(
    mesh: GarmentMesh,
    field: StrainField,
    edge: int,
    eta: float,
    wd: float,
    grid: PatternGrid = None,
) -> float:
    """w(e) for a single edge; builds a throwaway grid when none is given."""
    if grid is None:
        grid = PatternGrid.for_strips(mesh, wd)
    strain, area = _strip_integral(mesh, field.per_face_density, edge, wd, grid)
    return strain + eta * area


def compute_edge_integrals(
    mesh: GarmentMesh, field: StrainField, wd: float
) -> EdgeIntegrals:
    """Strip integrals for every mesh edge.

    All (edge, candidate face) pairs are clipped in large batches; the
    per-edge accumulation order matches the sequential reference.
    """
    if field.num_faces != mesh.num_faces:
        raise WirelayError("strain field does not match mesh face count")
    grid = PatternGrid.for_strips(mesh, wd)
    ne = mesh.num_edges
    strain = np.zeros(ne)
    area = np.zeros(ne)
    densities = np.asarray(field.per_face_density)
    pattern = np.asarray(mesh.pattern)
    faces = np.asarray(mesh.faces)
    piece_of_face = np.asarray(mesh.piece_id)
    edges = np.asarray(mesh.edges)
    lengths = mesh.edge_pattern_lengths()
    half = 0.5 * wd

    # face piece seen from an edge (validates seam consistency)
    edge_piece = np.empty(ne, dtype=np.int64)
    for e in range(ne):
        edge_piece[e] = mesh.edge_piece(e)

    pair_edge = []
    pair_face = []
    p0s = pattern[edges[:, 0]]
    d = pattern[edges[:, 1]] - p0s
    with np.errstate(invalid="ignore"):
        tdir = d / lengths[:, None]
    for e in range(ne):
        le = lengths[e]
        if le <= 0.0:
            continue
        tx, ty = tdir[e]
        nx, ny = -ty, tx
        # strip bbox from the 4 corners
        cx = (p0s[e, 0], p0s[e, 0] + tx * le)
        cy = (p0s[e, 1], p0s[e, 1] + ty * le)
        lo = (min(cx) - abs(nx) * half, min(cy) - abs(ny) * half)
        hi = (max(cx) + abs(nx) * half, max(cy) + abs(ny) * half)
        for fi in grid.faces_near_box(lo, hi):
            if piece_of_face[fi] == edge_piece[e]:
                pair_edge.append(e)
                pair_face.append(fi)
    pair_edge = np.asarray(pair_edge, dtype=np.int64)
    pair_face = np.asarray(pair_face, dtype=np.int64)

    chunk = 200_000
    for s in range(0, len(pair_edge), chunk):
        pe = pair_edge[s : s + chunk]
        pf = pair_face[s : s + chunk]
        tris = pattern[faces[pf]] - p0s[pe][:, None, :]
        t = tdir[pe]
        local = np.empty_like(tris)
        local[:, :, 0] = tris[:, :, 0] * t[:, None, 0] + tris[:, :, 1] * t[:, None, 1]
        local[:, :, 1] = -tris[:, :, 0] * t[:, None, 1] + tris[:, :, 1] * t[:, None, 0]
        areas = box_clip_areas(local, lengths[pe], half)
        np.add.at(area, pe, areas)
        np.add.at(strain, pe, areas * densities[pf])
    return EdgeIntegrals(
        strain_part=strain,
        area_part=area,
        length=lengths,
        wd=wd,
    )


def eta_floor(field: StrainField) -> float:
    """Minimum admissible eta: 1e-6 x median positive density (or 1.0)."""
    d = np.asarray(field.per_face_density)
    pos = d[d > 0.0]
    if len(pos) == 0:
        return 1.0
    return ETA_FLOOR_FACTOR * float(np.median(pos))


def _glue_aliases(mesh: GarmentMesh):
    """Vertex representative map identifying glued seam endpoints by 3D position."""
    rep = np.arange(mesh.num_vertices, dtype=np.int64)

    def find(x):
        while rep[x] != x:
            rep[x] = rep[rep[x]]
            x = rep[x]
        return int(x)

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            rep[rb] = ra

    verts = np.asarray(mesh.vertices)
    for ea, eb in mesh.glued_pairs:
        u1, v1 = (int(x) for x in mesh.edges[ea])
        u2, v2 = (int(x) for x in mesh.edges[eb])
        straight = np.linalg.norm(verts[u1] - verts[u2]) + np.linalg.norm(
            verts[v1] - verts[v2]
        )
        crossed = np.linalg.norm(verts[u1] - verts[v2]) + np.linalg.norm(
            verts[v1] - verts[u2]
        )
        if straight <= crossed:
            union(u1, u2)
            union(v1, v2)
        else:
            union(u1, v2)
            union(v1, u2)
    return np.array([find(i) for i in range(mesh.num_vertices)], dtype=np.int64)


def build_graph(
    mesh: GarmentMesh,
    field: StrainField,
    terminals,
    eta: float,
    wd: float,
    uniform_weights: bool = False,
    integrals: EdgeIntegrals = None,
) -> WeightedWireGraph:
    """Assemble the weighted graph for a resolved terminal vertex list."""
    term_ids = []
    for t in terminals:
        if not isinstance(t, (int, np.integer)):
            raise WirelayError(
                "build_graph needs resolved vertex terminals; run resolve_terminals first"
            )
        if not 0 <= int(t) < mesh.num_vertices:
            raise WirelayError(f"terminal vertex {t} out of range")
        term_ids.append(int(t))
    if len(set(term_ids)) != len(term_ids):
        raise WirelayError("duplicate terminal vertices")

    if integrals is None and not uniform_weights:
        integrals = compute_edge_integrals(mesh, field, wd)
    elif integrals is not None and abs(integrals.wd - wd) > 1e-15:
        raise WirelayError("cached integrals were computed for a different wd")

    if uniform_weights:
        eta_eff = float(eta)
        length = mesh.edge_pattern_lengths().copy()
        weight = np.ones(mesh.num_edges)
    else:
        floor = eta_floor(field)
        eta_eff = float(eta)
        if eta_eff < floor:
            log.warning(
                "eta=%.3g is below the degeneracy floor %.3g; clamping", eta, floor
            )
            eta_eff = floor
        length = np.array(integrals.length, dtype=np.float64)
        weight = integrals.strain_part + eta_eff * integrals.area_part

    edges = np.asarray(mesh.edges, dtype=np.int64)
    mesh_edge_ids = np.arange(len(edges), dtype=np.int64)

    if mesh.glued_pairs:
        rep = _glue_aliases(mesh)
        glued_partner = {}
        for ea, eb in mesh.glued_pairs:
            glued_partner[ea] = eb
            glued_partner[eb] = ea
        merged: dict[tuple[int, int], list] = {}
        for eid in range(len(edges)):
            u, v = int(rep[edges[eid, 0]]), int(rep[edges[eid, 1]])
            if u > v:
                u, v = v, u
            slot = merged.get((u, v))
            if slot is None:
                merged[(u, v)] = [length[eid], weight[eid], eid, 1]
            else:
                # Parallel edges only arise from glued pairs; average the
                # lengths and sum the per-side integrals (uniform mode
                # keeps weight 1 for the merged seam edge).
                slot[0] += length[eid]
                if not uniform_weights:
                    slot[1] += weight[eid]
                slot[3] += 1
        keys = sorted(merged)
        edges = np.array(keys, dtype=np.int64).reshape(-1, 2)
        length = np.array([merged[k][0] / merged[k][3] for k in keys])
        weight = np.array([merged[k][1] for k in keys])
        mesh_edge_ids = np.array([merged[k][2] for k in keys], dtype=np.int64)
        term_ids = [int(rep[t]) for t in term_ids]
        if len(set(term_ids)) != len(term_ids):
            raise WirelayError("terminals collapse onto one seam vertex")

    graph = WeightedWireGraph(
        num_nodes=mesh.num_vertices,
        edges=_freeze(edges.astype(np.int32)),
        length=_freeze(length),
        weight=_freeze(weight),
        terminals=tuple(term_ids),
        eta=eta_eff,
        wd=float(wd),
        uniform=uniform_weights,
        mesh_edge=_freeze(mesh_edge_ids),
    )
    check_terminal_connectivity(graph)
    return graph


def check_terminal_connectivity(graph: WeightedWireGraph) -> None:
    """Raise DisconnectedTerminals when terminals span components."""
    parent = list(range(graph.num_nodes))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in np.asarray(graph.edges):
        ru, rv = find(int(u)), find(int(v))
        if ru != rv:
            parent[rv] = ru
    roots = {}
    for t in graph.terminals:
        roots.setdefault(find(t), set()).add(t)
    if len(roots) > 1:
        raise DisconnectedTerminals(list(roots.values()))


def _freeze(a):
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a
