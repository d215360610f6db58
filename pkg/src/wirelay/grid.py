"""Uniform pattern-space grid over faces, for strip and point queries."""

from __future__ import annotations

import math

import numpy as np

from .mesh import GarmentMesh, barycentric_2d


class PatternGrid:
    """Buckets face indices by their pattern-space bounding boxes."""

    def __init__(self, mesh: GarmentMesh, cell_size: float):
        self.mesh = mesh
        self.cell = float(cell_size)
        p = np.asarray(mesh.pattern)[mesh.faces]  # (m, 3, 2)
        self._lo = p.min(axis=1)
        self._hi = p.max(axis=1)
        origin = p.reshape(-1, 2).min(axis=0)
        self.origin = origin
        self.buckets: dict[tuple[int, int], list[int]] = {}
        inv = 1.0 / self.cell
        for fi in range(len(self._lo)):
            x0 = int(math.floor((self._lo[fi, 0] - origin[0]) * inv))
            y0 = int(math.floor((self._lo[fi, 1] - origin[1]) * inv))
            x1 = int(math.floor((self._hi[fi, 0] - origin[0]) * inv))
            y1 = int(math.floor((self._hi[fi, 1] - origin[1]) * inv))
            for cx in range(x0, x1 + 1):
                for cy in range(y0, y1 + 1):
                    self.buckets.setdefault((cx, cy), []).append(fi)

    @classmethod
    def for_strips(cls, mesh: GarmentMesh, wd: float) -> "PatternGrid":
        """Cell size max(wd, median pattern edge length)."""
        med = float(np.median(mesh.edge_pattern_lengths()))
        return cls(mesh, max(wd, med))

    def faces_near_box(self, lo, hi):
        """Candidate faces whose bbox cells overlap the query box."""
        inv = 1.0 / self.cell
        x0 = int(math.floor((lo[0] - self.origin[0]) * inv))
        y0 = int(math.floor((lo[1] - self.origin[1]) * inv))
        x1 = int(math.floor((hi[0] - self.origin[0]) * inv))
        y1 = int(math.floor((hi[1] - self.origin[1]) * inv))
        seen = set()
        out = []
        for cx in range(x0, x1 + 1):
            for cy in range(y0, y1 + 1):
                for fi in self.buckets.get((cx, cy), ()):
                    if fi not in seen:
                        seen.add(fi)
                        out.append(fi)
        out.sort()
        return out

    def locate_point(self, point, piece: int = None, tol: float = 1e-9):
        """(face, bary) for a pattern point, or None when outside."""
        p = np.asarray(point, dtype=np.float64)
        best = None
        for fi in self.faces_near_box(p, p):
            if piece is not None and int(self.mesh.piece_id[fi]) != piece:
                continue
            tri = self.mesh.pattern[self.mesh.faces[fi]]
            b = barycentric_2d(tri, p)
            slack = min(b)
            if slack >= -tol:
                w = np.clip(b, 0.0, None)
                return fi, tuple(w / w.sum())
            if best is None or slack > best[0]:
                best = (slack, fi, b)
        # Fall back to the nearest candidate when the point sits a hair
        # outside every face (arc fillets can overshoot shared edges).
        if best is not None and best[0] > -1e-6:
            w = np.clip(best[2], 0.0, None)
            return best[1], tuple(w / w.sum())
        return None
