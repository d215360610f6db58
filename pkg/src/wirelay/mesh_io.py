"""OBJ and motion-frame input/output.

OBJ: `v` lines are 3D positions, `vt` lines the 2D pattern (scaled to
meters by LoadOptions.unit_scale), `f` lines v/vt index pairs. Vertices
are split per unique (v, vt) pair so each mesh vertex owns one pattern
coordinate; pieces fall out of UV-chart connectivity.

Frames: either a directory of frame_%05d.obj files (positions only, same
vertex order as the source OBJ) or a packed binary `.frames` file:
magic "WLFR", u32 vertexCount, u32 frameCount, then
frameCount x vertexCount x 3 little-endian f32.
"""

from __future__ import annotations

import json
import re
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import MotionMismatch, PatternMissing, WirelayError
from .mesh import GarmentMesh, MotionSet, build_mesh, build_motion_set

FRAMES_MAGIC = b"WLFR"


@dataclass(frozen=True)
class LoadOptions:
    unit_scale: float = 1.0  # pattern units -> meters
    seam_glue_path: str = None


def load_garment(path, options: LoadOptions = LoadOptions()) -> GarmentMesh:
    """Load and validate a garment OBJ with pattern coordinates."""
    path = Path(path)
    if not path.exists():
        raise WirelayError(f"mesh file not found: {path}")

    positions = []
    texcoords = []
    corners = []  # per face: three (v, vt) pairs
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            tag = parts[0]
            if tag == "v":
                positions.append([float(x) for x in parts[1:4]])
            elif tag == "vt":
                texcoords.append([float(x) for x in parts[1:3]])
            elif tag == "f":
                refs = parts[1:]
                if len(refs) != 3:
                    raise WirelayError(
                        f"face with {len(refs)} corners; inputs must be triangulated"
                    )
                tri = []
                for r in refs:
                    fields = r.split("/")
                    vi = int(fields[0])
                    vti = None
                    if len(fields) > 1 and fields[1]:
                        vti = int(fields[1])
                    if vti is None:
                        raise PatternMissing(f"face corner {r!r} has no vt index")
                    vi = vi - 1 if vi > 0 else len(positions) + vi
                    vti = vti - 1 if vti > 0 else len(texcoords) + vti
                    tri.append((vi, vti))
                corners.append(tri)
    if not texcoords:
        raise PatternMissing(f"{path} has no vt (pattern) coordinates")
    if not corners:
        raise WirelayError(f"{path} has no faces")

    pair_index: dict[tuple[int, int], int] = {}
    verts = []
    patt = []
    source = []
    faces = []
    for tri in corners:
        ids = []
        for vi, vti in tri:
            key = (vi, vti)
            idx = pair_index.get(key)
            if idx is None:
                idx = len(verts)
                pair_index[key] = idx
                verts.append(positions[vi])
                patt.append(texcoords[vti])
                source.append(vi)
            ids.append(idx)
        faces.append(ids)

    pattern = np.asarray(patt, dtype=np.float64) * options.unit_scale
    glued = ()
    mesh = build_mesh(verts, faces, pattern, source_vertex=np.asarray(source))
    if options.seam_glue_path:
        glued = load_seam_glue(options.seam_glue_path)
        mesh = build_mesh(
            verts, faces, pattern, source_vertex=np.asarray(source), glued_pairs=glued
        )
    return mesh


def write_garment_obj(path, mesh: GarmentMesh) -> None:
    """Write a mesh back out as OBJ with v/vt faces."""
    with open(path, "w") as fh:
        fh.write("# wirelay garment mesh\n")
        for x, y, z in np.asarray(mesh.vertices):
            fh.write(f"v {x:.9g} {y:.9g} {z:.9g}\n")
        for u, v in np.asarray(mesh.pattern):
            fh.write(f"vt {u:.9g} {v:.9g}\n")
        for a, b, c in np.asarray(mesh.faces):
            fh.write(f"f {a+1}/{a+1} {b+1}/{b+1} {c+1}/{c+1}\n")


def load_seam_glue(path):
    """JSON list of boundary-edge index pairs to merge across a seam."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise WirelayError("seam glue file must be a JSON list of [a, b] pairs")
    return tuple((int(a), int(b)) for a, b in data)


# ---------------------------------------------------------------------------
# Frames


def write_frames(path, frames) -> None:
    """Write a packed .frames file (WLFR, f32 little-endian)."""
    frames = np.asarray(frames, dtype=np.float32)
    k, n, _ = frames.shape
    with open(path, "wb") as fh:
        fh.write(FRAMES_MAGIC)
        fh.write(struct.pack("<II", n, k))
        fh.write(frames.astype("<f4").tobytes())


def read_frames(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != FRAMES_MAGIC:
            raise MotionMismatch(f"{path}: bad frames magic {magic!r}")
        n, k = struct.unpack("<II", fh.read(8))
        data = np.frombuffer(fh.read(), dtype="<f4")
    if data.size != k * n * 3:
        raise MotionMismatch(f"{path}: truncated frames payload")
    return data.reshape(k, n, 3).astype(np.float64)


_FRAME_RE = re.compile(r"frame_(\d+)\.obj$")


def read_frame_dir(path) -> np.ndarray:
    """Read a directory of frame_%05d.obj files (positions only)."""
    path = Path(path)
    entries = []
    for p in path.iterdir():
        m = _FRAME_RE.search(p.name)
        if m:
            entries.append((int(m.group(1)), p))
    if not entries:
        raise MotionMismatch(f"no frame_*.obj files in {path}")
    entries.sort()
    frames = []
    for _, p in entries:
        pos = []
        with open(p) as fh:
            for line in fh:
                if line.startswith("v "):
                    parts = line.split()
                    pos.append([float(x) for x in parts[1:4]])
        frames.append(pos)
    counts = {len(f) for f in frames}
    if len(counts) != 1:
        raise MotionMismatch(f"{path}: inconsistent vertex counts across frames")
    return np.asarray(frames, dtype=np.float64)


def load_motions(specs, mesh: GarmentMesh) -> MotionSet:
    """Load motion sequences from (name, path) specs.

    A path ending in .frames is read as packed binary, a directory as
    frame_%05d.obj files.
    """
    named = []
    for name, p in specs:
        p = Path(p)
        if p.is_dir():
            named.append((name, read_frame_dir(p)))
        elif p.suffix == ".frames":
            named.append((name, read_frames(p)))
        else:
            raise MotionMismatch(f"unrecognized frames source: {p}")
    return build_motion_set(named, mesh)
