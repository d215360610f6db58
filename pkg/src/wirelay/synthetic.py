"""Procedural test fixtures: meshes with exact developable patterns and
deterministic deformation sequences.

flat-stretch   plane grid, affine stretch ramp along x.
sleeve-bend    cylinder (unrolled isometrically, split along one axial
               seam) whose upper half hinges about an axis lying on the
               inner surface at mid-height. The hinge stretches the face
               band at the crease, strongly on the outer side and not at
               all along the pivot line.
torso-twist    cylinder twisted about its axis, angle ramping with
               height and over frames.

All generators are fully parametric and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import WirelayError
from .mesh import GarmentMesh, MotionSet, build_mesh, build_motion_set

KINDS = ("sleeve-bend", "torso-twist", "flat-stretch")


@dataclass(frozen=True)
class SyntheticResult:
    mesh: GarmentMesh
    motions: MotionSet
    kind: str
    params: dict


def chord_width(n_around: int, radius: float) -> float:
    """Pattern width of one column step (3D chord of the faceted tube)."""
    return 2.0 * radius * math.sin(math.pi / n_around)


def _cylinder_mesh(n_around: int, n_along: int, radius: float, length: float):
    """Closed faceted tube in 3D, unrolled exactly into a flat rectangle.

    The pattern column spacing is the 3D chord length, so the faceted
    prism is exactly isometric to its pattern and carries zero rest
    strain. The seam column is duplicated (i = 0 and i = n_around share
    3D positions but carry distinct pattern coordinates), so the pattern
    is one simply connected piece and the wire graph does not wrap
    around unless the seam is glued.
    """
    cols = n_around + 1
    rows = n_along + 1
    chord = chord_width(n_around, radius)
    verts = np.empty((cols * rows, 3))
    patt = np.empty((cols * rows, 2))
    source = np.empty(cols * rows, dtype=np.int32)
    for j in range(rows):
        z = length * j / n_along
        for i in range(cols):
            phi = 2.0 * math.pi * (i % n_around) / n_around
            idx = j * cols + i
            verts[idx] = (radius * math.cos(phi), radius * math.sin(phi), z)
            patt[idx] = (chord * i, z)
            source[idx] = j * n_around + (i % n_around)
    faces = []
    for j in range(n_along):
        for i in range(n_around):
            a = j * cols + i
            b = j * cols + i + 1
            c = (j + 1) * cols + i + 1
            d = (j + 1) * cols + i
            faces.append((a, b, c))
            faces.append((a, c, d))
    return build_mesh(verts, faces, patt, source_vertex=source)


def _plane_mesh(nx: int, ny: int, size_x: float, size_y: float):
    cols, rows = nx + 1, ny + 1
    verts = np.empty((cols * rows, 3))
    patt = np.empty((cols * rows, 2))
    for j in range(rows):
        for i in range(cols):
            x = size_x * i / nx
            y = size_y * j / ny
            verts[j * cols + i] = (x, y, 0.0)
            patt[j * cols + i] = (x, y)
    faces = []
    for j in range(ny):
        for i in range(nx):
            a = j * cols + i
            b = j * cols + i + 1
            c = (j + 1) * cols + i + 1
            d = (j + 1) * cols + i
            faces.append((a, b, c))
            faces.append((a, c, d))
    return build_mesh(verts, faces, patt)


def gen_flat_stretch(
    nx: int = 16,
    ny: int = 16,
    size: float = 0.5,
    stretch: float = 1.1,
    frames: int = 10,
) -> SyntheticResult:
    """Plane with an affine x-stretch ramping from rest to `stretch`."""
    if stretch < 1.0 or frames < 1:
        raise WirelayError("flat-stretch needs stretch >= 1 and frames >= 1")
    mesh = _plane_mesh(nx, ny, size, size)
    rest = np.asarray(mesh.vertices)
    seq = np.empty((frames, mesh.num_vertices, 3))
    for t in range(frames):
        ramp = 1.0 if frames == 1 else t / (frames - 1)
        s = 1.0 + (stretch - 1.0) * ramp
        seq[t] = rest * np.array([s, 1.0, 1.0])
    motions = build_motion_set([("flat-stretch", seq)], mesh)
    return SyntheticResult(
        mesh=mesh,
        motions=motions,
        kind="flat-stretch",
        params={"nx": nx, "ny": ny, "size": size, "stretch": stretch, "frames": frames},
    )


def hinge_transform(points: np.ndarray, radius: float, length: float, theta: float):
    """Rotate all points with z > length/2 about the inner hinge axis.

    The axis runs along x through (y, z) = (-radius, length/2); points on
    it do not move, so the inner seam line stays unstretched while the
    outer side of the crease band stretches with theta.
    """
    out = points.copy()
    upper = points[:, 2] > length / 2.0
    dy = points[upper, 1] + radius
    dz = points[upper, 2] - length / 2.0
    c, s = math.cos(theta), math.sin(theta)
    out[upper, 1] = -radius + c * dy - s * dz
    out[upper, 2] = length / 2.0 + s * dy + c * dz
    return out


def gen_sleeve_bend(
    n_around: int = 32,
    n_along: int = 32,
    radius: float = 0.2,
    length: float = 1.0,
    theta_max_deg: float = 90.0,
    frames: int = 60,
) -> SyntheticResult:
    """Cylinder with a progressive hinge at mid-height (angle 0..theta_max)."""
    if frames < 1:
        raise WirelayError("sleeve-bend needs frames >= 1")
    mesh = _cylinder_mesh(n_around, n_along, radius, length)
    rest = np.asarray(mesh.vertices)
    theta_max = math.radians(theta_max_deg)
    seq = np.empty((frames, mesh.num_vertices, 3))
    for t in range(frames):
        ramp = 0.0 if frames == 1 else t / (frames - 1)
        seq[t] = hinge_transform(rest, radius, length, theta_max * ramp)
    motions = build_motion_set([("sleeve-bend", seq)], mesh)
    return SyntheticResult(
        mesh=mesh,
        motions=motions,
        kind="sleeve-bend",
        params={
            "nAround": n_around,
            "nAlong": n_along,
            "radius": radius,
            "length": length,
            "thetaMaxDeg": theta_max_deg,
            "frames": frames,
        },
    )


def gen_torso_twist(
    n_around: int = 32,
    n_along: int = 32,
    radius: float = 0.2,
    length: float = 1.0,
    twist_max_deg: float = 45.0,
    frames: int = 30,
) -> SyntheticResult:
    """Cylinder twisted about its axis, linear in height, ramped over frames."""
    if frames < 1:
        raise WirelayError("torso-twist needs frames >= 1")
    mesh = _cylinder_mesh(n_around, n_along, radius, length)
    rest = np.asarray(mesh.vertices)
    tw = math.radians(twist_max_deg)
    seq = np.empty((frames, mesh.num_vertices, 3))
    for t in range(frames):
        ramp = 0.0 if frames == 1 else t / (frames - 1)
        ang = tw * ramp * rest[:, 2] / length
        c, s = np.cos(ang), np.sin(ang)
        seq[t, :, 0] = c * rest[:, 0] - s * rest[:, 1]
        seq[t, :, 1] = s * rest[:, 0] + c * rest[:, 1]
        seq[t, :, 2] = rest[:, 2]
    motions = build_motion_set([("torso-twist", seq)], mesh)
    return SyntheticResult(
        mesh=mesh,
        motions=motions,
        kind="torso-twist",
        params={
            "nAround": n_around,
            "nAlong": n_along,
            "radius": radius,
            "length": length,
            "twistMaxDeg": twist_max_deg,
            "frames": frames,
        },
    )


def gen_synthetic(kind: str, **params) -> SyntheticResult:
    if kind == "flat-stretch":
        return gen_flat_stretch(**params)
    if kind == "sleeve-bend":
        return gen_sleeve_bend(**params)
    if kind == "torso-twist":
        return gen_torso_twist(**params)
    raise WirelayError(f"unknown synthetic kind {kind!r}; use one of {KINDS}")


# Pattern-space anchors for placing terminals on the sleeve fixture.


def sleeve_outer_u(radius: float, n_around: int = 32) -> float:
    """Pattern u of the outer crease line (phi = pi/2)."""
    return chord_width(n_around, radius) * n_around / 4.0


def sleeve_inner_u(radius: float, n_around: int = 32) -> float:
    """Pattern u of the inner pivot line (phi = 3 pi / 2)."""
    return chord_width(n_around, radius) * 3.0 * n_around / 4.0
