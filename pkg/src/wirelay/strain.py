"""Membrane strain energy density per face, aggregated over motions.

For a triangle with rest shape in the 2D pattern and deformed shape in
3D, the deformation gradient F is the 3x2 linear map taking rest edge
vectors to deformed edge vectors. The Green strain is
G = (FtF - I)/2, which vanishes for rigid motions of the rest shape.

Two density variants are provided:

  paper-literal   mu * ||G||_F + (lambda/2) * tr(G), clamped at zero.
                  Linear in G; the clamp discards compression, since a
                  wire rolls up rather than shrinks.
  svk-quadratic   mu * ||G||_F^2 + (lambda/2) * tr(G)^2, the standard
                  St. Venant-Kirchhoff membrane density (always >= 0).

Per motion sequence the density is averaged over frames; across
sequences the per-face maximum is kept.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFace, MotionMismatch, WirelayError
from .mesh import GarmentMesh, MotionSet

VARIANTS = ("paper-literal", "svk-quadratic")
STRAIN_MAGIC = b"WLSF"

DEFAULT_YOUNGS_MODULUS = 5.4e6  # Pa
DEFAULT_POISSON_RATIO = 0.33


@dataclass(frozen=True)
class MaterialParams:
    youngs_modulus: float
    poisson_ratio: float
    mu: float
    lam: float

    @classmethod
    def from_young_poisson(
        cls,
        youngs_modulus: float = DEFAULT_YOUNGS_MODULUS,
        poisson_ratio: float = DEFAULT_POISSON_RATIO,
    ) -> "MaterialParams":
        e, nu = float(youngs_modulus), float(poisson_ratio)
        if e <= 0:
            raise WirelayError("Young's modulus must be positive")
        if not 0.0 <= nu < 0.5:
            raise WirelayError("Poisson ratio must lie in [0, 0.5)")
        mu = e / (2.0 * (1.0 + nu))
        lam = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))
        return cls(youngs_modulus=e, poisson_ratio=nu, mu=mu, lam=lam)


@dataclass(frozen=True)
class StrainField:
    """Aggregated per-face energy densities (Pa) plus per-sequence means."""

    per_face_density: np.ndarray  # (m,)
    per_sequence_means: np.ndarray  # (L, m)
    sequence_names: tuple
    material: MaterialParams
    variant: str

    @property
    def num_faces(self) -> int:
        return len(self.per_face_density)

    def content_hash(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.per_face_density).tobytes())
        h.update(self.variant.encode())
        return h.hexdigest()


def deformation_gradient(rest_triangle, deformed_triangle) -> np.ndarray:
    """3x2 map F with [d1 d2] = F [r1 r2] for the triangle edge vectors."""
    r = np.asarray(rest_triangle, dtype=np.float64)
    d = np.asarray(deformed_triangle, dtype=np.float64)
    rmat = np.column_stack([r[1] - r[0], r[2] - r[0]])  # 2x2
    det = rmat[0, 0] * rmat[1, 1] - rmat[0, 1] * rmat[1, 0]
    if abs(det) < 2.0 * 1e-12:  # twice the degenerate area floor
        raise DegenerateFace(-1, abs(det) / 2.0)
    dmat = np.column_stack([d[1] - d[0], d[2] - d[0]])  # 3x2
    return dmat @ np.linalg.inv(rmat)


def green_strain(f: np.ndarray) -> np.ndarray:
    """G = (FtF - I)/2, symmetric 2x2."""
    f = np.asarray(f, dtype=np.float64)
    return 0.5 * (f.T @ f - np.eye(2))


def svk_density(g, material: MaterialParams, variant: str = "paper-literal") -> float:
    """Energy density (Pa) of one Green strain tensor."""
    g = np.asarray(g, dtype=np.float64)
    fro = float(np.sqrt(g[0, 0] ** 2 + g[1, 1] ** 2 + 2.0 * g[0, 1] * g[1, 0]))
    tr = float(g[0, 0] + g[1, 1])
    if variant == "paper-literal":
        return max(0.0, material.mu * fro + 0.5 * material.lam * tr)
    if variant == "svk-quadratic":
        return material.mu * fro * fro + 0.5 * material.lam * tr * tr
    raise WirelayError(f"unknown energy variant {variant!r}; use one of {VARIANTS}")


def _frame_densities(inv_rest, deformed, faces, mu, lam, variant):
    """Densities for all faces of one frame, vectorized.

    inv_rest: (m, 2, 2) inverses of rest edge matrices.
    deformed: (n, 3) vertex positions for the frame.
    """
    tri = deformed[faces]  # (m, 3, 3)
    dmat = np.stack([tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]], axis=2)  # (m,3,2)
    f = dmat @ inv_rest  # (m, 3, 2)
    # G entries via FtF without materializing the full product
    c00 = np.einsum("ij,ij->i", f[:, :, 0], f[:, :, 0])
    c01 = np.einsum("ij,ij->i", f[:, :, 0], f[:, :, 1])
    c11 = np.einsum("ij,ij->i", f[:, :, 1], f[:, :, 1])
    g00 = 0.5 * (c00 - 1.0)
    g01 = 0.5 * c01
    g11 = 0.5 * (c11 - 1.0)
    fro = np.sqrt(g00 * g00 + g11 * g11 + 2.0 * g01 * g01)
    tr = g00 + g11
    if variant == "paper-literal":
        return np.maximum(0.0, mu * fro + 0.5 * lam * tr)
    return mu * fro * fro + 0.5 * lam * tr * tr


def compute_strain_field(
    mesh: GarmentMesh,
    motions: MotionSet,
    material: MaterialParams = None,
    variant: str = "paper-literal",
) -> StrainField:
    """Mean-over-frames, max-over-sequences energy density per face."""
    if material is None:
        material = MaterialParams.from_young_poisson()
    if variant not in VARIANTS:
        raise WirelayError(f"unknown energy variant {variant!r}; use one of {VARIANTS}")

    faces = np.asarray(mesh.faces)
    p = np.asarray(mesh.pattern)[faces]  # (m, 3, 2)
    rmat = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)  # (m, 2, 2)
    det = rmat[:, 0, 0] * rmat[:, 1, 1] - rmat[:, 0, 1] * rmat[:, 1, 0]
    bad = np.nonzero(np.abs(det) < 2.0 * 1e-12)[0]
    if len(bad):
        raise DegenerateFace(int(bad[0]))
    inv_rest = np.linalg.inv(rmat)

    n = mesh.num_vertices
    means = []
    for seq in motions.sequences:
        if seq.frames.shape[1] != n:
            raise MotionMismatch(
                f"sequence {seq.name!r} has {seq.frames.shape[1]} positions, "
                f"mesh has {n} vertices"
            )
        per_frame = np.stack(
            [
                _frame_densities(inv_rest, seq.frames[j], faces, material.mu, material.lam, variant)
                for j in range(seq.frame_count)
            ]
        )
        means.append(per_frame.mean(axis=0))  # numpy pairwise summation
    per_sequence = np.stack(means)
    return StrainField(
        per_face_density=_freeze_array(per_sequence.max(axis=0)),
        per_sequence_means=_freeze_array(per_sequence),
        sequence_names=tuple(s.name for s in motions.sequences),
        material=material,
        variant=variant,
    )


def _freeze_array(a):
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


# ---------------------------------------------------------------------------
# Sidecar formats


def write_strain(path, field: StrainField) -> None:
    """Binary sidecar: magic WLSF, u32 faceCount, f64 densities."""
    with open(path, "wb") as fh:
        fh.write(STRAIN_MAGIC)
        fh.write(struct.pack("<I", field.num_faces))
        fh.write(np.ascontiguousarray(field.per_face_density, dtype="<f8").tobytes())


def read_strain_densities(path) -> np.ndarray:
    with open(path, "rb") as fh:
        if fh.read(4) != STRAIN_MAGIC:
            raise WirelayError(f"{path}: bad strain magic")
        (count,) = struct.unpack("<I", fh.read(4))
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != count:
        raise WirelayError(f"{path}: truncated strain payload")
    return data.astype(np.float64)


def strain_to_json_dict(field: StrainField) -> dict:
    return {
        "variant": field.variant,
        "material": {
            "youngsModulus": field.material.youngs_modulus,
            "poissonRatio": field.material.poisson_ratio,
            "mu": field.material.mu,
            "lambda": field.material.lam,
        },
        "sequences": list(field.sequence_names),
        "perFaceDensity": [float(x) for x in field.per_face_density],
        "perSequenceMeans": [
            [float(x) for x in row] for row in field.per_sequence_means
        ],
    }


def write_strain_json(path, field: StrainField) -> None:
    with open(path, "w") as fh:
        json.dump(strain_to_json_dict(field), fh, sort_keys=True)
