// Pattern-space picking: the one bit of geometry the UI owns.

import type { MeshPayload } from "./api.js";

export interface Pick {
  face: number;
  bary: [number, number, number];
  snappedVertex: number | null;
}

// A click this close to a corner (in barycentric weight) snaps to it.
export const VERTEX_SNAP_WEIGHT = 0.95;

export function barycentric(
  a: [number, number],
  b: [number, number],
  c: [number, number],
  p: [number, number],
): [number, number, number] | null {
  const m00 = b[0] - a[0];
  const m01 = c[0] - a[0];
  const m10 = b[1] - a[1];
  const m11 = c[1] - a[1];
  const det = m00 * m11 - m01 * m10;
  if (Math.abs(det) < 1e-300) return null;
  const rx = p[0] - a[0];
  const ry = p[1] - a[1];
  const w1 = (rx * m11 - ry * m01) / det;
  const w2 = (m00 * ry - m10 * rx) / det;
  return [1 - w1 - w2, w1, w2];
}

/**
 * Map a pattern-space point to (face, barycentric); returns null when the
 * point is outside every face. Near-corner picks also carry the snapped
 * vertex id so the caller can send a vertex terminal instead.
 */
export function pickFace(mesh: MeshPayload, p: [number, number]): Pick | null {
  const tol = 1e-9;
  for (let f = 0; f < mesh.faces.length; f++) {
    const [ia, ib, ic] = mesh.faces[f];
    const bary = barycentric(
      mesh.vertices2d[ia],
      mesh.vertices2d[ib],
      mesh.vertices2d[ic],
      p,
    );
    if (!bary) continue;
    if (bary[0] >= -tol && bary[1] >= -tol && bary[2] >= -tol) {
      const clamped: [number, number, number] = [
        Math.max(bary[0], 0),
        Math.max(bary[1], 0),
        Math.max(bary[2], 0),
      ];
      const sum = clamped[0] + clamped[1] + clamped[2];
      clamped[0] /= sum;
      clamped[1] /= sum;
      clamped[2] /= sum;
      let snapped: number | null = null;
      const corners = [ia, ib, ic];
      for (let k = 0; k < 3; k++) {
        if (clamped[k] >= VERTEX_SNAP_WEIGHT) snapped = corners[k];
      }
      return { face: f, bary: clamped, snappedVertex: snapped };
    }
  }
  return null;
}

/** Pattern position of a pick (for marker rendering). */
export function pickPosition(mesh: MeshPayload, pick: Pick): [number, number] {
  if (pick.snappedVertex !== null) {
    return mesh.vertices2d[pick.snappedVertex];
  }
  const [ia, ib, ic] = mesh.faces[pick.face];
  const [a, b, c] = [mesh.vertices2d[ia], mesh.vertices2d[ib], mesh.vertices2d[ic]];
  return [
    pick.bary[0] * a[0] + pick.bary[1] * b[0] + pick.bary[2] * c[0],
    pick.bary[0] * a[1] + pick.bary[1] * b[1] + pick.bary[2] * c[1],
  ];
}
