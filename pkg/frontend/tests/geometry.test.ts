import { describe, expect, it } from "vitest";

import { barycentric, pickFace, pickPosition } from "../src/geometry.js";
import { squareMesh } from "./helpers.js";

describe("barycentric", () => {
  it("returns corner weights at corners", () => {
    const b = barycentric([0, 0], [1, 0], [0, 1], [0, 0]);
    expect(b).not.toBeNull();
    expect(b![0]).toBeCloseTo(1, 12);
  });

  it("returns the centroid weights at the centroid", () => {
    const b = barycentric([0, 0], [1, 0], [0, 1], [1 / 3, 1 / 3]);
    expect(b![0]).toBeCloseTo(1 / 3, 12);
    expect(b![1]).toBeCloseTo(1 / 3, 12);
    expect(b![2]).toBeCloseTo(1 / 3, 12);
  });

  it("rejects degenerate triangles", () => {
    expect(barycentric([0, 0], [1, 0], [2, 0], [0.5, 0])).toBeNull();
  });
});

describe("pickFace", () => {
  const mesh = squareMesh();

  it("maps a face centroid to near-uniform weights", () => {
    const centroid: [number, number] = [2 / 3, 1 / 3];
    const pick = pickFace(mesh, centroid);
    expect(pick).not.toBeNull();
    expect(pick!.face).toBe(0);
    for (const w of pick!.bary) expect(w).toBeCloseTo(1 / 3, 9);
    expect(pick!.snappedVertex).toBeNull();
  });

  it("snaps clicks near a vertex to that vertex", () => {
    const pick = pickFace(mesh, [0.99, 0.005]);
    expect(pick).not.toBeNull();
    expect(pick!.snappedVertex).toBe(1);
    expect(pickPosition(mesh, pick!)).toEqual([1, 0]);
  });

  it("returns null outside the pattern", () => {
    expect(pickFace(mesh, [2.5, 2.5])).toBeNull();
    expect(pickFace(mesh, [-0.2, 0.5])).toBeNull();
  });

  it("accepts boundary points", () => {
    const pick = pickFace(mesh, [0.5, 0.5]);
    expect(pick).not.toBeNull();
  });
});
