// Shared test scaffolding: a recording 2D-context stub (jsdom ships no
// canvas implementation) and service payload builders.

import type { MeshPayload } from "../src/api.js";

export function installCanvasStub(): void {
  const proto = HTMLCanvasElement.prototype as unknown as {
    getContext: (kind: string) => unknown;
  };
  const cache = new WeakMap<object, unknown>();
  proto.getContext = function (kind: string) {
    if (kind !== "2d") return null;
    const self = this as object;
    let ctx = cache.get(self);
    if (!ctx) {
      const target: Record<string | symbol, unknown> = { canvas: this, calls: [] };
      ctx = new Proxy(target, {
        get(t, prop) {
          if (prop in t) return t[prop];
          return (...args: unknown[]) => {
            (t.calls as unknown[]).push([prop, args]);
            return undefined;
          };
        },
        set(t, prop, value) {
          t[prop] = value;
          return true;
        },
      });
      cache.set(self, ctx);
    }
    return ctx;
  };
}

/** Unit-square mesh split into two triangles, matching the service shape. */
export function squareMesh(): MeshPayload {
  return {
    vertices2d: [
      [0, 0],
      [1, 0],
      [1, 1],
      [0, 1],
    ],
    faces: [
      [0, 1, 2],
      [0, 2, 3],
    ],
    pieces: [0, 0],
    boundaryEdges: [
      [0, 1],
      [1, 2],
      [2, 3],
      [0, 3],
    ],
    bounds: { min: [0, 0], max: [1, 1] },
    wd: 0.015,
  };
}
