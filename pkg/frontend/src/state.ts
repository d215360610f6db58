// View state: pan/zoom, terminal markers, overlay payloads and the
// stale-response guard for solves.

import type { MeshPayload, SolvePayload, TerminalEntry } from "./api.js";
import type { Pick } from "./geometry.js";

export interface Marker {
  pick: Pick;
  position: [number, number]; // pattern space
}

export type OverlayKind = "weighted" | "baseline";

export class ViewTransform {
  // pattern -> screen: screen = (p - origin) * scale + offset, y flipped
  scale = 1;
  offsetX = 0;
  offsetY = 0;
  private minY = 0;
  private maxY = 1;

  fit(mesh: MeshPayload, width: number, height: number, pad = 20): void {
    const [minX, minY] = mesh.bounds.min;
    const [maxX, maxY] = mesh.bounds.max;
    this.minY = minY;
    this.maxY = maxY;
    const spanX = Math.max(maxX - minX, 1e-9);
    const spanY = Math.max(maxY - minY, 1e-9);
    this.scale = Math.min((width - 2 * pad) / spanX, (height - 2 * pad) / spanY);
    this.offsetX = pad - minX * this.scale;
    this.offsetY = pad;
  }

  toScreen(p: [number, number]): [number, number] {
    return [
      p[0] * this.scale + this.offsetX,
      (this.maxY - p[1]) * this.scale + this.offsetY,
    ];
  }

  toPattern(x: number, y: number): [number, number] {
    return [
      (x - this.offsetX) / this.scale,
      this.maxY - (y - this.offsetY) / this.scale,
    ];
  }

  panBy(dx: number, dy: number): void {
    this.offsetX += dx;
    this.offsetY += dy;
  }

  zoomAt(x: number, y: number, factor: number): void {
    const before = this.toPattern(x, y);
    this.scale *= factor;
    const after = this.toScreen(before);
    this.offsetX += x - after[0];
    this.offsetY += y - after[1];
  }
}

/**
 * Tracks in-flight solve requests per overlay kind; responses whose
 * request id is no longer the latest are discarded.
 */
export class SolveGuard {
  private latest: Map<OverlayKind, number> = new Map();
  private counter = 0;
  discarded = 0;

  begin(kind: OverlayKind): number {
    const id = ++this.counter;
    this.latest.set(kind, id);
    return id;
  }

  /** True when the response for `id` is still current and may be shown. */
  accept(kind: OverlayKind, id: number): boolean {
    if (this.latest.get(kind) !== id) {
      this.discarded += 1;
      return false;
    }
    return true;
  }
}

export class AppState {
  mesh: MeshPayload | null = null;
  markers: Marker[] = [];
  overlays: Map<OverlayKind, SolvePayload> = new Map();
  overlayVisible: Map<OverlayKind, boolean> = new Map([
    ["weighted", true],
    ["baseline", true],
  ]);
  view = new ViewTransform();
  guard = new SolveGuard();

  terminalEntries(): TerminalEntry[] {
    return this.markers.map((m) =>
      m.pick.snappedVertex !== null
        ? { vertex: m.pick.snappedVertex }
        : { face: m.pick.face, bary: m.pick.bary },
    );
  }

  markerNear(p: [number, number], radiusPattern: number): number {
    for (let i = 0; i < this.markers.length; i++) {
      const [mx, my] = this.markers[i].position;
      if (Math.hypot(mx - p[0], my - p[1]) <= radiusPattern) return i;
    }
    return -1;
  }
}
