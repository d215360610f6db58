import { describe, expect, it } from "vitest";

import { SolveGuard, ViewTransform } from "../src/state.js";
import { binOf, legendEntries } from "../src/heatmap.js";
import { squareMesh } from "./helpers.js";

describe("SolveGuard", () => {
  it("accepts the latest request and discards superseded ones", () => {
    const guard = new SolveGuard();
    const first = guard.begin("weighted");
    const second = guard.begin("weighted");
    expect(guard.accept("weighted", first)).toBe(false);
    expect(guard.accept("weighted", second)).toBe(true);
    expect(guard.discarded).toBe(1);
  });

  it("tracks kinds independently", () => {
    const guard = new SolveGuard();
    const w = guard.begin("weighted");
    const b = guard.begin("baseline");
    expect(guard.accept("weighted", w)).toBe(true);
    expect(guard.accept("baseline", b)).toBe(true);
  });
});

describe("ViewTransform", () => {
  it("round-trips pattern and screen coordinates", () => {
    const view = new ViewTransform();
    view.fit(squareMesh(), 800, 600);
    const p: [number, number] = [0.3, 0.7];
    const [sx, sy] = view.toScreen(p);
    const back = view.toPattern(sx, sy);
    expect(back[0]).toBeCloseTo(p[0], 9);
    expect(back[1]).toBeCloseTo(p[1], 9);
  });

  it("zoom keeps the anchor point fixed", () => {
    const view = new ViewTransform();
    view.fit(squareMesh(), 800, 600);
    const anchor = view.toScreen([0.5, 0.5]);
    view.zoomAt(anchor[0], anchor[1], 2.0);
    const after = view.toScreen([0.5, 0.5]);
    expect(after[0]).toBeCloseTo(anchor[0], 6);
    expect(after[1]).toBeCloseTo(anchor[1], 6);
  });
});

describe("heatmap bins", () => {
  it("assigns the floor bin to zero and below-floor values", () => {
    const edges = [0, 1, 10, 100, 1e3, 1e4, 1e5, 1e6, 1e7];
    expect(binOf(0, edges)).toBe(0);
    expect(binOf(0.5, edges)).toBe(0);
    expect(binOf(5, edges)).toBe(1);
    expect(binOf(2e7, edges)).toBe(7);
  });

  it("builds one legend entry per ramp color", () => {
    const edges = [0, 1, 10, 100, 1e3, 1e4, 1e5, 1e6, 1e7];
    const entries = legendEntries(edges);
    expect(entries).toHaveLength(8);
    expect(entries[0].label).toBe("0");
  });
});
