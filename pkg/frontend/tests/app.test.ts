// App behavior against a mocked service: rendering paths, error banner,
// local-only visibility toggles.

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { createApp } from "../src/app.js";
import { installCanvasStub, squareMesh } from "./helpers.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

const zeroHeatmap = {
  density: [0, 0],
  binEdges: [0, 1, 10, 100, 1e3, 1e4, 1e5, 1e6, 1e7],
  logScale: true,
  variant: "paper-literal",
};

describe("DesignerApp with a mocked service", () => {
  let fetchMock: ReturnType<typeof vi.fn>;

  beforeEach(() => {
    installCanvasStub();
    document.body.innerHTML = '<div id="app"></div>';
    fetchMock = vi.fn();
    vi.stubGlobal("fetch", fetchMock);
  });

  afterEach(() => {
    vi.unstubAllGlobals();
  });

  function route(handler: (url: string, init?: RequestInit) => Response): void {
    fetchMock.mockImplementation((url: string, init?: RequestInit) =>
      Promise.resolve(handler(url, init)),
    );
  }

  it("loads mesh and zero heatmap, painting the floor bin everywhere", async () => {
    route((url) => {
      if (url.includes("/v1/mesh")) return jsonResponse(squareMesh());
      if (url.includes("/v1/heatmap")) return jsonResponse(zeroHeatmap);
      throw new Error(`unexpected ${url}`);
    });
    const app = createApp(document.getElementById("app")!, "http://svc");
    await app.load();
    const ctx = app.canvas.getContext("2d") as unknown as { calls: [string, unknown[]][] };
    const fills = ctx.calls.filter(([name]) => name === "fill");
    expect(fills.length).toBeGreaterThanOrEqual(2); // both faces painted
    expect(app.statusEl.textContent).toBe("ready");
    expect(app.errorEl.hidden).toBe(true);
  });

  it("shows an error banner on a broken mesh payload", async () => {
    route(() => jsonResponse({ error: "boom" }, 500));
    const app = createApp(document.getElementById("app")!, "http://svc");
    await expect(app.load()).rejects.toThrow();
    expect(app.errorEl.hidden).toBe(false);
    expect(app.errorEl.textContent).toContain("mesh payload failed");
  });

  it("keeps waiting politely while the field is computing (503)", async () => {
    route((url) => {
      if (url.includes("/v1/mesh")) return jsonResponse(squareMesh());
      if (url.includes("/v1/heatmap"))
        return jsonResponse({ error: "strain field not yet computed" }, 503);
      throw new Error(`unexpected ${url}`);
    });
    const app = createApp(document.getElementById("app")!, "http://svc");
    await app.load();
    expect(app.errorEl.hidden).toBe(true);
    expect(app.heatmap).toBeNull();
  });

  it("places terminals through clicks and posts them once there are two", async () => {
    const posts: string[] = [];
    route((url, init) => {
      if (url.includes("/v1/mesh")) return jsonResponse(squareMesh());
      if (url.includes("/v1/heatmap")) return jsonResponse(zeroHeatmap);
      if (url.includes("/v1/terminals")) {
        posts.push(String(init?.body));
        const body = JSON.parse(String(init?.body)) as { terminals: unknown[] };
        return jsonResponse({ count: body.terminals.length });
      }
      throw new Error(`unexpected ${url}`);
    });
    const app = createApp(document.getElementById("app")!, "http://svc");
    await app.load();
    const [x1, y1] = app.state.view.toScreen([2 / 3, 1 / 3]);
    expect(app.handleCanvasClick(x1, y1)).toBe(true);
    const [x2, y2] = app.state.view.toScreen([1 / 3, 2 / 3]);
    expect(app.handleCanvasClick(x2, y2)).toBe(true);
    await Promise.resolve();
    expect(app.state.markers).toHaveLength(2);
    expect(posts.length).toBeGreaterThanOrEqual(1);
    const sent = JSON.parse(posts[posts.length - 1]) as {
      terminals: { face: number; bary: number[] }[];
    };
    expect(sent.terminals).toHaveLength(2);
    expect(sent.terminals[0].face).toBe(0);
    for (const w of sent.terminals[0].bary) expect(w).toBeCloseTo(1 / 3, 6);
  });

  it("ignores clicks outside the pattern with a hint", async () => {
    route((url) => {
      if (url.includes("/v1/mesh")) return jsonResponse(squareMesh());
      if (url.includes("/v1/heatmap")) return jsonResponse(zeroHeatmap);
      throw new Error(`unexpected ${url}`);
    });
    const app = createApp(document.getElementById("app")!, "http://svc");
    await app.load();
    expect(app.placeTerminalAtPattern([5, 5])).toBe(false);
    expect(app.state.markers).toHaveLength(0);
    expect(app.statusEl.textContent).toContain("outside");
  });

  it("dragging a marker moves it and re-posts the terminal set", async () => {
    const posts: string[] = [];
    route((url, init) => {
      if (url.includes("/v1/mesh")) return jsonResponse(squareMesh());
      if (url.includes("/v1/heatmap")) return jsonResponse(zeroHeatmap);
      if (url.includes("/v1/terminals")) {
        posts.push(String(init?.body));
        const body = JSON.parse(String(init?.body)) as { terminals: unknown[] };
        return jsonResponse({ count: body.terminals.length });
      }
      throw new Error(`unexpected ${url}`);
    });
    const app = createApp(document.getElementById("app")!, "http://svc");
    await app.load();
    app.placeTerminalAtPattern([0.7, 0.2]);
    app.placeTerminalAtPattern([0.2, 0.7]);
    expect(app.state.markers).toHaveLength(2);

    const pointer = (type: string, pattern: [number, number], button = 0) => {
      const [x, y] = app.state.view.toScreen(pattern);
      const ev = new MouseEvent(type, { button, bubbles: true });
      Object.defineProperty(ev, "offsetX", { value: x });
      Object.defineProperty(ev, "offsetY", { value: y });
      app.canvas.dispatchEvent(ev);
    };
    pointer("pointerdown", [0.7, 0.2]); // grab the first marker
    pointer("pointermove", [0.75, 0.1]);
    pointer("pointerup", [0.75, 0.1]);
    await Promise.resolve();

    expect(app.state.markers).toHaveLength(2); // moved, not added
    expect(app.state.markers[0].position[0]).toBeCloseTo(0.75, 6);
    expect(app.state.markers[0].position[1]).toBeCloseTo(0.1, 6);
    const sent = JSON.parse(posts[posts.length - 1]) as { terminals: unknown[] };
    expect(sent.terminals).toHaveLength(2);
  });

  it("toggling overlay visibility makes no server call", async () => {
    route((url) => {
      if (url.includes("/v1/mesh")) return jsonResponse(squareMesh());
      if (url.includes("/v1/heatmap")) return jsonResponse(zeroHeatmap);
      throw new Error(`unexpected ${url}`);
    });
    const app = createApp(document.getElementById("app")!, "http://svc");
    await app.load();
    const before = fetchMock.mock.calls.length;
    const box = app.toggles.get("baseline")!;
    box.checked = false;
    box.dispatchEvent(new Event("change"));
    expect(app.state.overlayVisible.get("baseline")).toBe(false);
    expect(fetchMock.mock.calls.length).toBe(before);
  });
});
