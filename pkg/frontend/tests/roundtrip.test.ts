// Round trip against the real Python service: place 3 terminals on the
// elbow fixture, run weighted + baseline solves, and check the displayed
// metric values verbatim against the service payloads; then verify the
// stale-response guard with two rapid solves.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { createApp, DesignerApp } from "../src/app.js";
import type { SolvePayload } from "../src/api.js";
import { installCanvasStub } from "./helpers.js";

let proc: ChildProcess | null = null;
let baseUrl = "";

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const address = srv.address();
      if (address && typeof address === "object") {
        const port = address.port;
        srv.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

async function waitForField(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastErr: unknown = null;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${baseUrl}/v1/health`);
      if (resp.ok) {
        const body = (await resp.json()) as { fieldReady: boolean };
        if (body.fieldReady) return;
      }
    } catch (err) {
      lastErr = err;
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error(`service never became ready: ${String(lastErr)}`);
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), "wirelay-ui-"));
  const cfg = {
    synthetic: {
      kind: "sleeve-bend",
      params: { n_around: 16, n_along: 8, radius: 0.2, length: 1.0, frames: 6 },
    },
    eta: 1e5,
    wd: 0.015,
    outDir: join(dir, "out"),
  };
  const cfgPath = join(dir, "config.json");
  writeFileSync(cfgPath, JSON.stringify(cfg));
  const port = await freePort();
  baseUrl = `http://127.0.0.1:${port}`;
  proc = spawn(
    "python3",
    ["-m", "wirelay.cli", "serve", "--config", cfgPath, "--port", String(port)],
    { stdio: "ignore" },
  );
  await waitForField(60_000);
});

afterAll(() => {
  proc?.kill();
});

function cellText(app: DesignerApp, rowName: string, column: number): string {
  const rows = Array.from(app.metricsTable.querySelectorAll("tbody tr"));
  const row = rows.find((r) => r.cells[0].textContent === rowName);
  if (!row) throw new Error(`no metrics row ${rowName}`);
  return row.cells[column].textContent ?? "";
}

describe("designer round trip against the live service", () => {
  it("places 3 terminals, solves both layouts, and displays payload values verbatim", async () => {
    installCanvasStub();
    document.body.innerHTML = '<div id="app"></div>';
    const app = createApp(document.getElementById("app")!, baseUrl, "rt1");
    await app.load();
    expect(app.heatmap).not.toBeNull();

    // three terminals through the click pipeline (screen coordinates)
    const mesh = app.state.mesh!;
    const [minX, minY] = mesh.bounds.min;
    const [maxX, maxY] = mesh.bounds.max;
    const points: [number, number][] = [
      [minX + 0.25 * (maxX - minX), minY + 0.1 * (maxY - minY)],
      [minX + 0.25 * (maxX - minX), minY + 0.9 * (maxY - minY)],
      [minX + 0.6 * (maxX - minX), minY + 0.5 * (maxY - minY)],
    ];
    for (const p of points) {
      const [sx, sy] = app.state.view.toScreen(p);
      expect(app.handleCanvasClick(sx, sy)).toBe(true);
    }
    expect(app.state.markers).toHaveLength(3);

    await app.runSolveAndCompare();
    const weighted = app.state.overlays.get("weighted");
    const baseline = app.state.overlays.get("baseline");
    expect(weighted).toBeDefined();
    expect(baseline).toBeDefined();
    expect(weighted!.tree.edges.length).toBeGreaterThanOrEqual(1);
    expect(baseline!.baseline).toBe(true);

    // displayed cells equal the service payload values verbatim
    expect(cellText(app, "weighted", 1)).toBe(
      String(weighted!.metrics.deformationEnergy),
    );
    expect(cellText(app, "weighted", 2)).toBe(
      String(weighted!.metrics.maxElongationRate),
    );
    expect(cellText(app, "baseline", 1)).toBe(
      String(baseline!.metrics.deformationEnergy),
    );
    expect(cellText(app, "baseline", 4)).toBe(String(baseline!.metrics.totalLength));

    // and the payload itself matches an independent fetch of the same solve
    const direct = await fetch(`${baseUrl}/v1/solve?session=rt1`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({}),
    });
    const directPayload = (await direct.json()) as SolvePayload;
    expect(directPayload.metrics.deformationEnergy).toBe(
      weighted!.metrics.deformationEnergy,
    );
    expect(directPayload.solveId).toBe(weighted!.solveId);
  });

  it("discards the superseded response when two solves race", async () => {
    installCanvasStub();
    document.body.innerHTML = '<div id="app"></div>';
    const app = createApp(document.getElementById("app")!, baseUrl, "rt2");
    await app.load();
    const mesh = app.state.mesh!;
    const [minX, minY] = mesh.bounds.min;
    const [maxX, maxY] = mesh.bounds.max;
    app.placeTerminalAtPattern([
      minX + 0.3 * (maxX - minX),
      minY + 0.2 * (maxY - minY),
    ]);
    app.placeTerminalAtPattern([
      minX + 0.3 * (maxX - minX),
      minY + 0.8 * (maxY - minY),
    ]);
    await app.pushTerminals();

    // two rapid weighted solves with different etas: the second begins
    // before the first response lands, so the first must be discarded
    const p1 = app.runSolve("weighted", 1e5);
    const p2 = app.runSolve("weighted", 3e6);
    const [r1, r2] = await Promise.all([p1, p2]);
    expect(r1).toBeNull();
    expect(r2).not.toBeNull();
    expect(app.state.guard.discarded).toBeGreaterThanOrEqual(1);
    expect(app.state.overlays.get("weighted")!.eta).toBe(3e6);
  });
});
