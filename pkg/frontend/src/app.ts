// Designer console: heatmap canvas + terminal placement + solve panel.

import { ApiError, WirelayClient } from "./api.js";
import type { HeatmapPayload, MeshPayload, SolvePayload } from "./api.js";
import { pickFace, pickPosition } from "./geometry.js";
import { binColor, legendEntries } from "./heatmap.js";
import { percentDiffRow, renderMetricsTable, rowFromPayload } from "./metrics.js";
import { OVERLAY_COLORS, drawOverlay } from "./overlays.js";
import { AppState } from "./state.js";
import type { OverlayKind } from "./state.js";

const MARKER_RADIUS_PX = 7;

export class DesignerApp {
  readonly state = new AppState();
  readonly client: WirelayClient;
  heatmap: HeatmapPayload | null = null;
  canvas: HTMLCanvasElement;
  statusEl: HTMLElement;
  errorEl: HTMLElement;
  metricsTable: HTMLTableElement;
  toggles: Map<OverlayKind, HTMLInputElement> = new Map();
  private dragging: number | null = null;
  private panning = false;
  private lastPointer: [number, number] = [0, 0];

  constructor(root: HTMLElement, baseUrl: string, session = "ui") {
    this.client = new WirelayClient(baseUrl, session);
    root.innerHTML = `
      <div class="wirelay-app">
        <div class="banner" data-role="error" hidden></div>
        <div class="toolbar">
          <button data-role="solve">solve + compare</button>
          <label><input type="checkbox" data-role="show-weighted" checked> weighted</label>
          <label><input type="checkbox" data-role="show-baseline" checked> baseline</label>
          <button data-role="clear">clear terminals</button>
          <span data-role="status"></span>
        </div>
        <canvas width="960" height="640" tabindex="0"></canvas>
        <table data-role="metrics"></table>
      </div>`;
    this.canvas = root.querySelector("canvas") as HTMLCanvasElement;
    this.statusEl = root.querySelector('[data-role="status"]') as HTMLElement;
    this.errorEl = root.querySelector('[data-role="error"]') as HTMLElement;
    this.metricsTable = root.querySelector('[data-role="metrics"]') as HTMLTableElement;
    this.toggles.set(
      "weighted",
      root.querySelector('[data-role="show-weighted"]') as HTMLInputElement,
    );
    this.toggles.set(
      "baseline",
      root.querySelector('[data-role="show-baseline"]') as HTMLInputElement,
    );

    (root.querySelector('[data-role="solve"]') as HTMLButtonElement).addEventListener(
      "click",
      () => void this.runSolveAndCompare(),
    );
    (root.querySelector('[data-role="clear"]') as HTMLButtonElement).addEventListener(
      "click",
      () => {
        this.state.markers = [];
        void this.pushTerminals();
        this.render();
      },
    );
    for (const [kind, box] of this.toggles) {
      box.addEventListener("change", () => {
        // visibility is purely local: no server call
        this.state.overlayVisible.set(kind, box.checked);
        this.render();
      });
    }
    this.canvas.addEventListener("pointerdown", (ev) => this.onPointerDown(ev));
    this.canvas.addEventListener("pointermove", (ev) => this.onPointerMove(ev));
    this.canvas.addEventListener("pointerup", (ev) => this.onPointerUp(ev));
    this.canvas.addEventListener("wheel", (ev) => {
      ev.preventDefault();
      const factor = ev.deltaY < 0 ? 1.15 : 1 / 1.15;
      this.state.view.zoomAt(ev.offsetX, ev.offsetY, factor);
      this.render();
    });
  }

  async load(): Promise<void> {
    this.setStatus("loading mesh...");
    try {
      this.state.mesh = await this.client.mesh();
    } catch (err) {
      this.showError(`mesh payload failed: ${String(err)}`);
      throw err;
    }
    this.state.view.fit(this.state.mesh, this.canvas.width, this.canvas.height);
    await this.refreshHeatmap();
    this.render();
    this.setStatus("ready");
  }

  async refreshHeatmap(): Promise<void> {
    try {
      this.heatmap = await this.client.heatmap();
      this.hideError();
    } catch (err) {
      if (err instanceof ApiError && err.status === 503) {
        this.setStatus("field computing...");
        return;
      }
      this.showError(`heatmap payload failed: ${String(err)}`);
    }
  }

  // -- terminal placement ---------------------------------------------------

  /** Place or move a terminal at a pattern-space point (click handler core). */
  placeTerminalAtPattern(p: [number, number]): boolean {
    const mesh = this.state.mesh;
    if (!mesh) return false;
    const pick = pickFace(mesh, p);
    if (!pick) {
      this.setStatus("click is outside the pattern");
      return false;
    }
    this.state.markers.push({ pick, position: pickPosition(mesh, pick) });
    void this.pushTerminals();
    this.render();
    return true;
  }

  handleCanvasClick(x: number, y: number): boolean {
    return this.placeTerminalAtPattern(this.state.view.toPattern(x, y));
  }

  async pushTerminals(): Promise<void> {
    const entries = this.state.terminalEntries();
    if (entries.length < 2) {
      this.setStatus(`${entries.length} terminal(s) placed (need at least 2)`);
      return;
    }
    try {
      const resp = await this.client.setTerminals(entries);
      this.setStatus(`${resp.count} terminals confirmed`);
    } catch (err) {
      this.showError(`terminals rejected: ${String(err)}`);
    }
  }

  // -- solving ----------------------------------------------------------------

  async runSolve(kind: OverlayKind, eta?: number | "auto"): Promise<SolvePayload | null> {
    const id = this.state.guard.begin(kind);
    try {
      const payload = await this.client.solve({
        baseline: kind === "baseline",
        ...(eta !== undefined ? { eta } : {}),
      });
      if (!this.state.guard.accept(kind, id)) return null; // stale, discard
      this.state.overlays.set(kind, payload);
      this.render();
      return payload;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        return null; // superseded server-side, silently dropped
      }
      if (err instanceof ApiError && err.status === 503) {
        this.setStatus("field computing...");
        return null;
      }
      this.showError(`solve failed: ${String(err)}`);
      return null;
    }
  }

  async runSolveAndCompare(eta?: number | "auto"): Promise<void> {
    if (this.state.markers.length < 2) {
      this.setStatus("place at least 2 terminals first");
      return;
    }
    await this.pushTerminals();
    this.setStatus("solving...");
    // weighted first; the baseline request reuses its eta so the service
    // evaluates both layouts under the same energy functional
    const weighted = await this.runSolve("weighted", eta);
    const baseline = await this.runSolve("baseline", weighted?.eta);
    this.renderMetrics();
    if (weighted && baseline) this.setStatus("solved");
  }

  renderMetrics(): void {
    const weighted = this.state.overlays.get("weighted");
    const baseline = this.state.overlays.get("baseline");
    const rows = [];
    if (weighted) rows.push(rowFromPayload("weighted", weighted));
    if (baseline) rows.push(rowFromPayload("baseline", baseline));
    if (weighted && baseline) rows.push(percentDiffRow(weighted, baseline));
    renderMetricsTable(this.metricsTable, rows);
  }

  // -- rendering ----------------------------------------------------------------

  render(): void {
    const ctx = this.canvas.getContext("2d");
    const mesh = this.state.mesh;
    if (!ctx || !mesh) return;
    const view = this.state.view;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);

    const edges = this.heatmap ? this.heatmap.binEdges : [0, 1];
    for (let f = 0; f < mesh.faces.length; f++) {
      const value = this.heatmap ? this.heatmap.density[f] : 0;
      const [ia, ib, ic] = mesh.faces[f];
      const a = view.toScreen(mesh.vertices2d[ia]);
      const b = view.toScreen(mesh.vertices2d[ib]);
      const c = view.toScreen(mesh.vertices2d[ic]);
      ctx.beginPath();
      ctx.moveTo(a[0], a[1]);
      ctx.lineTo(b[0], b[1]);
      ctx.lineTo(c[0], c[1]);
      ctx.closePath();
      ctx.fillStyle = binColor(value, edges);
      ctx.fill();
    }
    ctx.strokeStyle = "#000";
    ctx.lineWidth = 1;
    for (const [u, v] of mesh.boundaryEdges) {
      const a = view.toScreen(mesh.vertices2d[u]);
      const b = view.toScreen(mesh.vertices2d[v]);
      ctx.beginPath();
      ctx.moveTo(a[0], a[1]);
      ctx.lineTo(b[0], b[1]);
      ctx.stroke();
    }

    for (const kind of ["baseline", "weighted"] as OverlayKind[]) {
      const payload = this.state.overlays.get(kind);
      if (payload && this.state.overlayVisible.get(kind)) {
        drawOverlay(ctx, view, payload, OVERLAY_COLORS[kind]);
      }
    }

    for (const marker of this.state.markers) {
      const [x, y] = view.toScreen(marker.position);
      ctx.beginPath();
      ctx.arc(x, y, MARKER_RADIUS_PX, 0, 2 * Math.PI);
      ctx.fillStyle = "#ffd700";
      ctx.fill();
      ctx.strokeStyle = "#000";
      ctx.stroke();
    }

    // legend along the bottom
    const entries = legendEntries(edges);
    const w = this.canvas.width / (entries.length + 1);
    const y0 = this.canvas.height - 22;
    entries.forEach((entry, i) => {
      ctx.fillStyle = entry.color;
      ctx.fillRect(i * w, y0, w, 10);
      ctx.fillStyle = "#000";
      ctx.font = "10px sans-serif";
      ctx.fillText(entry.label, i * w, y0 + 20);
    });
    ctx.fillText("Pa (log scale)", entries.length * w, y0 + 20);
  }

  // -- pointer handling ------------------------------------------------------

  private onPointerDown(ev: PointerEvent): void {
    const p = this.state.view.toPattern(ev.offsetX, ev.offsetY);
    const radius = MARKER_RADIUS_PX / this.state.view.scale;
    const hit = this.state.markerNear(p, radius);
    if (ev.button === 0 && hit >= 0) {
      this.dragging = hit;
    } else if (ev.button === 1 || ev.button === 2 || ev.shiftKey) {
      this.panning = true;
      this.lastPointer = [ev.offsetX, ev.offsetY];
    } else if (ev.button === 0) {
      this.handleCanvasClick(ev.offsetX, ev.offsetY);
    }
  }

  private onPointerMove(ev: PointerEvent): void {
    if (this.panning) {
      this.state.view.panBy(
        ev.offsetX - this.lastPointer[0],
        ev.offsetY - this.lastPointer[1],
      );
      this.lastPointer = [ev.offsetX, ev.offsetY];
      this.render();
      return;
    }
    if (this.dragging === null || !this.state.mesh) return;
    const p = this.state.view.toPattern(ev.offsetX, ev.offsetY);
    const pick = pickFace(this.state.mesh, p);
    if (pick) {
      this.state.markers[this.dragging] = {
        pick,
        position: pickPosition(this.state.mesh, pick),
      };
      this.render();
    }
  }

  private onPointerUp(_ev: PointerEvent): void {
    if (this.dragging !== null) {
      this.dragging = null;
      void this.pushTerminals(); // replace-in-place update
    }
    this.panning = false;
  }

  // -- chrome ------------------------------------------------------------------

  setStatus(text: string): void {
    this.statusEl.textContent = text;
  }

  showError(text: string): void {
    this.errorEl.textContent = text;
    this.errorEl.hidden = false;
  }

  hideError(): void {
    this.errorEl.hidden = true;
  }
}

export function createApp(root: HTMLElement, baseUrl: string, session?: string): DesignerApp {
  return new DesignerApp(root, baseUrl, session);
}
