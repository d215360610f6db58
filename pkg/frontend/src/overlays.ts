// Canvas drawing of smoothed strip centerlines and outlines.

import type { SegmentPayload, SolvePayload } from "./api.js";
import type { ViewTransform } from "./state.js";

export const OVERLAY_COLORS: Record<string, string> = {
  weighted: "#111111",
  baseline: "#b2182b",
};

function traceSegment(
  ctx: CanvasRenderingContext2D,
  view: ViewTransform,
  seg: SegmentPayload,
  first: boolean,
): void {
  if (seg.type === "line" && seg.p0 && seg.p1) {
    const a = view.toScreen(seg.p0);
    const b = view.toScreen(seg.p1);
    if (first) ctx.moveTo(a[0], a[1]);
    ctx.lineTo(b[0], b[1]);
  } else if (seg.type === "arc" && seg.center && seg.radius !== undefined) {
    const c = view.toScreen(seg.center);
    const r = seg.radius * view.scale;
    const a0 = seg.startAngle ?? 0;
    const sweep = seg.sweep ?? 0;
    // screen y is flipped, so angles negate and orientation swaps
    if (first) {
      const p0 = view.toScreen([
        seg.center[0] + seg.radius * Math.cos(a0),
        seg.center[1] + seg.radius * Math.sin(a0),
      ]);
      ctx.moveTo(p0[0], p0[1]);
    }
    ctx.arc(c[0], c[1], r, -a0, -(a0 + sweep), sweep > 0);
  }
}

export function drawOverlay(
  ctx: CanvasRenderingContext2D,
  view: ViewTransform,
  payload: SolvePayload,
  color: string,
): void {
  const wdPx = payload.layout.wd * view.scale;
  // strip body at full width, then the centerline on top
  ctx.save();
  ctx.strokeStyle = color;
  ctx.globalAlpha = 0.25;
  ctx.lineWidth = Math.max(wdPx, 1);
  ctx.lineCap = "round";
  for (const branch of payload.layout.smoothedBranches) {
    ctx.beginPath();
    branch.segments.forEach((seg, i) => traceSegment(ctx, view, seg, i === 0));
    ctx.stroke();
  }
  ctx.globalAlpha = 1.0;
  ctx.lineWidth = 2;
  for (const branch of payload.layout.smoothedBranches) {
    ctx.beginPath();
    branch.segments.forEach((seg, i) => traceSegment(ctx, view, seg, i === 0));
    ctx.stroke();
  }
  ctx.restore();
}
