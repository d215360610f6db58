// Log-binned heatmap colors. Bin edges come from the service; the UI
// only assigns colors and draws.

export const RAMP: [number, number, number][] = [
  [33, 102, 172],
  [67, 147, 195],
  [146, 197, 222],
  [209, 229, 240],
  [253, 219, 199],
  [244, 165, 130],
  [214, 96, 77],
  [178, 24, 43],
];

export function binOf(value: number, edges: number[]): number {
  for (let i = edges.length - 1; i > 0; i--) {
    if (value >= edges[i]) return Math.min(i, edges.length - 2);
  }
  return 0;
}

export function binColor(value: number, edges: number[]): string {
  const [r, g, b] = RAMP[binOf(value, edges) % RAMP.length];
  return `rgb(${r},${g},${b})`;
}

export function legendEntries(edges: number[]): { color: string; label: string }[] {
  const out: { color: string; label: string }[] = [];
  const bins = Math.min(RAMP.length, Math.max(edges.length - 1, 1));
  for (let i = 0; i < bins; i++) {
    const [r, g, b] = RAMP[i];
    const lo = edges[i];
    out.push({
      color: `rgb(${r},${g},${b})`,
      label: lo === undefined || lo === 0 ? "0" : lo.toExponential(1),
    });
  }
  return out;
}
