// Metrics table: values rendered verbatim from the service payloads,
// plus a relative-difference row (the single derived figure, labelled).

import type { SolvePayload } from "./api.js";

export interface MetricsRow {
  name: string;
  energy: string;
  maxElong: string;
  avgElong: string;
  length: string;
}

export function rowFromPayload(name: string, payload: SolvePayload): MetricsRow {
  const m = payload.metrics;
  return {
    name,
    energy: String(m.deformationEnergy),
    maxElong: String(m.maxElongationRate),
    avgElong: String(m.avgElongationRate),
    length: String(m.totalLength),
  };
}

export function percentDiffRow(
  weighted: SolvePayload,
  baseline: SolvePayload,
): MetricsRow {
  const pct = (w: number, b: number): string =>
    b === 0 ? "n/a" : `${(100 * (w / b - 1)).toFixed(1)}%`;
  return {
    name: "weighted vs baseline",
    energy: pct(weighted.metrics.deformationEnergy, baseline.metrics.deformationEnergy),
    maxElong: pct(weighted.metrics.maxElongationRate, baseline.metrics.maxElongationRate),
    avgElong: pct(weighted.metrics.avgElongationRate, baseline.metrics.avgElongationRate),
    length: pct(weighted.metrics.totalLength, baseline.metrics.totalLength),
  };
}

export function renderMetricsTable(table: HTMLTableElement, rows: MetricsRow[]): void {
  table.innerHTML = "";
  const head = table.createTHead().insertRow();
  for (const label of ["layout", "deformation energy", "max elongation %", "avg elongation %", "length (m)"]) {
    const th = document.createElement("th");
    th.textContent = label;
    head.appendChild(th);
  }
  const body = table.createTBody();
  for (const row of rows) {
    const tr = body.insertRow();
    for (const value of [row.name, row.energy, row.maxElong, row.avgElong, row.length]) {
      tr.insertCell().textContent = value;
    }
  }
}
