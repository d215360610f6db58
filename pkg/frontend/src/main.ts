import { createApp } from "./app.js";
import { PRESETS } from "./presets.js";

const root = document.querySelector<HTMLDivElement>("#app");
if (!root) {
  throw new Error("missing #app element");
}

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("service") ?? "http://127.0.0.1:8080";
const app = createApp(root, baseUrl, params.get("session") ?? "ui");

// terminal presets (relative pattern coordinates) as a simple picker
const picker = document.createElement("select");
picker.appendChild(new Option("presets...", ""));
for (const preset of PRESETS) {
  picker.appendChild(new Option(preset.name, preset.name));
}
picker.addEventListener("change", () => {
  const preset = PRESETS.find((p) => p.name === picker.value);
  const mesh = app.state.mesh;
  if (!preset || !mesh) return;
  app.state.markers = [];
  const [minX, minY] = mesh.bounds.min;
  const [maxX, maxY] = mesh.bounds.max;
  for (const [fx, fy] of preset.points) {
    app.placeTerminalAtPattern([
      minX + fx * (maxX - minX),
      minY + fy * (maxY - minY),
    ]);
  }
});
root.querySelector(".toolbar")?.appendChild(picker);

void app.load();
