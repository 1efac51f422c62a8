/** Canvas viewer: load a bundle, pan around it, poke it with activation. */

import { buildScene, Scene } from "./render.js";
import { createViewState, selectSource, setSliders, ViewState } from "./state.js";
import { BundleError, validateBundle } from "./types.js";

let state: ViewState | null = null;
let dirty = false;

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const banner = document.getElementById("banner")!;
const info = document.getElementById("info")!;
const filePicker = document.getElementById("file") as HTMLInputElement;
const thresholdSlider = document.getElementById("threshold") as HTMLInputElement;
const decaySlider = document.getElementById("decay") as HTMLInputElement;
const labelCount = document.getElementById("labels") as HTMLInputElement;
const clearButton = document.getElementById("clear") as HTMLButtonElement;

function showError(message: string): void {
  banner.textContent = message;
  banner.classList.add("visible");
}

function clearError(): void {
  banner.classList.remove("visible");
}

function scheduleDraw(): void {
  if (dirty) return;
  dirty = true;
  requestAnimationFrame(() => {
    dirty = false;
    draw();
  });
}

function draw(): void {
  const width = canvas.clientWidth;
  const height = canvas.clientHeight;
  const dpr = window.devicePixelRatio || 1;
  if (canvas.width !== width * dpr || canvas.height !== height * dpr) {
    canvas.width = width * dpr;
    canvas.height = height * dpr;
  }
  ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
  ctx.clearRect(0, 0, width, height);
  if (!state) return;

  const scene = buildScene(state);
  for (const edge of scene.edges) {
    ctx.globalAlpha = edge.opacity;
    ctx.strokeStyle = edge.color;
    ctx.lineWidth = edge.carrying ? 2.5 : 1;
    ctx.beginPath();
    ctx.moveTo(edge.x1, edge.y1);
    ctx.lineTo(edge.x2, edge.y2);
    ctx.stroke();
  }
  ctx.globalAlpha = 1;
  for (const node of scene.nodes) {
    ctx.fillStyle = node.fill;
    ctx.beginPath();
    ctx.arc(node.x, node.y, node.radius, 0, 2 * Math.PI);
    ctx.fill();
    if (node.fired || node.selected) {
      ctx.strokeStyle = node.selected ? "#111111" : "#e8a33d";
      ctx.lineWidth = 2;
      ctx.stroke();
    }
  }
  ctx.fillStyle = "#222222";
  ctx.font = "11px sans-serif";
  ctx.textAlign = "center";
  for (const label of scene.labels) {
    ctx.fillText(label.text, label.x, label.y);
  }
  reportStatus(scene);
}

function reportStatus(scene: Scene): void {
  if (!state) return;
  const parts = [
    `${scene.nodes.length} nodes`,
    `${scene.edges.length} edges${scene.edgesFaded ? " (faint ones hidden)" : ""}`,
    `corpora: ${state.bundle.meta.labels.join(", ")}`,
  ];
  if (state.overlay) {
    parts.push(`activated ${state.overlay.activation.size} from ${state.overlay.source}`);
  }
  info.textContent = parts.join(" | ");
}

function fitCamera(): void {
  if (!state || state.bundle.nodes.length === 0) return;
  let minX = Infinity;
  let maxX = -Infinity;
  let minY = Infinity;
  let maxY = -Infinity;
  for (const node of state.bundle.nodes) {
    minX = Math.min(minX, node.x);
    maxX = Math.max(maxX, node.x);
    minY = Math.min(minY, node.y);
    maxY = Math.max(maxY, node.y);
  }
  const width = canvas.clientWidth || 800;
  const height = canvas.clientHeight || 600;
  const spanX = Math.max(maxX - minX, 1);
  const spanY = Math.max(maxY - minY, 1);
  const zoom = Math.min(width / (spanX * 1.2), height / (spanY * 1.2), 4);
  state.camera.zoom = zoom;
  state.camera.panX = width / 2 - ((minX + maxX) / 2) * zoom;
  state.camera.panY = height / 2 - ((minY + maxY) / 2) * zoom;
}

function loadBundleText(text: string, origin: string): void {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    showError(`${origin}: not JSON (${(err as Error).message})`);
    return;
  }
  try {
    const bundle = validateBundle(doc);
    state = createViewState(bundle);
    clearError();
    thresholdSlider.value = String(state.firingThreshold);
    decaySlider.value = String(state.decay);
    labelCount.value = String(state.labelsPerColumn);
    fitCamera();
    scheduleDraw();
  } catch (err) {
    if (err instanceof BundleError) {
      showError(`${origin}: ${err.message}`);
      return;
    }
    throw err;
  }
}

filePicker.addEventListener("change", () => {
  const file = filePicker.files?.[0];
  if (!file) return;
  file.text().then((text) => loadBundleText(text, file.name));
});

function sliderChanged(): void {
  if (!state) return;
  setSliders(state, Number(thresholdSlider.value), Number(decaySlider.value));
  scheduleDraw();
}
thresholdSlider.addEventListener("input", sliderChanged);
decaySlider.addEventListener("input", sliderChanged);

labelCount.addEventListener("input", () => {
  if (!state) return;
  state.labelsPerColumn = Math.max(0, Math.floor(Number(labelCount.value) || 0));
  scheduleDraw();
});

clearButton.addEventListener("click", () => {
  if (!state) return;
  selectSource(state, null);
  scheduleDraw();
});

function nodeAt(px: number, py: number): string | null {
  if (!state) return null;
  const scene = buildScene(state);
  let best: string | null = null;
  let bestDist = Infinity;
  for (const node of scene.nodes) {
    const d = Math.hypot(node.x - px, node.y - py);
    if (d <= Math.max(node.radius, 6) + 2 && d < bestDist) {
      best = node.id;
      bestDist = d;
    }
  }
  return best;
}

let dragging = false;
let moved = false;
let lastX = 0;
let lastY = 0;

canvas.addEventListener("mousedown", (ev) => {
  dragging = true;
  moved = false;
  lastX = ev.offsetX;
  lastY = ev.offsetY;
});

canvas.addEventListener("mousemove", (ev) => {
  if (!dragging || !state) return;
  const dx = ev.offsetX - lastX;
  const dy = ev.offsetY - lastY;
  if (Math.abs(dx) + Math.abs(dy) > 2) moved = true;
  state.camera.panX += dx;
  state.camera.panY += dy;
  lastX = ev.offsetX;
  lastY = ev.offsetY;
  scheduleDraw();
});

window.addEventListener("mouseup", (ev) => {
  if (!dragging) return;
  dragging = false;
  if (moved || !state || ev.target !== canvas) return;
  const id = nodeAt(ev.offsetX, ev.offsetY);
  if (id !== null) {
    selectSource(state, id);
    scheduleDraw();
  }
});

canvas.addEventListener("wheel", (ev) => {
  if (!state) return;
  ev.preventDefault();
  const factor = ev.deltaY < 0 ? 1.1 : 1 / 1.1;
  const { camera } = state;
  const next = Math.min(20, Math.max(0.05, camera.zoom * factor));
  const applied = next / camera.zoom;
  camera.panX = ev.offsetX - (ev.offsetX - camera.panX) * applied;
  camera.panY = ev.offsetY - (ev.offsetY - camera.panY) * applied;
  camera.zoom = next;
  scheduleDraw();
});

window.addEventListener("resize", scheduleDraw);

const param = new URLSearchParams(window.location.search).get("bundle");
if (param) {
  fetch(param)
    .then((resp) => {
      if (!resp.ok) throw new Error(`HTTP ${resp.status}`);
      return resp.text();
    })
    .then((text) => loadBundleText(text, param))
    .catch((err) => showError(`${param}: ${(err as Error).message}`));
}
