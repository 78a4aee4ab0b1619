/**
 * Wiring: toolbar, pointer input, WebSocket client, render loop.
 *
 * Left-drag steers the tool (camera-facing drag plane, wheel for depth);
 * right-drag orbits and middle-drag pans the camera. The render loop calls
 * client.pump() once per frame, which is what rate-limits and coalesces
 * outgoing step messages.
 */

import * as THREE from "three";
import { OrbitControls } from "three/addons/controls/OrbitControls.js";
import { VFClient, type SocketLike } from "./client";
import { dragPlanePoint, pixelToNDC, type CameraBasis } from "./input";
import type { Vec3 } from "./protocol";
import { bboxDiagonal, parseBinarySTL, type ParsedMesh } from "./stl";
import { StateStore } from "./store";
import { SceneView } from "./view";

interface CatalogEntry {
  id: string;
  triangles: number;
  vertices: number;
  closed: boolean;
  bounds: { lo: Vec3; hi: Vec3 };
}

const $ = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;

const canvas = $<HTMLCanvasElement>("scene");
const view = new SceneView(canvas);
const store = new StateStore();
const client = new VFClient(store, (url) => {
  const ws = new WebSocket(url);
  const sock: SocketLike = { onopen: null, onclose: null, onmessage: null,
    send: (d) => ws.send(d), close: () => ws.close() };
  ws.onopen = () => sock.onopen?.();
  ws.onclose = () => sock.onclose?.();
  ws.onmessage = (ev) => sock.onmessage?.({ data: ev.data });
  return sock;
});

const controls = new OrbitControls(view.camera, canvas);
controls.mouseButtons = {
  LEFT: null as unknown as number, // left button belongs to tool steering
  MIDDLE: THREE.MOUSE.PAN,
  RIGHT: THREE.MOUSE.ROTATE,
};
controls.enableDamping = true;

let catalog: CatalogEntry[] = [];
let currentMesh: ParsedMesh | null = null;
let dragging = false;
let depthOffset = 0;
let lastPointer: [number, number] | null = null;

function httpBase(): string {
  return ($<HTMLInputElement>("server").value || "127.0.0.1:8765").replace(/\/+$/, "");
}

function cameraBasis(): CameraBasis {
  const m = view.camera.matrixWorld;
  const col = (i: number) => new THREE.Vector3().setFromMatrixColumn(m, i);
  const right = col(0).normalize();
  const up = col(1).normalize();
  const forward = col(2).normalize().multiplyScalar(-1);
  return {
    position: view.camera.position.toArray() as Vec3,
    right: right.toArray() as Vec3,
    up: up.toArray() as Vec3,
    forward: forward.toArray() as Vec3,
    fovY: (view.camera.fov * Math.PI) / 180,
    aspect: view.camera.aspect,
  };
}

async function refreshCatalog(): Promise<void> {
  const res = await fetch(`http://${httpBase()}/meshes`);
  if (!res.ok) throw new Error(`catalog fetch failed: ${res.status}`);
  catalog = (await res.json()) as CatalogEntry[];
  const select = $<HTMLSelectElement>("mesh");
  select.innerHTML = "";
  for (const entry of catalog) {
    const opt = document.createElement("option");
    opt.value = entry.id;
    opt.textContent = `${entry.id} (${entry.triangles.toLocaleString()} tris)`;
    select.appendChild(opt);
  }
}

async function openSelected(): Promise<void> {
  const id = $<HTMLSelectElement>("mesh").value;
  const entry = catalog.find((e) => e.id === id);
  if (!entry) return;
  const radius = Number($<HTMLInputElement>("radius").value) || 1.0;

  const res = await fetch(`http://${httpBase()}/meshes/${id}`);
  if (!res.ok) throw new Error(`mesh fetch failed: ${res.status}`);
  currentMesh = parseBinarySTL(await res.arrayBuffer());
  view.setMesh(currentMesh, radius);
  depthOffset = 0;

  // Same convention as the scripted harness: start just outside +x.
  const { lo, hi } = entry.bounds;
  const start: Vec3 = [
    hi[0] + 2 * radius,
    0.5 * (lo[1] + hi[1]),
    0.5 * (lo[2] + hi[2]),
  ];
  client.open(id, start, radius);
}

function connect(): void {
  client.connect(`ws://${httpBase()}/ws`);
  refreshCatalog().catch((err) => showBanner(String(err)));
}

function showBanner(text: string | null): void {
  const banner = $("banner");
  banner.textContent = text ?? "";
  banner.style.display = text ? "block" : "none";
}

function updateTarget(): void {
  if (!dragging || lastPointer === null) return;
  const anchor = store.state.constrained;
  if (!anchor) return;
  const rect = canvas.getBoundingClientRect();
  const [nx, ny] = pixelToNDC(
    lastPointer[0] - rect.left,
    lastPointer[1] - rect.top,
    rect.width,
    rect.height,
  );
  const hit = dragPlanePoint(cameraBasis(), nx, ny, anchor, depthOffset);
  if (hit) client.setTarget(hit);
}

canvas.addEventListener("pointerdown", (e) => {
  if (e.button !== 0) return;
  dragging = true;
  lastPointer = [e.clientX, e.clientY];
  canvas.setPointerCapture(e.pointerId);
  updateTarget();
});
canvas.addEventListener("pointermove", (e) => {
  lastPointer = [e.clientX, e.clientY];
  updateTarget();
});
canvas.addEventListener("pointerup", (e) => {
  if (e.button !== 0) return;
  dragging = false;
  client.releaseTarget();
});
canvas.addEventListener(
  "wheel",
  (e) => {
    if (!dragging) return; // wheel zooms the camera unless steering
    e.preventDefault();
    const scale = currentMesh ? 0.0015 * bboxDiagonal(currentMesh) : 0.05;
    depthOffset += e.deltaY * scale;
    updateTarget();
  },
  { passive: false },
);
canvas.addEventListener("contextmenu", (e) => e.preventDefault());

$("connect").addEventListener("click", connect);
$("open").addEventListener("click", () => {
  openSelected().catch((err) => showBanner(String(err)));
});
$("reset").addEventListener("click", () => client.reset());

store.onChange((s) => {
  $("status").textContent =
    s.connection === "open"
      ? `tick ${s.tick} · ${s.solverStatus || "—"} · ${s.planes.length} plane${s.planes.length === 1 ? "" : "s"}`
      : s.connection;
  const gauge = $("gauge-fill");
  const radius = s.sessionRadius || 1;
  const frac = Math.min(1, s.gaugeMagnitude / (4 * radius));
  gauge.style.width = `${(100 * frac).toFixed(1)}%`;
  gauge.style.background = frac > 0.6 ? "#ef4444" : frac > 0.25 ? "#f59e0b" : "#22c55e";
  $("gauge-label").textContent = `${s.gaugeMagnitude.toFixed(2)} mm`;
  if (s.connection === "closed") {
    showBanner("disconnected — scene frozen; press Connect to rejoin");
  } else if (s.lastError) {
    showBanner(`${s.lastError.code}: ${s.lastError.message}`);
  } else {
    showBanner(null);
  }
});

// Render loop with a rolling fps readout.
let frames = 0;
let fpsWindowStart = performance.now();
function tick(): void {
  requestAnimationFrame(tick);
  client.pump();
  controls.update();
  view.update(store.state);
  view.render();
  frames += 1;
  const now = performance.now();
  if (now - fpsWindowStart >= 500) {
    $("fps").textContent = `${((1000 * frames) / (now - fpsWindowStart)).toFixed(0)} fps`;
    frames = 0;
    fpsWindowStart = now;
  }
}

function fitCanvas(): void {
  const rect = canvas.parentElement!.getBoundingClientRect();
  view.resize(rect.width, rect.height);
}
window.addEventListener("resize", fitCanvas);
fitCanvas();
tick();
