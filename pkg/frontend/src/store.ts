/**
 * Client-side view state.
 *
 * The one rule here: tool markers and plane overlays change only in
 * applyServer(), from a validated server frame. Pointer input, connection
 * churn and render loops can read this state but never move the markers —
 * the server is the single authority on where the tool is, and rendering
 * is a pure function of this store. That makes a replay of recorded
 * server frames pixel-identical to the live session that produced them.
 */

import { norm, type PlaneSpec, type ServerFrame, type Vec3 } from "./protocol";

export type ConnectionStatus = "idle" | "connecting" | "open" | "closed";

export interface ViewState {
  connection: ConnectionStatus;
  /** Mesh id of the open session, if any. */
  meshId: string | null;
  sessionRadius: number;
  tick: number;
  constrained: Vec3 | null;
  proxy: Vec3 | null;
  feedback: Vec3;
  /** Exactly the planes of the most recent state frame, nothing else. */
  planes: PlaneSpec[];
  solverStatus: string;
  /** ‖feedback‖ in mesh units; drives the gauge. */
  gaugeMagnitude: number;
  lastError: { code: string; message: string } | null;
  framesReceived: number;
}

function initialState(): ViewState {
  return {
    connection: "idle",
    meshId: null,
    sessionRadius: 1,
    tick: 0,
    constrained: null,
    proxy: null,
    feedback: [0, 0, 0],
    planes: [],
    solverStatus: "",
    gaugeMagnitude: 0,
    lastError: null,
    framesReceived: 0,
  };
}

type Listener = (state: ViewState) => void;

export class StateStore {
  state: ViewState = initialState();
  private listeners: Listener[] = [];

  onChange(fn: Listener): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn(this.state);
  }

  /** The only mutator of markers, planes and the gauge. */
  applyServer(frame: ServerFrame): void {
    if (frame.type === "error") {
      this.state = { ...this.state, lastError: { code: frame.code, message: frame.message } };
      this.emit();
      return;
    }
    this.state = {
      ...this.state,
      tick: frame.tick,
      constrained: frame.constrained,
      proxy: frame.proxy,
      feedback: frame.feedback,
      planes: frame.planes,
      solverStatus: frame.status,
      gaugeMagnitude: norm(frame.feedback),
      lastError: null,
      framesReceived: this.state.framesReceived + 1,
    };
    this.emit();
  }

  setConnection(connection: ConnectionStatus): void {
    // Markers are left as they were: a dropped socket freezes the scene
    // rather than blanking it, and the banner tells the user why.
    this.state = { ...this.state, connection };
    this.emit();
  }

  setSession(meshId: string | null, radius: number): void {
    this.state = { ...this.state, meshId, sessionRadius: radius };
    this.emit();
  }

  clearError(): void {
    this.state = { ...this.state, lastError: null };
    this.emit();
  }
}
