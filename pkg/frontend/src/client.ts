/**
 * WebSocket session driver.
 *
 * Pointer handlers call setTarget() as often as they like; pump() — called
 * once per animation frame by the render loop — turns the newest target
 * into at most one step frame, with the desired position clamped to the
 * session radius around the last server-confirmed tool position. So the
 * outgoing rate equals the frame rate, intermediate pointer positions
 * coalesce away, and no message ever requests a jump the server would
 * refuse anyway.
 */

import {
  clampTowards,
  coalesceSteps,
  encodeClientFrame,
  parseServerFrame,
  ProtocolError,
  type ClientFrame,
  type Vec3,
} from "./protocol";
import type { StateStore } from "./store";

/** The slice of the WebSocket API the client uses (injectable in tests). */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export class VFClient {
  private socket: SocketLike | null = null;
  private queue: ClientFrame[] = [];
  private target: Vec3 | null = null;
  private socketOpen = false;

  constructor(
    private store: StateStore,
    private socketFactory: SocketFactory,
  ) {}

  connect(url: string): void {
    this.disconnect();
    this.store.setConnection("connecting");
    const sock = this.socketFactory(url);
    this.socket = sock;
    sock.onopen = () => {
      this.socketOpen = true;
      this.store.setConnection("open");
      this.flush();
    };
    sock.onclose = () => {
      this.socketOpen = false;
      if (this.socket === sock) {
        this.socket = null;
        this.store.setConnection("closed");
      }
    };
    sock.onmessage = (event) => {
      if (typeof event.data !== "string") return;
      try {
        this.store.applyServer(parseServerFrame(event.data));
      } catch (err) {
        if (!(err instanceof ProtocolError)) throw err;
        this.store.applyServer({
          type: "error",
          code: "BadServerFrame",
          message: err.message,
        });
      }
    };
  }

  disconnect(): void {
    if (this.socket) {
      const sock = this.socket;
      this.socket = null;
      sock.close();
    }
    this.socketOpen = false;
    this.queue = [];
    this.target = null;
  }

  get connected(): boolean {
    return this.socketOpen;
  }

  open(meshId: string, start: Vec3, radius: number): void {
    this.target = null;
    this.store.setSession(meshId, radius);
    this.enqueue({ type: "open", mesh: meshId, start, radius });
  }

  reset(): void {
    this.target = null;
    this.enqueue({ type: "reset" });
  }

  /** Remember where the pointer wants the tool; sent on the next pump. */
  setTarget(p: Vec3): void {
    this.target = p;
  }

  /** Pointer released: steer the proxy back onto the tool. */
  releaseTarget(): void {
    const c = this.store.state.constrained;
    this.target = c ? [c[0], c[1], c[2]] : null;
  }

  /**
   * Once per animation frame: emit at most one step toward the current
   * target. Skips sending when already there, so an idle scene is silent.
   */
  pump(): void {
    const c = this.store.state.constrained;
    if (this.target === null || c === null) {
      this.flush();
      return;
    }
    const desired = clampTowards(c, this.target, this.store.state.sessionRadius);
    if (desired[0] === c[0] && desired[1] === c[1] && desired[2] === c[2]) {
      // Keep stepping while the proxy still has distance to unwind.
      if (this.store.state.gaugeMagnitude <= 1e-12) {
        this.flush();
        return;
      }
    }
    this.enqueue({ type: "step", desired });
    this.flush();
  }

  private enqueue(frame: ClientFrame): void {
    this.queue = coalesceSteps([...this.queue, frame]);
    this.flush();
  }

  private flush(): void {
    if (!this.socket || !this.socketOpen) return;
    for (const frame of this.queue) {
      this.socket.send(encodeClientFrame(frame));
    }
    this.queue = [];
  }
}
