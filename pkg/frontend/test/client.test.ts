import { beforeEach, describe, expect, it } from "vitest";
import { VFClient, type SocketLike } from "../src/client";
import type { StateFrame, Vec3 } from "../src/protocol";
import { StateStore } from "../src/store";

/** In-memory socket: records sends, lets the test play the server. */
class FakeSocket implements SocketLike {
  sent: Record<string, unknown>[] = [];
  closed = false;
  onopen: (() => void) | null = null;
  onclose: (() => void) | null = null;
  onmessage: ((event: { data: unknown }) => void) | null = null;

  send(data: string): void {
    this.sent.push(JSON.parse(data));
  }
  close(): void {
    this.closed = true;
    this.onclose?.();
  }
  serverSends(frame: unknown): void {
    this.onmessage?.({ data: JSON.stringify(frame) });
  }
}

const stateFrame = (x: number, proxyX = x): StateFrame => ({
  type: "state",
  tick: 1,
  constrained: [x, 0, 0],
  proxy: [proxyX, 0, 0],
  feedback: [proxyX - x, 0, 0],
  planes: [],
  status: "Optimal",
});

describe("VFClient", () => {
  let store: StateStore;
  let socket: FakeSocket;
  let client: VFClient;

  beforeEach(() => {
    store = new StateStore();
    socket = new FakeSocket();
    client = new VFClient(store, () => socket);
    client.connect("ws://test/ws");
    socket.onopen?.();
  });

  it("tracks the connection through the store", () => {
    expect(store.state.connection).toBe("open");
    socket.close();
    expect(store.state.connection).toBe("closed");
  });

  it("sends an open frame and applies the reply", () => {
    client.open("cube", [14, 0, 0], 1.0);
    expect(socket.sent).toEqual([
      { type: "open", mesh: "cube", start: [14, 0, 0], radius: 1.0 },
    ]);
    socket.serverSends(stateFrame(14));
    expect(store.state.constrained).toEqual([14, 0, 0]);
  });

  it("stays silent while there is no target", () => {
    client.open("cube", [14, 0, 0], 1.0);
    socket.serverSends(stateFrame(14));
    socket.sent = [];
    client.pump();
    client.pump();
    expect(socket.sent).toEqual([]);
  });

  it("coalesces pointer updates to one step per pump", () => {
    client.open("cube", [14, 0, 0], 1.0);
    socket.serverSends(stateFrame(14));
    socket.sent = [];
    client.setTarget([0, 0, 0]);
    client.setTarget([1, 1, 0]);
    client.setTarget([5, 0, 0]); // only this one should go out
    client.pump();
    expect(socket.sent).toHaveLength(1);
    expect(socket.sent[0].type).toBe("step");
  });

  it("clamps every outgoing desired to the session radius", () => {
    client.open("cube", [14, 0, 0], 1.0);
    socket.serverSends(stateFrame(14));
    socket.sent = [];
    client.setTarget([-100, 40, 7]);
    client.pump();
    const desired = socket.sent[0].desired as Vec3;
    const d = Math.hypot(desired[0] - 14, desired[1], desired[2]);
    expect(d).toBeLessThanOrEqual(1.0 + 1e-12);
    expect(d).toBeCloseTo(1.0, 9);
  });

  it("clamps from the server position, not the stale target", () => {
    client.open("cube", [14, 0, 0], 1.0);
    socket.serverSends(stateFrame(14));
    socket.sent = [];
    client.setTarget([0, 0, 0]);
    client.pump();
    socket.serverSends(stateFrame(13)); // server confirms the move
    client.pump();
    const second = socket.sent[1].desired as Vec3;
    expect(second).toEqual([12, 0, 0]);
  });

  it("keeps pumping after release until the gauge unwinds", () => {
    client.open("cube", [14, 0, 0], 1.0);
    socket.serverSends(stateFrame(10, 6)); // proxy 4 inside, gauge 4
    socket.sent = [];
    client.releaseTarget(); // desired = constrained
    client.pump();
    expect(socket.sent).toHaveLength(1);
    expect(socket.sent[0].desired).toEqual([10, 0, 0]);
    socket.serverSends(stateFrame(10, 10)); // proxy back on the tool
    socket.sent = [];
    client.pump();
    expect(socket.sent).toEqual([]); // gauge zero, go quiet
  });

  it("queues frames while connecting and flushes on open", () => {
    const lateSocket = new FakeSocket();
    const lateClient = new VFClient(new StateStore(), () => lateSocket);
    lateClient.connect("ws://test/ws");
    lateClient.open("cube", [14, 0, 0], 1.0); // socket not open yet
    expect(lateSocket.sent).toEqual([]);
    lateSocket.onopen?.();
    expect(lateSocket.sent).toHaveLength(1);
  });

  it("turns malformed server frames into error banners, not crashes", () => {
    socket.onmessage?.({ data: "{{{" });
    expect(store.state.lastError?.code).toBe("BadServerFrame");
  });

  it("freezes markers when the socket drops", () => {
    client.open("cube", [14, 0, 0], 1.0);
    socket.serverSends(stateFrame(14));
    socket.close();
    expect(store.state.connection).toBe("closed");
    expect(store.state.constrained).toEqual([14, 0, 0]);
  });
});
