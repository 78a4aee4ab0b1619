/**
 * Wire protocol spoken with the steering service.
 *
 * The client sends open/step/reset frames and receives state/error frames;
 * everything crossing the socket is validated here so the rest of the UI
 * can trust its inputs. The server is authoritative — nothing in this
 * module computes geometry, it only checks shapes and finiteness.
 */

export type Vec3 = [number, number, number];

export interface PlaneSpec {
  n: Vec3;
  p: Vec3;
}

export interface StateFrame {
  type: "state";
  tick: number;
  constrained: Vec3;
  proxy: Vec3;
  feedback: Vec3;
  planes: PlaneSpec[];
  status: string;
}

export interface ErrorFrame {
  type: "error";
  code: string;
  message: string;
}

export type ServerFrame = StateFrame | ErrorFrame;

export interface OpenFrame {
  type: "open";
  mesh: string;
  start: Vec3;
  radius: number;
}

export interface StepFrame {
  type: "step";
  desired: Vec3;
}

export interface ResetFrame {
  type: "reset";
}

export type ClientFrame = OpenFrame | StepFrame | ResetFrame;

export class ProtocolError extends Error {}

function isVec3(v: unknown): v is Vec3 {
  return (
    Array.isArray(v) &&
    v.length === 3 &&
    v.every((c) => typeof c === "number" && Number.isFinite(c))
  );
}

function vec3(v: unknown, what: string): Vec3 {
  if (!isVec3(v)) throw new ProtocolError(`${what} is not a finite [x,y,z]`);
  return [v[0], v[1], v[2]];
}

/** Parse and validate one incoming message; throws ProtocolError on junk. */
export function parseServerFrame(text: string): ServerFrame {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    throw new ProtocolError("frame is not JSON");
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new ProtocolError("frame is not an object");
  }
  const obj = raw as Record<string, unknown>;

  if (obj.type === "error") {
    // on the wire the code travels under the key "error"
    if (typeof obj.error !== "string" || typeof obj.message !== "string") {
      throw new ProtocolError("error frame needs error and message strings");
    }
    return { type: "error", code: obj.error, message: obj.message };
  }

  if (obj.type === "state") {
    if (typeof obj.tick !== "number" || !Number.isInteger(obj.tick) || obj.tick < 0) {
      throw new ProtocolError("state frame needs a non-negative integer tick");
    }
    if (!Array.isArray(obj.planes)) {
      throw new ProtocolError("state frame needs a planes array");
    }
    const planes: PlaneSpec[] = obj.planes.map((pl, i) => {
      if (typeof pl !== "object" || pl === null) {
        throw new ProtocolError(`plane ${i} is not an object`);
      }
      const p = pl as Record<string, unknown>;
      return { n: vec3(p.n, `plane ${i} normal`), p: vec3(p.p, `plane ${i} point`) };
    });
    if (typeof obj.status !== "string") {
      throw new ProtocolError("state frame needs a status string");
    }
    return {
      type: "state",
      tick: obj.tick,
      constrained: vec3(obj.constrained, "constrained"),
      proxy: vec3(obj.proxy, "proxy"),
      feedback: vec3(obj.feedback, "feedback"),
      planes,
      status: obj.status,
    };
  }

  throw new ProtocolError(`unknown frame type ${JSON.stringify(obj.type)}`);
}

export function encodeClientFrame(frame: ClientFrame): string {
  return JSON.stringify(frame);
}

export function norm(v: Vec3): number {
  return Math.hypot(v[0], v[1], v[2]);
}

export function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

export function add(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

export function scale(v: Vec3, s: number): Vec3 {
  return [v[0] * s, v[1] * s, v[2] * s];
}

/**
 * Move from `from` toward `to`, at most `limit` away from `from`.
 *
 * Outgoing desired positions are always produced through this, so no step
 * message ever asks for a jump larger than the session radius — mirroring
 * the clamp the server applies anyway.
 */
export function clampTowards(from: Vec3, to: Vec3, limit: number): Vec3 {
  const d = sub(to, from);
  const len = norm(d);
  if (len <= limit || len === 0) return [to[0], to[1], to[2]];
  return add(from, scale(d, limit / len));
}

/**
 * Collapse runs of consecutive step frames to their last member.
 *
 * Same semantics as the server-side queue coalescing: opens and resets are
 * barriers, and of any unbroken run of steps only the newest matters.
 */
export function coalesceSteps(frames: ClientFrame[]): ClientFrame[] {
  const out: ClientFrame[] = [];
  for (const f of frames) {
    if (f.type === "step" && out.length > 0 && out[out.length - 1].type === "step") {
      out[out.length - 1] = f;
    } else {
      out.push(f);
    }
  }
  return out;
}
