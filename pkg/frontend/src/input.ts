/**
 * Pointer-to-world mapping.
 *
 * The default steering mode intersects the pointer ray with a
 * camera-facing plane through the current tool position, so dragging
 * moves the target in the screen plane; the scroll wheel slides that
 * plane along the view direction to reach into or out of the scene.
 * Pure math on plain vectors — no renderer types — so it is unit-testable
 * without a browser.
 */

import { add, scale, sub, type Vec3 } from "./protocol";

/** Minimal perspective-camera description (all vectors unit length). */
export interface CameraBasis {
  position: Vec3;
  right: Vec3;
  up: Vec3;
  /** Points from the camera into the scene. */
  forward: Vec3;
  /** Vertical field of view in radians. */
  fovY: number;
  aspect: number;
}

function dot(a: Vec3, b: Vec3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

/** Ray direction through normalized device coordinates (x,y in [-1,1]). */
export function rayThrough(cam: CameraBasis, ndcX: number, ndcY: number): Vec3 {
  const tanY = Math.tan(cam.fovY / 2);
  const d = add(
    cam.forward,
    add(scale(cam.right, ndcX * tanY * cam.aspect), scale(cam.up, ndcY * tanY)),
  );
  const len = Math.hypot(d[0], d[1], d[2]);
  return scale(d, 1 / len);
}

/**
 * Where the pointer ray meets the drag plane.
 *
 * The plane faces the camera and passes through `anchor` pushed
 * `depthOffset` along the view direction. Returns null if the ray points
 * away from the plane (camera behind it after a large negative offset).
 */
export function dragPlanePoint(
  cam: CameraBasis,
  ndcX: number,
  ndcY: number,
  anchor: Vec3,
  depthOffset = 0,
): Vec3 | null {
  const planePoint = add(anchor, scale(cam.forward, depthOffset));
  const dir = rayThrough(cam, ndcX, ndcY);
  const denom = dot(dir, cam.forward);
  if (denom <= 1e-9) return null;
  const t = dot(sub(planePoint, cam.position), cam.forward) / denom;
  if (t <= 0) return null;
  return add(cam.position, scale(dir, t));
}

/** Client-area pixel coordinates to NDC. */
export function pixelToNDC(
  px: number,
  py: number,
  width: number,
  height: number,
): [number, number] {
  return [(2 * px) / width - 1, 1 - (2 * py) / height];
}
