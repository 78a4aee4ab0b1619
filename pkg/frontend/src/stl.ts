/**
 * Binary STL parsing for meshes fetched from the service catalog.
 *
 * Layout: 80-byte header, uint32 triangle count, then per triangle a
 * float32 normal, three float32 vertices and a uint16 attribute count
 * (50 bytes per record, little-endian). Output is flat arrays ready for
 * a BufferGeometry, plus the bounding box used to place the camera.
 */

import type { Vec3 } from "./protocol";

export interface ParsedMesh {
  triangleCount: number;
  /** 9 floats per triangle (soup layout, not indexed). */
  positions: Float32Array;
  /** One normal per triangle as stored in the file. */
  normals: Float32Array;
  min: Vec3;
  max: Vec3;
}

export class STLFormatError extends Error {}

export function parseBinarySTL(buffer: ArrayBuffer): ParsedMesh {
  if (buffer.byteLength < 84) {
    throw new STLFormatError(`file too short (${buffer.byteLength} bytes)`);
  }
  const view = new DataView(buffer);
  const count = view.getUint32(80, true);
  const expected = 84 + 50 * count;
  if (buffer.byteLength !== expected) {
    throw new STLFormatError(
      `${count} triangles need ${expected} bytes, file has ${buffer.byteLength}`,
    );
  }

  const positions = new Float32Array(count * 9);
  const normals = new Float32Array(count * 3);
  const min: Vec3 = [Infinity, Infinity, Infinity];
  const max: Vec3 = [-Infinity, -Infinity, -Infinity];

  for (let t = 0; t < count; t++) {
    const base = 84 + 50 * t;
    for (let c = 0; c < 3; c++) {
      normals[3 * t + c] = view.getFloat32(base + 4 * c, true);
    }
    for (let v = 0; v < 9; v++) {
      const value = view.getFloat32(base + 12 + 4 * v, true);
      positions[9 * t + v] = value;
      const axis = v % 3;
      if (value < min[axis]) min[axis] = value;
      if (value > max[axis]) max[axis] = value;
    }
  }

  if (count === 0) {
    min[0] = min[1] = min[2] = 0;
    max[0] = max[1] = max[2] = 0;
  }
  return { triangleCount: count, positions, normals, min, max };
}

export function bboxCenter(mesh: ParsedMesh): Vec3 {
  return [
    0.5 * (mesh.min[0] + mesh.max[0]),
    0.5 * (mesh.min[1] + mesh.max[1]),
    0.5 * (mesh.min[2] + mesh.max[2]),
  ];
}

export function bboxDiagonal(mesh: ParsedMesh): number {
  return Math.hypot(
    mesh.max[0] - mesh.min[0],
    mesh.max[1] - mesh.min[1],
    mesh.max[2] - mesh.min[2],
  );
}
