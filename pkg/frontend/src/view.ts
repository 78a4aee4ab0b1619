/**
 * three.js scene management: the mesh, the two tool markers, and the
 * constraint-plane overlays. Everything here is driven by ViewState —
 * update() copies whatever the store holds into scene objects and nothing
 * else moves them, so the scene renders identically whether the state
 * came from a live socket or a replay of recorded frames.
 */

import * as THREE from "three";
import type { PlaneSpec } from "./protocol";
import type { ParsedMesh } from "./stl";
import { bboxCenter, bboxDiagonal } from "./stl";
import type { ViewState } from "./store";

export class SceneView {
  readonly scene = new THREE.Scene();
  readonly camera: THREE.PerspectiveCamera;
  private renderer: THREE.WebGLRenderer;

  private meshObject: THREE.Mesh | null = null;
  private constrainedMarker: THREE.Mesh;
  private proxyMarker: THREE.Mesh;
  private feedbackLine: THREE.Line;
  private planeGroup = new THREE.Group();
  private markerRadius = 1;

  constructor(canvas: HTMLCanvasElement) {
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.renderer.setPixelRatio(window.devicePixelRatio);
    this.scene.background = new THREE.Color(0x10141a);

    this.camera = new THREE.PerspectiveCamera(50, 1, 0.1, 5000);
    this.camera.position.set(40, 30, 40);

    this.scene.add(new THREE.HemisphereLight(0xcfd8e8, 0x202428, 1.0));
    const key = new THREE.DirectionalLight(0xffffff, 1.4);
    key.position.set(60, 80, 40);
    this.scene.add(key);

    this.constrainedMarker = new THREE.Mesh(
      new THREE.SphereGeometry(1, 24, 16),
      new THREE.MeshStandardMaterial({ color: 0x53b1fd, roughness: 0.35 }),
    );
    this.proxyMarker = new THREE.Mesh(
      new THREE.SphereGeometry(1, 24, 16),
      new THREE.MeshStandardMaterial({
        color: 0xff7a59,
        transparent: true,
        opacity: 0.45,
        depthWrite: false,
      }),
    );
    this.feedbackLine = new THREE.Line(
      new THREE.BufferGeometry().setFromPoints([new THREE.Vector3(), new THREE.Vector3()]),
      new THREE.LineBasicMaterial({ color: 0xffb020 }),
    );
    this.constrainedMarker.visible = false;
    this.proxyMarker.visible = false;
    this.feedbackLine.visible = false;
    this.scene.add(this.constrainedMarker, this.proxyMarker, this.feedbackLine, this.planeGroup);
  }

  resize(width: number, height: number): void {
    this.renderer.setSize(width, height, false);
    this.camera.aspect = width / height;
    this.camera.updateProjectionMatrix();
  }

  /** Swap in a freshly fetched catalog mesh and frame the camera on it. */
  setMesh(parsed: ParsedMesh, markerRadius: number): void {
    if (this.meshObject) {
      this.scene.remove(this.meshObject);
      this.meshObject.geometry.dispose();
    }
    const geom = new THREE.BufferGeometry();
    geom.setAttribute("position", new THREE.BufferAttribute(parsed.positions, 3));
    geom.computeVertexNormals();
    this.meshObject = new THREE.Mesh(
      geom,
      new THREE.MeshStandardMaterial({
        color: 0x8d97a5,
        roughness: 0.8,
        metalness: 0.05,
        flatShading: true,
      }),
    );
    this.scene.add(this.meshObject);

    this.markerRadius = markerRadius;
    this.constrainedMarker.scale.setScalar(markerRadius);
    this.proxyMarker.scale.setScalar(0.8 * markerRadius);

    const c = bboxCenter(parsed);
    const d = bboxDiagonal(parsed);
    this.camera.position.set(c[0] + 0.9 * d, c[1] + 0.6 * d, c[2] + 0.9 * d);
    this.camera.lookAt(c[0], c[1], c[2]);
    this.camera.far = 20 * d + 100;
    this.camera.updateProjectionMatrix();
  }

  /** Mirror the store into the scene. Cheap: a handful of objects. */
  update(state: ViewState): void {
    const has = state.constrained !== null && state.proxy !== null;
    this.constrainedMarker.visible = has;
    this.proxyMarker.visible = has;
    this.feedbackLine.visible = has && state.gaugeMagnitude > 1e-9;
    if (has) {
      const c = state.constrained!;
      const p = state.proxy!;
      this.constrainedMarker.position.set(c[0], c[1], c[2]);
      this.proxyMarker.position.set(p[0], p[1], p[2]);
      const pts = this.feedbackLine.geometry.getAttribute("position") as THREE.BufferAttribute;
      pts.setXYZ(0, c[0], c[1], c[2]);
      pts.setXYZ(1, p[0], p[1], p[2]);
      pts.needsUpdate = true;
    }
    this.syncPlanes(state.planes);
  }

  /** Rebuild overlays so they show exactly this tick's active set. */
  private syncPlanes(planes: PlaneSpec[]): void {
    while (this.planeGroup.children.length > planes.length) {
      const child = this.planeGroup.children.pop() as THREE.Mesh;
      child.geometry.dispose();
    }
    while (this.planeGroup.children.length < planes.length) {
      this.planeGroup.add(
        new THREE.Mesh(
          new THREE.PlaneGeometry(1, 1),
          new THREE.MeshBasicMaterial({
            color: 0x2dd4bf,
            transparent: true,
            opacity: 0.22,
            side: THREE.DoubleSide,
            depthWrite: false,
          }),
        ),
      );
    }
    const size = 6 * this.markerRadius;
    const normal = new THREE.Vector3();
    for (let i = 0; i < planes.length; i++) {
      const quad = this.planeGroup.children[i] as THREE.Mesh;
      const { n, p } = planes[i];
      quad.position.set(p[0], p[1], p[2]);
      normal.set(n[0], n[1], n[2]).normalize();
      quad.quaternion.setFromUnitVectors(new THREE.Vector3(0, 0, 1), normal);
      quad.scale.setScalar(size);
    }
  }

  render(): void {
    this.renderer.render(this.scene, this.camera);
  }
}
