/**
 * three.js scene construction: strands as extruded square tubes colored by
 * kind, boundary ports flagged, and the tight bounding box drawn as the
 * score box.  Pure geometry-in, scene-out; all interaction lives in main.ts.
 */

import * as THREE from "three";
import { Circuit, Segment, segments, tightExtents, occupiedPieces } from "./tqc";

export const COLORS = {
  primal: 0x2b6cb0,
  dual: 0xc53030,
  selected: 0xf6ad55,
  ghostValid: 0x48bb78,
  ghostInvalid: 0xe53e3e,
  scoreBox: 0x718096,
  port: 0x805ad5,
};

const TUBE = 0.36;

export interface StrandMeshes {
  group: THREE.Group;
  bySegment: Map<string, THREE.Mesh>;
}

function segmentKey(s: Segment): string {
  return `${s.strand}:${s.index}`;
}

export function segmentMesh(seg: Segment, color: number,
                            opacity = 1.0): THREE.Mesh {
  const len = Math.abs(seg.b[seg.axis] - seg.a[seg.axis]);
  const dims: [number, number, number] = [TUBE, TUBE, TUBE];
  dims[seg.axis] = len + TUBE;
  const geo = new THREE.BoxGeometry(...dims);
  const mat = new THREE.MeshLambertMaterial({
    color, transparent: opacity < 1.0, opacity,
  });
  const mesh = new THREE.Mesh(geo, mat);
  mesh.position.set(
    (seg.a[0] + seg.b[0]) / 2,
    (seg.a[1] + seg.b[1]) / 2,
    (seg.a[2] + seg.b[2]) / 2,
  );
  mesh.userData.segment = seg;
  return mesh;
}

export function buildStrands(c: Circuit): StrandMeshes {
  const group = new THREE.Group();
  const bySegment = new Map<string, THREE.Mesh>();
  for (const strand of c.strands) {
    const color = strand.kind === "primal" ? COLORS.primal : COLORS.dual;
    for (const seg of segments(strand)) {
      const mesh = segmentMesh(seg, color);
      bySegment.set(segmentKey(seg), mesh);
      group.add(mesh);
    }
  }
  for (const port of c.ports) {
    const flag = new THREE.Mesh(
      new THREE.SphereGeometry(0.45, 12, 12),
      new THREE.MeshLambertMaterial({ color: COLORS.port }));
    flag.position.set(...port.position);
    flag.userData.port = port;
    group.add(flag);
  }
  return { group, bySegment };
}

/** The tight bounding box of the occupied pieces: the score the player shrinks. */
export function buildScoreBox(c: Circuit): THREE.Object3D {
  const pts = occupiedPieces(c);
  if (pts.length === 0) return new THREE.Group();
  const mins = [0, 1, 2].map((ax) => Math.min(...pts.map((p) => p[ax])));
  const maxs = [0, 1, 2].map((ax) => Math.max(...pts.map((p) => p[ax])));
  const size = maxs.map((v, i) => Math.max(1, v - mins[i]));
  const geo = new THREE.BoxGeometry(size[0] + 1, size[1] + 1, size[2] + 1);
  const edges = new THREE.EdgesGeometry(geo);
  const box = new THREE.LineSegments(
    edges, new THREE.LineBasicMaterial({ color: COLORS.scoreBox }));
  box.position.set(
    mins[0] + size[0] / 2, mins[1] + size[1] / 2, mins[2] + size[2] / 2);
  return box;
}

export interface SceneHandle {
  scene: THREE.Scene;
  strands: StrandMeshes;
  scoreBox: THREE.Object3D;
  ghost: THREE.Group;
}

export function buildScene(c: Circuit): SceneHandle {
  const scene = new THREE.Scene();
  scene.background = new THREE.Color(0x10141c);
  const ambient = new THREE.AmbientLight(0xffffff, 0.55);
  const key = new THREE.DirectionalLight(0xffffff, 0.9);
  key.position.set(18, 30, 24);
  scene.add(ambient, key);
  const strands = buildStrands(c);
  const scoreBox = buildScoreBox(c);
  const ghost = new THREE.Group();
  scene.add(strands.group, scoreBox, ghost);
  return { scene, strands, scoreBox, ghost };
}

export function highlightSegment(handle: SceneHandle, strand: string,
                                 index: number, on: boolean): void {
  const mesh = handle.strands.bySegment.get(`${strand}:${index}`);
  if (!mesh) return;
  const mat = mesh.material as THREE.MeshLambertMaterial;
  if (on) {
    mesh.userData.baseColor ??= mat.color.getHex();
    mat.color.setHex(COLORS.selected);
  } else if (mesh.userData.baseColor !== undefined) {
    mat.color.setHex(mesh.userData.baseColor);
    delete mesh.userData.baseColor;
  }
}

/** Ghost-render a slide candidate at its destination, colored by verdict. */
export function showSlideGhost(handle: SceneHandle, seg: Segment,
                               direction: [number, number, number],
                               distance: number, valid: boolean): void {
  clearGhost(handle);
  const moved: Segment = {
    ...seg,
    a: seg.a.map((v, i) => v + direction[i] * distance) as Segment["a"],
    b: seg.b.map((v, i) => v + direction[i] * distance) as Segment["b"],
  };
  const color = valid ? COLORS.ghostValid : COLORS.ghostInvalid;
  handle.ghost.add(segmentMesh(moved, color, 0.5));
}

export function clearGhost(handle: SceneHandle): void {
  handle.ghost.clear();
}
