/**
 * Browser entry: wires the protocol client, view state, and the three.js
 * scene into a playable puzzle view.
 *
 * The page expects a WebSocket bridge to the TCP service (same
 * line-delimited JSON on both sides), e.g. ws://localhost:8080 forwarding
 * to the braidweaver service port.  Pass ?ws=... to override.
 */

import * as THREE from "three";
import { OrbitControls } from "three/examples/jsm/controls/OrbitControls.js";
import { ProtocolClient, WebSocketTransport } from "./protocol";
import { ViewState } from "./viewstate";
import { Segment } from "./tqc";
import {
  SceneHandle,
  buildScene,
  clearGhost,
  highlightSegment,
  showSlideGhost,
} from "./render";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const wsUrl = params.get("ws") ?? "ws://127.0.0.1:8080";
  const author = params.get("author") ?? "player";

  const client = new ProtocolClient(new WebSocketTransport(new WebSocket(wsUrl)));
  const view = new ViewState(client, author);

  const canvas = el<HTMLCanvasElement>("scene");
  const renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
  const camera = new THREE.PerspectiveCamera(50, 1, 0.1, 500);
  const controls = new OrbitControls(camera, canvas);
  const raycaster = new THREE.Raycaster();
  let handle: SceneHandle | null = null;
  let dragStart: { x: number; y: number; seg: Segment } | null = null;

  function resize(): void {
    const w = canvas.clientWidth || canvas.parentElement!.clientWidth;
    const h = canvas.clientHeight || 560;
    renderer.setSize(w, h, false);
    camera.aspect = w / h;
    camera.updateProjectionMatrix();
  }
  window.addEventListener("resize", resize);

  function rebuildScene(): void {
    if (!view.circuit) return;
    handle = buildScene(view.circuit);
    const [bx, by, bz] = view.circuit.bounds;
    camera.position.set(bx + 8, by + 6, bz + 10);
    controls.target.set(bx / 2, by / 2, bz / 2);
    controls.update();
    refreshHud();
  }

  function refreshHud(): void {
    el("volume").textContent = String(view.volume);
    el("best").textContent = String(view.bestKnown);
    el("node").textContent = view.currentNode;
    el("banner").textContent = view.banner;
    el("banner").style.display = view.banner ? "block" : "none";
    const tree = el("tree");
    tree.innerHTML = "";
    for (const [id, node] of Object.entries(view.tree.nodes)) {
      const row = document.createElement("div");
      row.textContent = `${id} v=${node.volume} ${node.author || ""}` +
        (id === view.currentNode ? "  <- here" : "");
      row.className = "tree-node";
      row.onclick = () => void view.gotoNode(id).then(rebuildScene);
      tree.appendChild(row);
    }
  }

  function pickSegment(ev: PointerEvent): Segment | null {
    if (!handle) return null;
    const rect = canvas.getBoundingClientRect();
    const ndc = new THREE.Vector2(
      ((ev.clientX - rect.left) / rect.width) * 2 - 1,
      -((ev.clientY - rect.top) / rect.height) * 2 + 1);
    raycaster.setFromCamera(ndc, camera);
    const hits = raycaster.intersectObjects([...handle.strands.bySegment.values()]);
    return hits.length ? (hits[0].object.userData.segment as Segment) : null;
  }

  canvas.addEventListener("pointerdown", (ev) => {
    const seg = pickSegment(ev);
    if (!seg || !handle) return;
    controls.enabled = false;
    if (view.selection) {
      highlightSegment(handle, view.selection.strand, view.selection.segment, false);
    }
    view.select({ strand: seg.strand, segment: seg.index });
    highlightSegment(handle, seg.strand, seg.index, true);
    dragStart = { x: ev.clientX, y: ev.clientY, seg };
    refreshHud();
  });

  canvas.addEventListener("pointerup", (ev) => {
    controls.enabled = true;
    if (!dragStart || !handle) return;
    const { x, y, seg } = dragStart;
    dragStart = null;
    const dx = (ev.clientX - x) / 40;
    const dy = (y - ev.clientY) / 40;
    if (Math.abs(dx) < 0.5 && Math.abs(dy) < 0.5) return;
    // project the screen drag onto world axes through the camera frame
    const right = new THREE.Vector3();
    camera.getWorldDirection(right);
    const up = camera.up.clone();
    right.cross(up).normalize();
    const world = right.multiplyScalar(dx).addScaledVector(up, dy);
    const vector: [number, number, number] = [
      Math.round(world.x), Math.round(world.y), Math.round(world.z)];
    if (vector.every((v) => v === 0)) return;
    void view.previewMove({ kind: "drag", vector })
      .then((preview) => {
        if (preview.move.kind === "slide") {
          showSlideGhost(handle!, seg, preview.move.direction,
            preview.move.distance, preview.valid);
        }
        el("verdict").textContent = preview.valid
          ? "valid — press Enter to commit"
          : `invalid: ${preview.reason}`;
      })
      .catch((e) => {
        el("verdict").textContent = String(e);
        refreshHud();
      });
  });

  window.addEventListener("keydown", (ev) => {
    if (!handle) return;
    if (ev.key === "Enter" && view.pending?.valid) {
      void view.commitAndBranch().then(rebuildScene)
        .catch((e) => { el("verdict").textContent = String(e); });
    } else if (ev.key === "Backspace") {
      void view.undo().then(rebuildScene);
    } else if (ev.key === "x" && view.selection) {
      void view.previewMove({ kind: "delete" }).then((p) => {
        el("verdict").textContent = p.valid ? "delete ok — Enter commits"
          : `invalid: ${p.reason}`;
      });
    } else if (ev.key === "Escape") {
      view.select(null);
      clearGhost(handle);
      el("verdict").textContent = "";
    }
  });

  const puzzles = await client.listPuzzles();
  if (puzzles.length === 0) {
    el("banner").textContent = "no puzzles on the server";
    el("banner").style.display = "block";
    return;
  }
  await view.loadPuzzle(params.get("puzzle") ?? puzzles[0].id);
  resize();
  rebuildScene();

  renderer.setAnimationLoop(() => {
    controls.update();
    if (handle) renderer.render(handle.scene, camera);
  });
}

void boot();
