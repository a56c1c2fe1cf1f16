/**
 * The client's single source of view truth.
 *
 * Hard rules: the volume readout is always the server-validated volume of
 * the current node; a committed state is only rendered after the server
 * acknowledged it; undo is pure navigation (no server mutation); every
 * verdict comes from the server's check endpoint.
 */

import type { Move } from "./moves";
import { ProtocolClient, ServiceUnreachable, ProtocolError, Tree } from "./protocol";
import { Circuit, parseTqc } from "./tqc";
import { Gesture, Selection, gestureToMove, GestureError } from "./gestures";

export interface Preview {
  move: Move;
  valid: boolean;
  reason: string;
}

export interface CameraPose {
  position: [number, number, number];
  target: [number, number, number];
}

export class ViewState {
  puzzleId = "";
  currentNode = "";
  circuit: Circuit | null = null;
  camera: CameraPose = { position: [12, 10, 16], target: [0, 0, 0] };
  selection: Selection | null = null;
  pending: Preview | null = null;
  volume = 0;            // server-validated volume of the current node
  bestKnown = 0;         // leaderboard minimum for this puzzle
  tree: Tree = { root: "", nodes: {} };
  banner = "";           // nonempty => preview disabled (server unreachable)
  author: string;

  constructor(private client: ProtocolClient, author = "anon") {
    this.author = author;
  }

  get previewEnabled(): boolean {
    return this.banner === "";
  }

  async loadPuzzle(puzzleId: string): Promise<void> {
    const info = await this.client.getPuzzle(puzzleId);
    this.puzzleId = puzzleId;
    await this.gotoNode(info.root);
    await this.refreshTree();
  }

  async gotoNode(nodeId: string): Promise<void> {
    const node = await this.client.getNode(this.puzzleId, nodeId);
    // render-state advances only with server-supplied bytes and volume
    this.circuit = parseTqc(node.tqc);
    this.volume = node.volume;
    this.currentNode = nodeId;
    this.selection = null;
    this.pending = null;
  }

  select(sel: Selection | null): void {
    this.selection = sel;
    this.pending = null;
  }

  /** Build the candidate move for a gesture and fetch the server's verdict. */
  async previewMove(gesture: Gesture): Promise<Preview> {
    if (!this.selection || !this.circuit) {
      throw new GestureError("nothing selected");
    }
    const move = gestureToMove(this.circuit, this.selection, gesture);
    if (!this.previewEnabled) {
      throw new ServiceUnreachable(this.banner);
    }
    try {
      const verdict = await this.client.checkMove(
        this.puzzleId, this.currentNode, move);
      this.pending = { move, valid: verdict.valid, reason: verdict.reason };
      return this.pending;
    } catch (e) {
      if (e instanceof ServiceUnreachable) {
        this.banner = "server unreachable; previews disabled";
        this.pending = null;
      }
      throw e;
    }
  }

  /**
   * Submit the pending move.  The current node advances only after the
   * server acknowledges the child; a rejection leaves the view untouched.
   */
  async commitAndBranch(): Promise<string> {
    if (!this.pending || !this.pending.valid) {
      throw new GestureError("no valid pending move to commit");
    }
    const move = this.pending.move;
    let resp;
    try {
      resp = await this.client.submitMove(
        this.puzzleId, this.currentNode, move, this.author);
    } catch (e) {
      if (e instanceof ProtocolError) {
        this.pending = { move, valid: false, reason: e.message };
      }
      throw e;
    }
    await this.gotoNode(resp.node);
    await this.refreshTree();
    return resp.node;
  }

  /** Undo: navigate to the parent node; nothing is sent to the server. */
  async undo(): Promise<void> {
    const node = this.tree.nodes[this.currentNode];
    if (!node || node.parent === null) return;
    await this.gotoNode(node.parent);
  }

  async refreshTree(): Promise<void> {
    this.tree = await this.client.getTree(this.puzzleId);
    const volumes = Object.values(this.tree.nodes).map((n) => n.volume);
    this.bestKnown = Math.min(...volumes);
  }

  /** Children of the current node, for the tree sidebar. */
  children(nodeId?: string): string[] {
    const target = nodeId ?? this.currentNode;
    return Object.entries(this.tree.nodes)
      .filter(([, n]) => n.parent === target)
      .map(([id]) => id)
      .sort((a, b) => Number(a.slice(1)) - Number(b.slice(1)));
  }

  async downloadMoves(nodeId?: string): Promise<string> {
    return this.client.exportNode(this.puzzleId, nodeId ?? this.currentNode, "moves");
  }
}
