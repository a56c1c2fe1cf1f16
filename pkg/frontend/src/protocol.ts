/**
 * Typed client for the puzzle session protocol: newline-delimited JSON
 * request/response messages, version field "v": 1.
 *
 * The transport is pluggable: tests and tooling use a TCP socket under
 * node; the browser build plugs in a WebSocket bridge with the same
 * line-in/line-out contract.
 */

import type { Move } from "./moves";

export const PROTOCOL_VERSION = 1;

export interface Transport {
  /** Send one request line, resolve with one response line. */
  roundTrip(line: string): Promise<string>;
  close(): void;
}

export interface PuzzleSummary {
  id: string;
  title: string;
  created_at: number;
  best_known_volume: number;
  base_volume: number;
}

export interface TreeNode {
  parent: string | null;
  move: Record<string, unknown> | null;
  volume: number;
  author: string;
}

export interface Tree {
  root: string;
  nodes: Record<string, TreeNode>;
}

export interface Verdict {
  valid: boolean;
  reason: string;
}

export interface LeaderboardEntry {
  puzzle: string;
  volume: number;
  author: string;
  node: string;
}

export class ServiceUnreachable extends Error {}

export class ProtocolError extends Error {
  constructor(public code: string, reason: string) {
    super(`${code}: ${reason}`);
  }
}

export class ProtocolClient {
  constructor(private transport: Transport) {}

  private async call(req: Record<string, unknown>): Promise<any> {
    let raw: string;
    try {
      raw = await this.transport.roundTrip(
        JSON.stringify({ v: PROTOCOL_VERSION, ...req }));
    } catch (e) {
      throw new ServiceUnreachable(String(e));
    }
    const resp = JSON.parse(raw);
    if (!resp.ok) {
      throw new ProtocolError(resp.error?.code ?? "unknown",
        resp.error?.reason ?? "no reason given");
    }
    return resp;
  }

  async listPuzzles(): Promise<PuzzleSummary[]> {
    return (await this.call({ op: "list_puzzles" })).puzzles;
  }

  async addPuzzle(id: string, title: string, tqc: string): Promise<{ root: string; volume: number }> {
    return await this.call({ op: "add_puzzle", id, title, tqc });
  }

  async getPuzzle(puzzle: string): Promise<{ id: string; title: string; tqc: string; root: string }> {
    return await this.call({ op: "get_puzzle", puzzle });
  }

  async getNode(puzzle: string, node: string): Promise<{ node: string; volume: number; tqc: string }> {
    return await this.call({ op: "get_node", puzzle, node });
  }

  async getTree(puzzle: string): Promise<Tree> {
    const resp = await this.call({ op: "get_tree", puzzle });
    return { root: resp.root, nodes: resp.nodes };
  }

  async checkMove(puzzle: string, node: string, move: Move): Promise<Verdict> {
    const resp = await this.call({ op: "check_move", puzzle, node, move });
    return { valid: resp.valid, reason: resp.reason };
  }

  async submitMove(puzzle: string, node: string, move: Move, author: string):
      Promise<{ node: string; parent: string; volume: number }> {
    return await this.call({ op: "submit_move", puzzle, node, move, author });
  }

  async leaderboard(): Promise<LeaderboardEntry[]> {
    return (await this.call({ op: "leaderboard" })).entries;
  }

  async exportNode(puzzle: string, node: string, format: "tqc" | "moves"):
      Promise<string> {
    return (await this.call({ op: "export_node", puzzle, node, format })).data;
  }

  close(): void {
    this.transport.close();
  }
}

/** TCP transport for node environments (tests, tooling). */
export class TcpTransport implements Transport {
  private sock: import("net").Socket;
  private buffer = "";
  private waiters: Array<(line: string) => void> = [];
  private failed: Error | null = null;
  private ready: Promise<void>;

  constructor(host: string, port: number) {
    const net = require("net") as typeof import("net");
    this.sock = net.createConnection({ host, port });
    this.ready = new Promise((resolve, reject) => {
      this.sock.once("connect", () => resolve());
      this.sock.once("error", (e) => reject(e));
    });
    this.sock.on("data", (chunk) => {
      this.buffer += chunk.toString("utf-8");
      for (;;) {
        const nl = this.buffer.indexOf("\n");
        if (nl < 0) break;
        const line = this.buffer.slice(0, nl);
        this.buffer = this.buffer.slice(nl + 1);
        this.waiters.shift()?.(line);
      }
    });
    this.sock.on("error", (e) => {
      this.failed = e as Error;
      this.waiters.splice(0).forEach((w) => w(""));
    });
  }

  async roundTrip(line: string): Promise<string> {
    await this.ready;
    if (this.failed) throw this.failed;
    return new Promise<string>((resolve, reject) => {
      this.waiters.push((resp) => {
        if (this.failed || resp === "") reject(this.failed ?? new Error("closed"));
        else resolve(resp);
      });
      this.sock.write(line + "\n");
    });
  }

  close(): void {
    this.sock.end();
    this.sock.destroy();
  }
}

/** Browser transport over a WebSocket that bridges lines to the TCP service. */
export class WebSocketTransport implements Transport {
  private queue: Array<(line: string) => void> = [];
  private ready: Promise<void>;

  constructor(private ws: WebSocket) {
    this.ready = new Promise((resolve, reject) => {
      ws.addEventListener("open", () => resolve());
      ws.addEventListener("error", () => reject(new Error("websocket error")));
    });
    ws.addEventListener("message", (ev) => {
      for (const line of String(ev.data).split("\n")) {
        if (line.trim()) this.queue.shift()?.(line);
      }
    });
  }

  async roundTrip(line: string): Promise<string> {
    await this.ready;
    return new Promise((resolve) => {
      this.queue.push(resolve);
      this.ws.send(line + "\n");
    });
  }

  close(): void {
    this.ws.close();
  }
}
