import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { ProtocolClient, ProtocolError, TcpTransport } from "../src/protocol";
import { parseTqc } from "../src/tqc";
import { LiveServer, demoPuzzleTqc, startServer } from "./server";

let server: LiveServer;
let client: ProtocolClient;

beforeAll(async () => {
  server = await startServer();
  client = new ProtocolClient(new TcpTransport("127.0.0.1", server.port));
  await client.addPuzzle("demo", "Demo", demoPuzzleTqc());
});

afterAll(() => {
  client?.close();
  server?.stop();
});

describe("protocol client against the live service", () => {
  it("lists and fetches puzzles", async () => {
    const puzzles = await client.listPuzzles();
    expect(puzzles.map((p) => p.id)).toContain("demo");
    const info = await client.getPuzzle("demo");
    expect(info.root).toBe("n0");
    expect(parseTqc(info.tqc).strands.length).toBe(3);
  });

  it("checks, submits, and reads back the tree", async () => {
    const slide = {
      kind: "slide" as const, strand: "q0", segment: 1,
      direction: [-1, 0, 0] as [number, number, number], distance: 1,
    };
    const verdict = await client.checkMove("demo", "n0", slide);
    expect(verdict.valid).toBe(true);
    const bad = await client.checkMove("demo", "n0",
      { kind: "delete", strand: "cnot0" });
    expect(bad.valid).toBe(false);
    expect(bad.reason).toMatch(/linking/);

    const child = await client.submitMove("demo", "n0", slide, "tester");
    expect(child.parent).toBe("n0");
    const tree = await client.getTree("demo");
    expect(tree.nodes[child.node].parent).toBe("n0");
    const node = await client.getNode("demo", child.node);
    expect(node.volume).toBe(child.volume);
    expect(parseTqc(node.tqc)).toBeTruthy();
  });

  it("surfaces server rejections as protocol errors", async () => {
    await expect(client.submitMove("demo", "n0",
      { kind: "delete", strand: "cnot0" }, "t"))
      .rejects.toBeInstanceOf(ProtocolError);
    await expect(client.getPuzzle("missing"))
      .rejects.toMatchObject({ code: "not-found" });
  });

  it("exports both formats", async () => {
    const tqc = await client.exportNode("demo", "n0", "tqc");
    expect(parseTqc(tqc)).toBeTruthy();
    const moves = await client.exportNode("demo", "n0", "moves");
    expect(moves.startsWith("base ")).toBe(true);
  });
});
