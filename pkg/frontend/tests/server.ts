/** Spawns the real session service for protocol-level tests. */

import { spawn, execFileSync, ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { createInterface } from "node:readline";

export interface LiveServer {
  port: number;
  dataDir: string;
  proc: ChildProcess;
  stop(): void;
}

export async function startServer(): Promise<LiveServer> {
  const dataDir = mkdtempSync(join(tmpdir(), "bw-ui-"));
  const proc = spawn("python3", ["-m", "braidweaver", "serve",
    "--port", "0", "--data-dir", dataDir], {
    stdio: ["ignore", "pipe", "inherit"],
  });
  const rl = createInterface({ input: proc.stdout! });
  const port = await new Promise<number>((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("server did not start")), 20000);
    rl.once("line", (line) => {
      clearTimeout(timer);
      const m = /serving on [^:]+:(\d+)/.exec(line);
      if (!m) reject(new Error(`unexpected banner: ${line}`));
      else resolve(Number(m[1]));
    });
  });
  return {
    port,
    dataDir,
    proc,
    stop() {
      proc.kill("SIGKILL");
    },
  };
}

/** Canonical demo circuit compiled by the CLI, with padded bounds for play. */
export function demoPuzzleTqc(): string {
  const dir = mkdtempSync(join(tmpdir(), "bw-icm-"));
  const icm = join(dir, "demo.icm");
  writeFileSync(icm, [
    "qubits 2", "init 0 Z0", "init 1 X+", "cnot 0 1",
    "measure 0 Z", "measure 1 X", "",
  ].join("\n"));
  const tqc = join(dir, "demo.tqc");
  execFileSync("python3", ["-m", "braidweaver", "compile", icm, "-o", tqc]);
  const doc = JSON.parse(readFileSync(tqc, "utf-8"));
  doc.bounds = [doc.bounds[0], doc.bounds[1] + 3, doc.bounds[2] + 3];
  return JSON.stringify(doc, null, 1) + "\n";
}

export function cliReplay(baseTqc: string, movesText: string): string {
  const dir = mkdtempSync(join(tmpdir(), "bw-replay-"));
  const base = join(dir, "base.tqc");
  const log = join(dir, "run.moves");
  const out = join(dir, "final.tqc");
  writeFileSync(base, baseTqc);
  writeFileSync(log, movesText);
  execFileSync("python3", ["-m", "braidweaver", "replay", base, log, "-o", out]);
  return readFileSync(out, "utf-8");
}
