/** Move objects as the service protocol encodes them, plus .moves text. */

export type Vec3 = [number, number, number];

export type Move =
  | { kind: "slide"; strand: string; segment: number; direction: Vec3; distance: number }
  | { kind: "bridge"; strand: string; seg_a: number; seg_b: number }
  | { kind: "delete"; strand: string };

export function moveToLine(m: Move): string {
  switch (m.kind) {
    case "slide":
      return `slide ${m.strand} ${m.segment} ${m.direction[0]} ${m.direction[1]} ${m.direction[2]} ${m.distance}`;
    case "bridge":
      return `bridge ${m.strand} ${m.seg_a} ${m.seg_b}`;
    case "delete":
      return `delete ${m.strand}`;
  }
}

export interface MoveLog {
  base: string;
  moves: Move[];
}

export function parseMovesText(text: string): MoveLog {
  const lines = text.split("\n").map((l) => l.trim()).filter(Boolean);
  if (lines.length === 0 || !lines[0].startsWith("base ")) {
    throw new Error("move log must start with 'base <digest>'");
  }
  const base = lines[0].split(/\s+/)[1];
  const moves: Move[] = [];
  for (const raw of lines.slice(1)) {
    const body = raw.split("#", 1)[0].trim();
    if (!body) continue;
    const t = body.split(/\s+/);
    if (t[0] === "slide" && t.length === 7) {
      moves.push({
        kind: "slide", strand: t[1], segment: Number(t[2]),
        direction: [Number(t[3]), Number(t[4]), Number(t[5])], distance: Number(t[6]),
      });
    } else if (t[0] === "bridge" && t.length === 4) {
      moves.push({ kind: "bridge", strand: t[1], seg_a: Number(t[2]), seg_b: Number(t[3]) });
    } else if (t[0] === "delete" && t.length === 2) {
      moves.push({ kind: "delete", strand: t[1] });
    } else {
      throw new Error(`bad move line: ${raw}`);
    }
  }
  return { base, moves };
}
