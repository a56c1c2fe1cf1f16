/**
 * Parsing and display-side bookkeeping for .tqc geometry files.
 *
 * Everything here is for rendering and gesture mapping only; the server's
 * validation and volume numbers are always authoritative.
 */

export type Vec3 = [number, number, number];

export interface Port {
  name: string;
  position: Vec3;
  face: "input" | "output";
}

export interface Strand {
  id: string;
  kind: "primal" | "dual";
  closure: "closed" | "open";
  ports: string[];
  meta: Record<string, string>;
  path: Vec3[];
}

export interface Circuit {
  version: number;
  bounds: Vec3;
  ports: Port[];
  strands: Strand[];
}

export class TqcError extends Error {}

export function parseTqc(text: string): Circuit {
  let obj: any;
  try {
    obj = JSON.parse(text);
  } catch (e) {
    throw new TqcError(`not a .tqc document: ${e}`);
  }
  if (obj.version !== 1) throw new TqcError(`unsupported version ${obj.version}`);
  if (!Array.isArray(obj.bounds) || obj.bounds.length !== 3) {
    throw new TqcError("missing bounds");
  }
  const circuit: Circuit = {
    version: 1,
    bounds: obj.bounds.map(Number) as Vec3,
    ports: (obj.ports ?? []).map((p: any) => ({
      name: String(p.name),
      position: p.position.map(Number) as Vec3,
      face: p.face,
    })),
    strands: (obj.strands ?? []).map((s: any) => ({
      id: String(s.id),
      kind: s.kind,
      closure: s.closure,
      ports: (s.ports ?? []).map(String),
      meta: Object.fromEntries(
        Object.entries(s.meta ?? {}).map(([k, v]) => [k, String(v)])),
      path: s.path.map((p: any) => p.map(Number) as Vec3),
    })),
  };
  for (const s of circuit.strands) {
    if (s.path.length === 0) throw new TqcError(`strand ${s.id} has no path`);
  }
  return circuit;
}

export interface Segment {
  strand: string;
  index: number;
  a: Vec3;
  b: Vec3;
  axis: 0 | 1 | 2;
}

/** Ordered segments of a strand, wrap-around included for closed strands. */
export function segments(s: Strand): Segment[] {
  const out: Segment[] = [];
  const n = s.path.length;
  const last = s.closure === "closed" ? n : n - 1;
  for (let i = 0; i < last; i++) {
    const a = s.path[i];
    const b = s.path[(i + 1) % n];
    const axis = segmentAxis(a, b);
    if (axis === null) throw new TqcError(`strand ${s.id} segment ${i} not axis-aligned`);
    out.push({ strand: s.id, index: i, a, b, axis });
  }
  return out;
}

export function segmentAxis(a: Vec3, b: Vec3): 0 | 1 | 2 | null {
  const diff = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
  const nz = diff.map((v, i) => [v, i]).filter(([v]) => v !== 0);
  if (nz.length !== 1) return null;
  return nz[0][1] as 0 | 1 | 2;
}

/** Display-only tight extents (the "score box"); clamped to >= 1 per axis. */
export function tightExtents(c: Circuit): Vec3 {
  const pts = occupiedPieces(c);
  if (pts.length === 0) return [0, 0, 0];
  const ext: Vec3 = [0, 0, 0];
  for (let ax = 0; ax < 3; ax++) {
    const vals = pts.map((p) => p[ax]);
    ext[ax] = Math.max(1, Math.max(...vals) - Math.min(...vals));
  }
  return ext;
}

export function displayVolume(c: Circuit): number {
  const [x, y, z] = tightExtents(c);
  return x * y * z;
}

export function occupiedPieces(c: Circuit): Vec3[] {
  const seen = new Set<string>();
  const out: Vec3[] = [];
  for (const s of c.strands) {
    for (const seg of segments(s)) {
      const step = Math.sign(seg.b[seg.axis] - seg.a[seg.axis]);
      const cur: Vec3 = [...seg.a];
      for (;;) {
        const key = cur.join(",");
        if (!seen.has(key)) {
          seen.add(key);
          out.push([...cur]);
        }
        if (cur[seg.axis] === seg.b[seg.axis]) break;
        cur[seg.axis] += step;
      }
    }
  }
  return out;
}
