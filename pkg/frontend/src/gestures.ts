/**
 * Mapping player gestures onto move objects.
 *
 * A drag on a selected segment becomes a slide along the dominant
 * perpendicular axis of the drag vector; selecting two segments and
 * invoking "bridge" pairs them; the delete command targets a whole closed
 * strand.  The result is only ever a *candidate*: every verdict comes from
 * the server's check endpoint.
 */

import type { Move, Vec3 } from "./moves";
import { Circuit, Segment, segments } from "./tqc";

export interface Selection {
  strand: string;
  segment: number;
}

export type Gesture =
  | { kind: "drag"; vector: Vec3 }
  | { kind: "bridge"; other: Selection }
  | { kind: "delete" };

export class GestureError extends Error {}

function findSegment(c: Circuit, sel: Selection): Segment {
  const strand = c.strands.find((s) => s.id === sel.strand);
  if (!strand) throw new GestureError(`no strand ${sel.strand}`);
  const segs = segments(strand);
  if (sel.segment < 0 || sel.segment >= segs.length) {
    throw new GestureError(`strand ${sel.strand} has no segment ${sel.segment}`);
  }
  return segs[sel.segment];
}

/**
 * Interpret a gesture against the current geometry.  Drags snap to the
 * dominant axis of the drag vector among the two axes perpendicular to the
 * selected segment; the distance is the rounded magnitude along it
 * (minimum 1).
 */
export function gestureToMove(c: Circuit, sel: Selection, g: Gesture): Move {
  if (g.kind === "delete") {
    const strand = c.strands.find((s) => s.id === sel.strand);
    if (!strand) throw new GestureError(`no strand ${sel.strand}`);
    return { kind: "delete", strand: sel.strand };
  }
  if (g.kind === "bridge") {
    if (g.other.strand !== sel.strand) {
      throw new GestureError("bridge needs two segments of the same strand");
    }
    findSegment(c, sel);
    findSegment(c, g.other);
    const [a, b] = [sel.segment, g.other.segment].sort((x, y) => x - y);
    if (a === b) throw new GestureError("bridge needs two distinct segments");
    return { kind: "bridge", strand: sel.strand, seg_a: a, seg_b: b };
  }
  const seg = findSegment(c, sel);
  const perp = ([0, 1, 2] as const).filter((ax) => ax !== seg.axis);
  let bestAxis = perp[0];
  if (Math.abs(g.vector[perp[1]]) > Math.abs(g.vector[perp[0]])) {
    bestAxis = perp[1];
  }
  const amount = g.vector[bestAxis];
  if (amount === 0) throw new GestureError("drag has no perpendicular component");
  const direction: Vec3 = [0, 0, 0];
  direction[bestAxis] = amount > 0 ? 1 : -1;
  const distance = Math.max(1, Math.round(Math.abs(amount)));
  return { kind: "slide", strand: sel.strand, segment: sel.segment, direction, distance };
}
