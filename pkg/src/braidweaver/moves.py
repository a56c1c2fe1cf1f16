"""Deformation moves: slides, bridges, and null-loop deletion.

A slide translates one segment perpendicular to itself; it is valid when the
closed swept rectangle touches nothing but the moved segment and its two
connector segments, stays in bounds, and the rewritten strand still
validates.  A bridge reconnects two exactly-facing antiparallel segments of
one strand at perpendicular distance 1 (the gap between the walls contains
no lattice points, so the surgery rectangle is automatically clear),
splitting the strand; the half with no ports and an all-zero linking row is
deleted on the spot.  Deletion removes a closed, port-free, nowhere-linked
loop outright.

All moves preserve the topological signature; ports never move.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .geometry import (
    DefectStrand,
    LatticePoint,
    TopoCircuit,
    ValidityReport,
    normalize_path,
    segment_axis,
    segment_points,
    tqc_digest,
    validate_geometry,
)
from .topology import linking_rows_for

DIRECTION_ORDER = ((-1, 0, 0), (1, 0, 0), (0, -1, 0), (0, 1, 0), (0, 0, -1), (0, 0, 1))
_DIR_NAMES = {d: n for d, n in zip(DIRECTION_ORDER, ("-x", "+x", "-y", "+y", "-z", "+z"))}


class MoveError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class Move:
    kind: str  # "slide" | "bridge" | "delete"
    strand: str
    segment: int = 0
    direction: tuple[int, int, int] = (0, 0, 0)
    distance: int = 0
    seg_a: int = 0
    seg_b: int = 0

    @staticmethod
    def slide(strand: str, segment: int, direction: tuple[int, int, int],
              distance: int) -> "Move":
        return Move("slide", strand, segment=segment,
                    direction=tuple(direction), distance=distance)

    @staticmethod
    def bridge(strand: str, seg_a: int, seg_b: int) -> "Move":
        a, b = sorted((seg_a, seg_b))
        return Move("bridge", strand, seg_a=a, seg_b=b)

    @staticmethod
    def delete(strand: str) -> "Move":
        return Move("delete", strand)

    def to_line(self) -> str:
        if self.kind == "slide":
            d = self.direction
            return f"slide {self.strand} {self.segment} {d[0]} {d[1]} {d[2]} {self.distance}"
        if self.kind == "bridge":
            return f"bridge {self.strand} {self.seg_a} {self.seg_b}"
        return f"delete {self.strand}"

    @staticmethod
    def from_line(line: str) -> "Move":
        toks = line.split()
        if not toks:
            raise MoveError("format", "empty move line")
        op = toks[0]
        try:
            if op == "slide" and len(toks) == 7:
                return Move.slide(toks[1], int(toks[2]),
                                  (int(toks[3]), int(toks[4]), int(toks[5])), int(toks[6]))
            if op == "bridge" and len(toks) == 4:
                return Move.bridge(toks[1], int(toks[2]), int(toks[3]))
            if op == "delete" and len(toks) == 2:
                return Move.delete(toks[1])
        except ValueError:
            pass
        raise MoveError("format", f"bad move line: {line!r}")


@dataclass(frozen=True)
class MoveLog:
    base_circuit_hash: str
    moves: tuple[Move, ...] = ()
    annotations: tuple[tuple[int, str], ...] = ()

    def to_text(self) -> str:
        notes = dict(self.annotations)
        lines = [f"base {self.base_circuit_hash}"]
        for i, m in enumerate(self.moves):
            suffix = f"  # {notes[i]}" if i in notes else ""
            lines.append(m.to_line() + suffix)
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "MoveLog":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("base "):
            raise MoveError("format", "move log must start with 'base <digest>'")
        base = lines[0].split()[1]
        moves: list[Move] = []
        notes: list[tuple[int, str]] = []
        for ln in lines[1:]:
            body, _, comment = ln.partition("#")
            if not body.strip():
                continue
            if comment.strip():
                notes.append((len(moves), comment.strip()))
            moves.append(Move.from_line(body.strip()))
        return MoveLog(base, tuple(moves), tuple(notes))


# --- slides -------------------------------------------------------------------

def _strand_segments(s: DefectStrand) -> list[tuple[LatticePoint, LatticePoint]]:
    return s.segments()


def _sweep_points(a: LatticePoint, b: LatticePoint, d: tuple[int, int, int],
                  dist: int) -> set[LatticePoint]:
    pts = set()
    for j in range(dist + 1):
        off = (d[0] * j, d[1] * j, d[2] * j)
        for p in segment_points(a, b):
            pts.add(p + off)
    return pts


def _slid_path(s: DefectStrand, seg: int, d: tuple[int, int, int],
               dist: int) -> tuple[LatticePoint, ...]:
    """Rewritten vertex list after sliding segment ``seg`` by dist*d."""
    segs = _strand_segments(s)
    a, b = segs[seg]
    off = (d[0] * dist, d[1] * dist, d[2] * dist)
    a2, b2 = a + off, b + off
    n = len(s.path)
    dir_axis = (0, 1, 2)[[abs(v) for v in d].index(1)]

    # indices of the moved segment's endpoints in the vertex list
    ia = seg
    ib = (seg + 1) % n

    prev_i = (ia - 1) % n
    next_i = (ib + 1) % n
    prev_along = segment_axis(s.path[prev_i], a) == dir_axis if (s.is_closed or seg > 0) else False
    next_along = (segment_axis(b, s.path[next_i]) == dir_axis
                  if (s.is_closed or seg < n - 2) else False)

    out: list[LatticePoint] = []
    for i in range(n):
        v = s.path[i]
        if i == ia:
            out.extend([a2] if prev_along else [a, a2])
        elif i == ib:
            out.extend([b2] if next_along else [b2, b])
        else:
            out.append(v)
    return normalize_path(out, closed=s.is_closed)


def check_slide(c: TopoCircuit, strand_id: str, seg: int,
                direction: tuple[int, int, int], dist: int) -> ValidityReport:
    """Valid iff the swept rectangle is clear, bounds hold, and the rewritten
    circuit still validates; every failure names its blocker."""
    rep = ValidityReport()
    if not c.has_strand(strand_id):
        rep.add("no-such-strand", f"strand {strand_id} not in circuit")
        return rep
    s = c.strand(strand_id)
    segs = _strand_segments(s)
    if not 0 <= seg < len(segs):
        rep.add("bad-segment", f"strand {strand_id} has no segment {seg}")
        return rep
    d = tuple(direction)
    if d not in _DIR_NAMES:
        rep.add("bad-direction", f"{direction} is not a unit axis vector")
        return rep
    if dist < 1:
        rep.add("bad-distance", f"distance must be >= 1, got {dist}")
        return rep
    a, b = segs[seg]
    ax = segment_axis(a, b)
    dir_axis = (0, 1, 2)[[abs(v) for v in d].index(1)]
    if ax == dir_axis:
        rep.add("bad-direction", "slide direction must be perpendicular to the segment")
        return rep
    n = len(s.path)
    if not s.is_closed and (seg == 0 or seg == n - 2):
        rep.add("port-pinned",
                f"segment {seg} of open strand {strand_id} carries a boundary port")
        return rep

    allowed = set(segment_points(a, b))
    for j in ((seg - 1) % len(segs), (seg + 1) % len(segs)):
        if s.is_closed or 0 <= j < len(segs):
            allowed.update(segment_points(*segs[j]))

    own = set(s.points())
    others: dict[LatticePoint, str] = {}
    for t in c.strands:
        if t.id != strand_id:
            for p in t.points():
                others[p] = t.id

    for p in sorted(_sweep_points(a, b, d, dist)):
        if p in others:
            rep.add("blocked-by-strand",
                    f"sweep hits strand {others[p]} at {tuple(p)}",
                    [others[p]], [p])
        elif p in own and p not in allowed:
            rep.add("blocked-by-self",
                    f"sweep hits its own strand at {tuple(p)}", [strand_id], [p])
        if not c.bounds.contains(p):
            face = _DIR_NAMES.get(d, "?")
            rep.add("out-of-bounds",
                    f"sweep leaves bounds at {tuple(p)} (toward {face})", [strand_id], [p])
    if not rep.ok:
        return rep

    new_path = _slid_path(s, seg, d, dist)
    candidate = c.with_strand_replaced(strand_id, replace(s, path=new_path))
    after = validate_geometry(candidate)
    for v in after.violations:
        rep.violations.append(v)
    return rep


def _apply_slide(c: TopoCircuit, m: Move) -> TopoCircuit:
    s = c.strand(m.strand)
    new_path = _slid_path(s, m.segment, m.direction, m.distance)
    return c.with_strand_replaced(m.strand, replace(s, path=new_path))


# --- bridge -------------------------------------------------------------------

def _facing_segments(s: DefectStrand, i: int, j: int) -> bool:
    """True iff segments i and j are antiparallel, on lines at perpendicular
    distance 1, with exactly mirrored spans (both reconnect rungs are unit)."""
    segs = _strand_segments(s)
    if not (0 <= i < len(segs) and 0 <= j < len(segs)) or i == j:
        return False
    a1, a2 = segs[i]
    b1, b2 = segs[j]
    ax_a, ax_b = segment_axis(a1, a2), segment_axis(b1, b2)
    if ax_a is None or ax_a != ax_b:
        return False
    da = a2[ax_a] - a1[ax_a]
    db = b2[ax_a] - b1[ax_a]
    if da * db >= 0:
        return False  # must run in opposite directions
    rung1 = a1 - b2
    rung2 = a2 - b1
    return (sum(abs(v) for v in rung1) == 1 and sum(abs(v) for v in rung2) == 1)


def _split_by_bridge(s: DefectStrand, i: int, j: int
                     ) -> tuple[DefectStrand, DefectStrand]:
    """Surgery: reconnect segment endpoints across the unit gap, producing the
    main piece (keeps ports and position 0) and the cut-off piece."""
    i, j = sorted((i, j))
    n = len(s.path)
    if s.is_closed:
        inner = [s.path[k] for k in range(i + 1, j + 1)]
        outer = [s.path[k % n] for k in range(j + 1, n + i + 1)]
        main = replace(s, path=normalize_path(outer, closed=True))
        cut = DefectStrand(id=s.id + "#cut", kind=s.kind,
                           path=normalize_path(inner, closed=True),
                           closure="closed", meta=s.meta)
        return main, cut
    inner = [s.path[k] for k in range(i + 1, j + 1)]
    outer = [s.path[k] for k in range(0, i + 1)] + [s.path[k] for k in range(j + 1, n)]
    main = replace(s, path=normalize_path(outer, closed=False))
    cut = DefectStrand(id=s.id + "#cut", kind=s.kind,
                       path=normalize_path(inner, closed=True),
                       closure="closed", meta=s.meta)
    return main, cut


def _is_degenerate_loop(path: tuple[LatticePoint, ...]) -> bool:
    """A closed candidate that bounds no area (a retraced sliver) links nothing."""
    return len(path) < 4


def check_bridge(c: TopoCircuit, strand_id: str, seg_a: int, seg_b: int) -> ValidityReport:
    rep = ValidityReport()
    if not c.has_strand(strand_id):
        rep.add("no-such-strand", f"strand {strand_id} not in circuit")
        return rep
    s = c.strand(strand_id)
    if not _facing_segments(s, seg_a, seg_b):
        rep.add("not-facing",
                f"segments {seg_a},{seg_b} of {strand_id} are not facing "
                "antiparallel segments at distance 1 with mirrored spans")
        return rep
    try:
        _bridge_result(c, Move.bridge(strand_id, seg_a, seg_b))
    except MoveError as e:
        rep.add(e.code, str(e))
    return rep


def _bridge_result(c: TopoCircuit, m: Move) -> TopoCircuit:
    s = c.strand(m.strand)
    if not _facing_segments(s, m.seg_a, m.seg_b):
        raise MoveError("not-facing",
                        f"segments {m.seg_a},{m.seg_b} of {m.strand} do not face")
    main, cut = _split_by_bridge(s, m.seg_a, m.seg_b)
    main_deg = s.is_closed and _is_degenerate_loop(main.path)
    cut_deg = _is_degenerate_loop(cut.path)
    if main_deg and cut_deg:
        raise MoveError("invalid-surgery",
                        f"bridge on {m.strand} leaves only degenerate slivers")

    candidate = c.with_strand_replaced(s.id, None)
    pieces = tuple(p for p, deg in ((main, main_deg), (cut, cut_deg)) if not deg)
    candidate = replace(candidate, strands=candidate.strands + pieces)
    bad = validate_geometry(candidate)
    if not bad.ok:
        raise MoveError("invalid-surgery", f"bridge would break geometry: {bad}")

    cut_null = cut_deg or (not cut.ports and
                           not linking_rows_for(candidate, {cut.id}, cross_check=False))
    if cut_null:
        if main_deg:
            raise MoveError("invalid-surgery", "surviving half would be degenerate")
        return candidate.with_strand_replaced(cut.id, None) \
            if not cut_deg else candidate
    main_null = (s.is_closed and not main.ports and
                 (main_deg or not linking_rows_for(candidate, {main.id},
                                                   cross_check=False)))
    if main_null:
        result = candidate.with_strand_replaced(s.id, None) \
            if not main_deg else candidate
        return result.with_strand_replaced(cut.id, replace(cut, id=s.id))
    raise MoveError("would change signature",
                    f"bridge on {m.strand} leaves no deletable null half")


# --- deletion -------------------------------------------------------------------

def check_delete(c: TopoCircuit, strand_id: str) -> ValidityReport:
    rep = ValidityReport()
    if not c.has_strand(strand_id):
        rep.add("no-such-strand", f"strand {strand_id} not in circuit")
        return rep
    s = c.strand(strand_id)
    if not s.is_closed or s.ports:
        rep.add("strand carries ports",
                f"strand {strand_id} is open or carries ports", [strand_id])
        return rep
    rows = linking_rows_for(c, {strand_id}, cross_check=False)
    if rows:
        rep.add("nonzero linking row",
                f"strand {strand_id} links {sorted(set(x for k in rows for x in k) - {strand_id})}",
                [strand_id])
    return rep


# --- unified apply / enumerate / replay ------------------------------------------

def check_move(c: TopoCircuit, m: Move) -> ValidityReport:
    if m.kind == "slide":
        return check_slide(c, m.strand, m.segment, m.direction, m.distance)
    if m.kind == "bridge":
        return check_bridge(c, m.strand, m.seg_a, m.seg_b)
    if m.kind == "delete":
        return check_delete(c, m.strand)
    rep = ValidityReport()
    rep.add("bad-kind", f"unknown move kind {m.kind!r}")
    return rep


def apply_move(c: TopoCircuit, m: Move) -> TopoCircuit:
    """Checked application; raises MoveError naming the first failure."""
    rep = check_move(c, m)
    if not rep.ok:
        v = rep.violations[0]
        raise MoveError(v.code, str(v))
    return _apply_unchecked(c, m)


def _apply_unchecked(c: TopoCircuit, m: Move) -> TopoCircuit:
    """Test-harness escape hatch: run the rewrite without its validity gate.
    Used to demonstrate that rejected moves really do break things."""
    if m.kind == "slide":
        return _apply_slide(c, m)
    if m.kind == "bridge":
        return _bridge_result(c, m)
    if m.kind == "delete":
        return c.with_strand_replaced(m.strand, None)
    raise MoveError("bad-kind", f"unknown move kind {m.kind!r}")


def _max_slide_reach(c: TopoCircuit, bound: int | None = None) -> int:
    return bound if bound is not None else max(c.bounds.x, c.bounds.y, c.bounds.z)


def enumerate_moves(c: TopoCircuit, budget: int = 10_000,
                    max_distance: int | None = None) -> list[Move]:
    """All currently-valid moves in deterministic order (strand id; deletes,
    then bridges by segment pair, then slides by segment/direction/distance;
    distances stop at the first blocked one), truncated at ``budget``."""
    out: list[Move] = []
    reach = _max_slide_reach(c, max_distance)
    for s in sorted(c.strands, key=lambda t: t.id):
        if len(out) >= budget:
            break
        if check_delete(c, s.id).ok:
            out.append(Move.delete(s.id))
        segs = _strand_segments(s)
        for i in range(len(segs)):
            for j in range(i + 1, len(segs)):
                if len(out) >= budget:
                    return out[:budget]
                if _facing_segments(s, i, j) and check_bridge(c, s.id, i, j).ok:
                    out.append(Move.bridge(s.id, i, j))
        for seg in range(len(segs)):
            a, b = segs[seg]
            ax = segment_axis(a, b)
            for d in DIRECTION_ORDER:
                if len(out) >= budget:
                    return out[:budget]
                dir_axis = (0, 1, 2)[[abs(v) for v in d].index(1)]
                if dir_axis == ax:
                    continue
                for dist in range(1, reach + 1):
                    if not check_slide(c, s.id, seg, d, dist).ok:
                        break
                    out.append(Move.slide(s.id, seg, d, dist))
                    if len(out) >= budget:
                        return out[:budget]
    return out[:budget]


def replay(base: TopoCircuit, log: MoveLog) -> TopoCircuit:
    """Re-run a move log from its base circuit, re-validating every step."""
    digest = tqc_digest(base)
    if digest != log.base_circuit_hash:
        raise MoveError("hash-mismatch",
                        f"log base {log.base_circuit_hash[:12]}.. does not match "
                        f"circuit {digest[:12]}..")
    current = base
    for i, m in enumerate(log.moves):
        try:
            current = apply_move(current, m)
        except MoveError as e:
            raise MoveError("invalid-step", f"step {i} ({m.to_line()}): {e}") from None
    return current
