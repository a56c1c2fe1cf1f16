"""Integer-lattice geometry of defect circuits.

A circuit is a set of rectilinear defect strands (closed loops or
boundary-pinned open paths) living on the plumbing-piece lattice inside an
axis-aligned bounding box.  The x axis is temporal by convention: circuit
inputs sit on the x=0 face, outputs on the x=X face.

Everything here is an immutable value; operations are pure functions that
either measure a circuit or build a new one.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Iterable, NamedTuple

TQC_VERSION = 1

AXES = ("x", "y", "z")
UNIT_VECTORS = {
    (-1, 0, 0): "-x", (1, 0, 0): "+x",
    (0, -1, 0): "-y", (0, 1, 0): "+y",
    (0, 0, -1): "-z", (0, 0, 1): "+z",
}


class LatticePoint(NamedTuple):
    """A point on the plumbing-piece lattice; x is the temporal axis."""

    x: int
    y: int
    z: int

    def __add__(self, other) -> "LatticePoint":  # type: ignore[override]
        return LatticePoint(self.x + other[0], self.y + other[1], self.z + other[2])

    def __sub__(self, other) -> "LatticePoint":
        return LatticePoint(self.x - other[0], self.y - other[1], self.z - other[2])


Point = LatticePoint | tuple[int, int, int]


def as_point(p: Point) -> LatticePoint:
    return p if isinstance(p, LatticePoint) else LatticePoint(int(p[0]), int(p[1]), int(p[2]))


@dataclass(frozen=True)
class PortLabel:
    """Names one endpoint of an open strand, pinned to a temporal boundary face."""

    name: str
    position: LatticePoint
    face: str  # "input" (x=0) or "output" (x=X)

    def __post_init__(self):
        object.__setattr__(self, "position", as_point(self.position))


@dataclass(frozen=True)
class DefectStrand:
    """One primal or dual defect: an axis-aligned polyline on the lattice.

    ``path`` holds the corner vertices only; consecutive vertices differ in
    exactly one coordinate.  Closed strands treat last->first as an implicit
    segment.  Open strands carry exactly two port names, one per endpoint
    (path[0] and path[-1], in that order).
    """

    id: str
    kind: str  # "primal" | "dual"
    path: tuple[LatticePoint, ...]
    closure: str = "closed"  # "closed" | "open"
    ports: tuple[str, ...] = ()
    meta: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(as_point(p) for p in self.path))
        if isinstance(self.meta, dict):
            object.__setattr__(self, "meta", tuple(sorted(self.meta.items())))
        else:
            object.__setattr__(self, "meta", tuple(sorted(self.meta)))

    @property
    def is_closed(self) -> bool:
        return self.closure == "closed"

    @property
    def meta_dict(self) -> dict[str, str]:
        return dict(self.meta)

    def segments(self) -> list[tuple[LatticePoint, LatticePoint]]:
        """Ordered segments, including the wrap-around one for closed strands."""
        segs = [(self.path[i], self.path[i + 1]) for i in range(len(self.path) - 1)]
        if self.is_closed and len(self.path) >= 2:
            segs.append((self.path[-1], self.path[0]))
        return segs

    def points(self) -> list[LatticePoint]:
        """Every lattice point on the strand, segment interiors included."""
        out: list[LatticePoint] = []
        seen: set[LatticePoint] = set()
        for a, b in self.segments():
            for p in segment_points(a, b)[:-1]:
                if p not in seen:
                    seen.add(p)
                    out.append(p)
        if not self.is_closed and self.path:
            last = self.path[-1]
            if last not in seen:
                out.append(last)
        if len(self.path) == 1:
            out = [self.path[0]]
        return out


@dataclass(frozen=True)
class Bounds:
    """Axis-aligned box {0..x} x {0..y} x {0..z} in plumbing pieces."""

    x: int
    y: int
    z: int

    def contains(self, p: LatticePoint) -> bool:
        return 0 <= p.x <= self.x and 0 <= p.y <= self.y and 0 <= p.z <= self.z

    def as_list(self) -> list[int]:
        return [self.x, self.y, self.z]


@dataclass(frozen=True)
class TopoCircuit:
    """A full defect circuit: strands, bounding box, and boundary ports."""

    strands: tuple[DefectStrand, ...]
    bounds: Bounds
    ports: tuple[PortLabel, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "strands", tuple(self.strands))
        object.__setattr__(self, "ports", tuple(self.ports))
        if isinstance(self.bounds, (tuple, list)):
            object.__setattr__(self, "bounds", Bounds(*self.bounds))

    def strand(self, strand_id: str) -> DefectStrand:
        for s in self.strands:
            if s.id == strand_id:
                return s
        raise KeyError(f"no strand {strand_id!r}")

    def has_strand(self, strand_id: str) -> bool:
        return any(s.id == strand_id for s in self.strands)

    def port(self, name: str) -> PortLabel:
        for p in self.ports:
            if p.name == name:
                return p
        raise KeyError(f"no port {name!r}")

    def with_strand_replaced(self, strand_id: str, new: DefectStrand | None) -> "TopoCircuit":
        """New circuit with one strand replaced (or removed when ``new`` is None)."""
        out = []
        for s in self.strands:
            if s.id == strand_id:
                if new is not None:
                    out.append(new)
            else:
                out.append(s)
        return replace(self, strands=tuple(out))


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    strand_ids: tuple[str, ...] = ()
    points: tuple[LatticePoint, ...] = ()

    def __str__(self) -> str:
        loc = ""
        if self.strand_ids:
            loc += " strands=" + ",".join(self.strand_ids)
        if self.points:
            loc += " points=" + ";".join(f"({p.x},{p.y},{p.z})" for p in self.points)
        return f"[{self.code}] {self.message}{loc}"


@dataclass
class ValidityReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def add(self, code: str, message: str, strand_ids: Iterable[str] = (),
            points: Iterable[LatticePoint] = ()) -> None:
        self.violations.append(Violation(code, message, tuple(strand_ids), tuple(points)))

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


class GeometryError(ValueError):
    """Raised when an operation requires a valid circuit and gets a broken one."""


def segment_axis(a: LatticePoint, b: LatticePoint) -> int | None:
    """Index of the single axis along which a->b runs, or None if not axis-aligned."""
    d = [b[i] - a[i] for i in range(3)]
    nz = [i for i in range(3) if d[i] != 0]
    if len(nz) != 1:
        return None
    return nz[0]


def segment_points(a: LatticePoint, b: LatticePoint) -> list[LatticePoint]:
    """All lattice points from a to b inclusive (a and b must be axis-aligned)."""
    if a == b:
        return [as_point(a)]
    ax = segment_axis(a, b)
    if ax is None:
        raise GeometryError(f"segment {a}->{b} is not axis-aligned")
    step = 1 if b[ax] > a[ax] else -1
    pts = []
    cur = list(a)
    while True:
        pts.append(LatticePoint(*cur))
        if cur[ax] == b[ax]:
            break
        cur[ax] += step
    return pts


def normalize_path(path: Iterable[Point], closed: bool) -> tuple[LatticePoint, ...]:
    """Drop duplicate consecutive vertices and merge collinear runs.

    For closed paths the wrap-around corner is normalized too.  The result
    is the minimal corner representation of the same point set.
    """
    pts = [as_point(p) for p in path]
    # remove consecutive duplicates (cyclically for closed paths)
    out: list[LatticePoint] = []
    for p in pts:
        if not out or out[-1] != p:
            out.append(p)
    if closed and len(out) > 1 and out[0] == out[-1]:
        out.pop()
    # merge collinear triples until stable
    changed = True
    while changed and len(out) > 2:
        changed = False
        n = len(out)
        keep = []
        rng = range(n) if closed else range(1, n - 1)
        drop = set()
        for i in rng:
            a, b, c = out[i - 1], out[i], out[(i + 1) % n]
            if a == c:
                continue  # hairpin vertex; leave for validity checks
            ax1, ax2 = segment_axis(a, b), segment_axis(b, c)
            if ax1 is not None and ax1 == ax2:
                d1 = 1 if b[ax1] > a[ax1] else -1
                d2 = 1 if c[ax1] > b[ax1] else -1
                if d1 == d2:
                    drop.add(i)
        if drop:
            out = [p for i, p in enumerate(out) if i not in drop]
            changed = True
    return tuple(out)


def _strand_local_report(s: DefectStrand, rep: ValidityReport) -> None:
    n = len(s.path)
    if n == 0:
        rep.add("empty-path", f"strand {s.id} has no vertices", [s.id])
        return
    if s.is_closed and n < 4:
        rep.add("degenerate-loop", f"closed strand {s.id} needs at least 4 corners", [s.id])
    if not s.is_closed and n < 2:
        rep.add("degenerate-open", f"open strand {s.id} needs at least 2 vertices", [s.id])
    if s.kind not in ("primal", "dual"):
        rep.add("bad-kind", f"strand {s.id} kind {s.kind!r} not primal/dual", [s.id])
    if s.closure not in ("closed", "open"):
        rep.add("bad-closure", f"strand {s.id} closure {s.closure!r}", [s.id])
    if s.is_closed and s.ports:
        rep.add("closed-with-ports", f"closed strand {s.id} declares ports", [s.id])
    if not s.is_closed and len(s.ports) != 2:
        rep.add("port-count", f"open strand {s.id} must carry exactly 2 ports", [s.id])

    segs = s.segments()
    for idx, (a, b) in enumerate(segs):
        if a == b:
            rep.add("zero-segment", f"strand {s.id} segment {idx} has length 0",
                    [s.id], [a])
        elif segment_axis(a, b) is None:
            rep.add("not-axis-aligned",
                    f"strand {s.id} segment {idx} {tuple(a)}->{tuple(b)} is diagonal",
                    [s.id], [a, b])
    # consecutive-collinearity: vertices must be true corners
    m = len(segs)
    for i in range(m if s.is_closed else m - 1):
        a1, b1 = segs[i]
        a2, b2 = segs[(i + 1) % m]
        ax1, ax2 = segment_axis(a1, b1), segment_axis(a2, b2)
        if ax1 is not None and ax1 == ax2:
            rep.add("collinear-corner",
                    f"strand {s.id} vertex {tuple(b1)} is not a corner", [s.id], [b1])
    # self-avoidance over the full point set (wrap segment included)
    seen: set[LatticePoint] = set()
    for idx, (a, b) in enumerate(segs):
        if a == b or segment_axis(a, b) is None:
            continue
        last = idx == m - 1 and not s.is_closed
        pts = segment_points(a, b) if last else segment_points(a, b)[:-1]
        for p in pts:
            if p in seen:
                rep.add("self-intersection",
                        f"strand {s.id} visits {tuple(p)} twice", [s.id], [p])
            else:
                seen.add(p)


def validate_geometry(c: TopoCircuit) -> ValidityReport:
    """Check every structural invariant; returns all violations, raises nothing."""
    rep = ValidityReport()
    ids_seen: set[str] = set()
    for s in c.strands:
        if s.id in ids_seen:
            rep.add("duplicate-id", f"strand id {s.id} used twice", [s.id])
        ids_seen.add(s.id)
        _strand_local_report(s, rep)

    # cross-strand point-disjointness + bounds
    owner: dict[LatticePoint, str] = {}
    for s in c.strands:
        try:
            pts = s.points()
        except GeometryError:
            continue
        for p in pts:
            if p in owner and owner[p] != s.id:
                rep.add("strand-overlap",
                        f"strands {owner[p]} and {s.id} share {tuple(p)}",
                        [owner[p], s.id], [p])
            owner[p] = s.id
            if not c.bounds.contains(p):
                rep.add("out-of-bounds",
                        f"strand {s.id} point {tuple(p)} outside bounds", [s.id], [p])

    # ports: placement, uniqueness, referencing
    port_names = [p.name for p in c.ports]
    if len(set(port_names)) != len(port_names):
        rep.add("duplicate-port", "port names are not unique")
    by_name = {p.name: p for p in c.ports}
    referenced: dict[str, str] = {}
    for p in c.ports:
        want_x = 0 if p.face == "input" else c.bounds.x
        if p.face not in ("input", "output"):
            rep.add("bad-face", f"port {p.name} face {p.face!r}")
        elif p.position.x != want_x:
            rep.add("port-misplaced",
                    f"port {p.name} not on its {p.face} face", points=[p.position])
    for s in c.strands:
        if s.is_closed:
            continue
        for end, pname in zip((0, -1), s.ports):
            if pname in referenced:
                rep.add("port-shared", f"port {pname} referenced by {referenced[pname]} and {s.id}",
                        [referenced[pname], s.id])
            referenced[pname] = s.id
            if pname not in by_name:
                rep.add("port-undeclared", f"strand {s.id} references unknown port {pname}", [s.id])
                continue
            port = by_name[pname]
            endpoint = s.path[end]
            if endpoint != port.position:
                rep.add("open-endpoint-not-pinned",
                        f"strand {s.id} endpoint {tuple(endpoint)} != port {pname} position",
                        [s.id], [endpoint, port.position])
            if endpoint.x not in (0, c.bounds.x):
                rep.add("open-endpoint-interior",
                        f"strand {s.id} endpoint {tuple(endpoint)} not on a temporal boundary",
                        [s.id], [endpoint])
            # endpoint segment must leave the boundary plane perpendicularly
            if len(s.path) >= 2:
                nbr = s.path[1] if end == 0 else s.path[-2]
                if segment_axis(endpoint, nbr) != 0:
                    rep.add("endpoint-not-perpendicular",
                            f"strand {s.id} endpoint segment at {tuple(endpoint)} "
                            "must run along x", [s.id], [endpoint])
    for name in by_name:
        if name not in referenced:
            rep.add("port-unreferenced", f"port {name} not used by any open strand")
    return rep


def require_valid(c: TopoCircuit) -> None:
    rep = validate_geometry(c)
    if not rep.ok:
        raise GeometryError(f"invalid circuit:\n{rep}")


def tight_extents(c: TopoCircuit) -> tuple[int, int, int]:
    """Per-axis (max - min) over all strand points, clamped to >= 1; (0,0,0) if empty."""
    pts = [p for s in c.strands for p in s.points()]
    if not pts:
        return (0, 0, 0)
    ext = []
    for ax in range(3):
        vals = [p[ax] for p in pts]
        ext.append(max(1, max(vals) - min(vals)))
    return tuple(ext)  # type: ignore[return-value]


def bounding_volume(c: TopoCircuit) -> int:
    """Tight bounding-box volume in plumbing pieces (0 for an empty circuit)."""
    ex, ey, ez = tight_extents(c)
    return ex * ey * ez


def occupied_pieces(c: TopoCircuit) -> set[LatticePoint]:
    """Every lattice point lying on any strand, segment interiors included."""
    out: set[LatticePoint] = set()
    for s in c.strands:
        out.update(s.points())
    return out


def occupied_count(c: TopoCircuit) -> int:
    return len(occupied_pieces(c))


def translate_circuit(c: TopoCircuit, d: tuple[int, int, int],
                      new_bounds: Bounds | None = None) -> TopoCircuit:
    """Shift all strands and ports by d; bounds unchanged unless given."""
    dx, dy, dz = d
    strands = tuple(
        replace(s, path=tuple(LatticePoint(p.x + dx, p.y + dy, p.z + dz) for p in s.path))
        for s in c.strands
    )
    ports = tuple(
        replace(p, position=LatticePoint(p.position.x + dx, p.position.y + dy,
                                         p.position.z + dz))
        for p in c.ports
    )
    return TopoCircuit(strands, new_bounds or c.bounds, ports)


_ROTATIONS = {
    # quarter turn about each axis: point -> point (right-handed)
    "x": lambda p: LatticePoint(p.x, -p.z, p.y),
    "y": lambda p: LatticePoint(p.z, p.y, -p.x),
    "z": lambda p: LatticePoint(-p.y, p.x, p.z),
}


def rotate_circuit(c: TopoCircuit, axis: str, quarter_turns: int = 1) -> TopoCircuit:
    """Rotate the whole circuit by 90-degree steps, then re-anchor at the origin.

    Bounds are recomputed from the rotated box.  Port faces survive only for
    rotations about x; other rotations are meaningful for port-free circuits.
    """
    rot = _ROTATIONS[axis]
    k = quarter_turns % 4

    def rp(p: LatticePoint) -> LatticePoint:
        for _ in range(k):
            p = rot(p)
        return p

    corners = [LatticePoint(x, y, z)
               for x in (0, c.bounds.x) for y in (0, c.bounds.y) for z in (0, c.bounds.z)]
    rc = [rp(p) for p in corners]
    mins = LatticePoint(*(min(p[i] for p in rc) for i in range(3)))
    maxs = LatticePoint(*(max(p[i] for p in rc) for i in range(3)))

    def shift(p: LatticePoint) -> LatticePoint:
        return LatticePoint(p.x - mins.x, p.y - mins.y, p.z - mins.z)

    strands = tuple(replace(s, path=tuple(shift(rp(p)) for p in s.path)) for s in c.strands)
    new_bounds = Bounds(maxs.x - mins.x, maxs.y - mins.y, maxs.z - mins.z)
    ports = []
    for p in c.ports:
        pos = shift(rp(p.position))
        face = "input" if pos.x == 0 else "output"
        ports.append(replace(p, position=pos, face=face))
    return TopoCircuit(strands, new_bounds, tuple(ports))


# --- .tqc serialization ----------------------------------------------------

def circuit_to_tqc(c: TopoCircuit) -> str:
    """Canonical .tqc text: fixed field order, strands sorted by id.

    Two writes of the same value are byte-identical.
    """
    obj = {
        "version": TQC_VERSION,
        "bounds": c.bounds.as_list(),
        "ports": [
            {"name": p.name, "position": list(p.position), "face": p.face}
            for p in c.ports
        ],
        "strands": [
            {
                "id": s.id,
                "kind": s.kind,
                "closure": s.closure,
                "ports": list(s.ports),
                "meta": {k: v for k, v in sorted(s.meta)},
                "path": [list(p) for p in s.path],
            }
            for s in sorted(c.strands, key=lambda s: s.id)
        ],
    }
    return json.dumps(obj, indent=1) + "\n"


class TqcFormatError(ValueError):
    pass


def circuit_from_tqc(text: str) -> TopoCircuit:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise TqcFormatError(f"not valid .tqc: {e}") from None
    try:
        if obj["version"] != TQC_VERSION:
            raise TqcFormatError(f"unsupported .tqc version {obj['version']}")
        bounds = Bounds(*(int(v) for v in obj["bounds"]))
        ports = tuple(
            PortLabel(p["name"], LatticePoint(*p["position"]), p["face"])
            for p in obj.get("ports", [])
        )
        strands = tuple(
            DefectStrand(
                id=s["id"],
                kind=s["kind"],
                path=tuple(LatticePoint(*pt) for pt in s["path"]),
                closure=s["closure"],
                ports=tuple(s.get("ports", [])),
                meta=tuple(sorted((k, str(v)) for k, v in s.get("meta", {}).items())),
            )
            for s in obj.get("strands", [])
        )
    except (KeyError, TypeError) as e:
        raise TqcFormatError(f"malformed .tqc: {e}") from None
    return TopoCircuit(strands, bounds, ports)


def tqc_digest(text_or_circuit: str | TopoCircuit) -> str:
    """sha256 hex digest of canonical .tqc bytes; keys move logs to their base."""
    if isinstance(text_or_circuit, TopoCircuit):
        text_or_circuit = circuit_to_tqc(text_or_circuit)
    return hashlib.sha256(text_or_circuit.encode("utf-8")).hexdigest()
