"""Linking numbers and the topological signature of a circuit.

The signature (ports + strand registry + pairwise linking matrix) is the
machine-checkable stand-in for the computation a circuit performs: every
deformation move must preserve it.

Linking numbers are computed two independent ways and cross-checked:

* a Gauss solid-angle sum over corner-segment pairs (exact in theory,
  floating point in practice, rounded to the nearest integer), and
* a signed-crossing count in a generic projection along an
  irrational-slope direction.

Disjoint axis-aligned segments are either coplanar (zero contribution,
detected with exact integer arithmetic) or skew, in which case all
endpoint-to-endpoint directions lie in an open hemisphere and the
spherical-quadrilateral area is computed safely by two Van Oosterom
triangles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    Bounds,
    DefectStrand,
    LatticePoint,
    TopoCircuit,
    normalize_path,
    segment_points,
)

#: projection direction for the crossing backend; the golden ratio makes the
#: three lattice axes project to pairwise non-parallel 2-D directions.
_PHI = (1.0 + math.sqrt(5.0)) / 2.0
_PROJ_DIR = np.array([1.0, _PHI, _PHI * _PHI])
_PROJ_DIR /= np.linalg.norm(_PROJ_DIR)
_E1 = np.cross(_PROJ_DIR, np.array([0.0, 0.0, 1.0]))
_E1 /= np.linalg.norm(_E1)
_E2 = np.cross(_PROJ_DIR, _E1)
_E2 /= np.linalg.norm(_E2)
#: tiny per-strand shift used to break ties the irrational direction misses
_OFFSET_DIR = np.array([1.0, 1.0 / _PHI, 1.0 / (_PHI * _PHI)])
_OFFSET_SCALE = 1e-6

GAUSS_RESIDUAL_TOL = 1e-6


class TopologyError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


# --- canonical exterior closure of open strands -----------------------------

def _closure_lift_axis(c: TopoCircuit) -> int:
    """1 (y) or 2 (z): lift perpendicular to the port spread so that the
    vertical legs of different closures land on distinct columns."""
    if not c.ports:
        return 2
    ys = [p.position.y for p in c.ports]
    zs = [p.position.z for p in c.ports]
    spread_y = max(ys) - min(ys)
    spread_z = max(zs) - min(zs)
    return 2 if spread_z <= spread_y else 1


def open_strand_rank(c: TopoCircuit) -> dict[str, int]:
    """Stable closure rank per open strand, sorted by smallest port name."""
    opens = [s for s in c.strands if not s.is_closed]
    opens.sort(key=lambda s: min(s.ports))
    return {s.id: i for i, s in enumerate(opens)}


def closed_loop(s: DefectStrand, c: TopoCircuit,
                rank: dict[str, int] | None = None) -> tuple[LatticePoint, ...]:
    """The strand's vertex cycle; open strands are closed through the empty
    exterior: one plumbing piece out past the boundary face, out to the far
    plane (x=-3 for inputs, x=X+3 for outputs), lifted to a rank-private
    level, and connected there.
    """
    if s.is_closed:
        return s.path
    if rank is None:
        rank = open_strand_rank(c)
    axis = _closure_lift_axis(c)
    level = (c.bounds.y if axis == 1 else c.bounds.z) + 1 + rank[s.id]

    def out_x(endpoint: LatticePoint) -> int:
        return -3 if endpoint.x == 0 else c.bounds.x + 3

    e0, e1 = s.path[0], s.path[-1]
    ox0, ox1 = out_x(e0), out_x(e1)

    def with_axis(p: LatticePoint, x: int, value: int | None = None) -> LatticePoint:
        coords = [x, p.y, p.z]
        if value is not None:
            coords[axis] = value
        return LatticePoint(*coords)

    same_face = ox0 == ox1
    perp = 1 if axis == 2 else 2  # the coordinate that stays at the port value
    if same_face and e0[perp] == e1[perp]:
        # ports stacked along the lift axis: connect directly
        tail = [with_axis(e1, ox1), with_axis(e0, ox0)]
    else:
        tail = [
            with_axis(e1, ox1),
            with_axis(e1, ox1, level),
            with_axis(e1, ox0, level),
            with_axis(e0, ox0, level),
            with_axis(e0, ox0),
        ]
    return normalize_path(tuple(s.path) + tuple(tail), closed=True)


def _loop_points(loop: tuple[LatticePoint, ...]) -> set[LatticePoint]:
    pts: set[LatticePoint] = set()
    n = len(loop)
    for i in range(n):
        for p in segment_points(loop[i], loop[(i + 1) % n])[:-1]:
            pts.add(p)
    return pts


def orient_loop(loop: tuple[LatticePoint, ...]) -> tuple[LatticePoint, ...]:
    """Canonical traversal: start at the lexicographically smallest vertex and
    walk toward its smaller neighbor, so signs are comparable across circuits."""
    n = len(loop)
    i = min(range(n), key=lambda k: loop[k])
    nxt, prv = loop[(i + 1) % n], loop[(i - 1) % n]
    if nxt <= prv:
        return tuple(loop[i:] + loop[:i])
    rev = tuple(reversed(loop))
    j = n - 1 - i
    return tuple(rev[j:] + rev[:j])


# --- Gauss solid-angle backend ----------------------------------------------

def _segment_arrays(loop: tuple[LatticePoint, ...]) -> tuple[np.ndarray, np.ndarray]:
    v = np.array(loop, dtype=np.int64)
    return v, np.roll(v, -1, axis=0)


def _vos_triangle(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Signed spherical-triangle area via Van Oosterom--Strackee, elementwise
    over leading axes; exact for triangles inside an open hemisphere."""
    num = np.einsum("...i,...i->...", a, np.cross(b, c))
    den = (1.0
           + np.einsum("...i,...i->...", a, b)
           + np.einsum("...i,...i->...", b, c)
           + np.einsum("...i,...i->...", c, a))
    return 2.0 * np.arctan2(num, den)


def gauss_linking(loop_a: tuple[LatticePoint, ...],
                  loop_b: tuple[LatticePoint, ...]) -> float:
    """Gauss linking integral summed in closed form over all segment pairs."""
    p1, p2 = _segment_arrays(loop_a)
    q1, q2 = _segment_arrays(loop_b)
    # pairwise endpoint differences, shape [nA, nB, 3]
    r11 = q1[None, :, :] - p1[:, None, :]
    r12 = q2[None, :, :] - p1[:, None, :]
    r21 = q1[None, :, :] - p2[:, None, :]
    r22 = q2[None, :, :] - p2[:, None, :]

    # coplanar segment pairs contribute exactly zero; integer determinant test
    seg_a = (p2 - p1)[:, None, :]
    det = np.einsum("...i,...i->...", np.cross(seg_a, r11), r12)
    skew = det != 0
    if not np.any(skew):
        return 0.0

    def unit(v: np.ndarray) -> np.ndarray:
        return v / np.linalg.norm(v, axis=-1, keepdims=True)

    a = unit(r11.astype(float))
    b = unit(r12.astype(float))
    cc = unit(r22.astype(float))
    d = unit(r21.astype(float))
    # quadrilateral a->d->c->b is the positively-oriented Gauss-map image;
    # traversing it as a->b->c->d flips the sign, hence the leading minus
    omega = _vos_triangle(a, b, cc) + _vos_triangle(a, cc, d)
    return float(-np.sum(omega[skew]) / (4.0 * math.pi))


# --- signed-crossing projection backend --------------------------------------

def crossing_linking(loop_a: tuple[LatticePoint, ...],
                     loop_b: tuple[LatticePoint, ...],
                     offset_a: int = 1, offset_b: int = 2) -> int:
    """Half the signed crossing count between the two loops in a generic
    projection; per-loop offsets break residual degeneracies."""
    va = np.array(loop_a, dtype=float) + offset_a * _OFFSET_SCALE * _OFFSET_DIR
    vb = np.array(loop_b, dtype=float) + offset_b * _OFFSET_SCALE * _OFFSET_DIR
    pa = np.stack([va @ _E1, va @ _E2], axis=-1)
    pb = np.stack([vb @ _E1, vb @ _E2], axis=-1)
    ha = va @ _PROJ_DIR
    hb = vb @ _PROJ_DIR

    a1, a2 = pa, np.roll(pa, -1, axis=0)
    b1, b2 = pb, np.roll(pb, -1, axis=0)
    da = a2 - a1
    db = b2 - b1
    h1a, h2a = ha, np.roll(ha, -1)
    h1b, h2b = hb, np.roll(hb, -1)

    # 2-D determinants for every segment pair [nA, nB]
    cross = da[:, None, 0] * db[None, :, 1] - da[:, None, 1] * db[None, :, 0]
    diff = b1[None, :, :] - a1[:, None, :]
    num_s = diff[..., 0] * db[None, :, 1] - diff[..., 1] * db[None, :, 0]
    num_t = diff[..., 0] * da[:, None, 1] - diff[..., 1] * da[:, None, 0]

    parallel = np.abs(cross) < 1e-12
    safe = np.where(parallel, 1.0, cross)
    s = num_s / safe
    t = num_t / safe
    hits = (~parallel) & (s > 0.0) & (s < 1.0) & (t > 0.0) & (t < 1.0)
    if not np.any(hits):
        return 0

    margin = np.minimum(np.minimum(s, 1.0 - s), np.minimum(t, 1.0 - t))
    if np.any(hits & (margin < 1e-9)):
        raise TopologyError("numerically degenerate",
                            "projected crossing too close to a segment end")

    depth_a = h1a[:, None] + s * (h2a - h1a)[:, None]
    depth_b = h1b[None, :] + t * (h2b - h1b)[None, :]
    if np.any(hits & (np.abs(depth_a - depth_b) < 1e-9)):
        raise TopologyError("not disjoint", "loops touch at a projected crossing")

    # crossing sign: determinant of (over tangent, under tangent)
    sign = np.where(depth_a > depth_b, np.sign(cross), -np.sign(cross))
    total = int(np.rint(np.sum(sign[hits])))
    if total % 2 != 0:
        raise TopologyError("numerically degenerate",
                            "odd signed crossing count between closed loops")
    return total // 2


# --- public linking API -------------------------------------------------------

def _prepared_loop(s: DefectStrand, c: TopoCircuit,
                   rank: dict[str, int] | None) -> tuple[LatticePoint, ...]:
    return orient_loop(closed_loop(s, c, rank))


def linking_number(a: DefectStrand, b: DefectStrand, ctx: TopoCircuit) -> int:
    """Integer linking number of two strands, both backends cross-checked."""
    if a.id == b.id:
        raise TopologyError("self-pair", f"strand {a.id} paired with itself")
    rank = open_strand_rank(ctx)
    la = _prepared_loop(a, ctx, rank)
    lb = _prepared_loop(b, ctx, rank)
    return _linking_of_loops(la, lb, a.id, b.id)


def _linking_of_loops(la: tuple[LatticePoint, ...], lb: tuple[LatticePoint, ...],
                      ida: str, idb: str, check: bool = True) -> int:
    if _loop_points(la) & _loop_points(lb):
        raise TopologyError("not disjoint", f"strands {ida} and {idb} share a point")
    g = gauss_linking(la, lb)
    nearest = round(g)
    if abs(g - nearest) > GAUSS_RESIDUAL_TOL:
        raise TopologyError("numerically degenerate",
                            f"solid-angle sum {g} for ({ida},{idb}) is not integral")
    if check:
        x = crossing_linking(la, lb)
        if x != nearest:
            raise TopologyError(
                "numerically degenerate",
                f"backends disagree for ({ida},{idb}): gauss={nearest} crossings={x}")
    return int(nearest)


@dataclass(frozen=True)
class LinkingMatrix:
    """Symmetric pairwise linking numbers; only nonzero entries are stored."""

    strand_ids: tuple[str, ...]
    entries: tuple[tuple[tuple[str, str], int], ...]

    def get(self, a: str, b: str) -> int:
        key = (a, b) if a < b else (b, a)
        for k, v in self.entries:
            if k == key:
                return v
        return 0

    def row(self, a: str) -> dict[str, int]:
        out = {}
        for (x, y), v in self.entries:
            if x == a:
                out[y] = v
            elif y == a:
                out[x] = v
        return out

    def as_dict(self) -> dict[tuple[str, str], int]:
        return dict(self.entries)


def _boxes_separated(pa: np.ndarray, pb: np.ndarray) -> bool:
    for ax in range(3):
        if pa[:, ax].max() < pb[:, ax].min() or pb[:, ax].max() < pa[:, ax].min():
            return True
    return False


def linking_matrix(c: TopoCircuit, *, short_circuit: bool = True,
                   cross_check: bool = True) -> LinkingMatrix:
    """All unordered strand pairs.  Pairs whose closed loops have bounding
    boxes separated by an empty slab are 0 without computation; disabling
    ``short_circuit`` must not change the result."""
    rank = open_strand_rank(c)
    loops = {s.id: _prepared_loop(s, c, rank) for s in c.strands}
    arrays = {sid: np.array(lp, dtype=np.int64) for sid, lp in loops.items()}
    ids = sorted(loops)
    entries: list[tuple[tuple[str, str], int]] = []
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            if short_circuit and _boxes_separated(arrays[a], arrays[b]):
                continue
            try:
                lk = _linking_of_loops(loops[a], loops[b], a, b, check=cross_check)
            except TopologyError as e:
                raise TopologyError(e.code, f"pair ({a},{b}): {e}") from None
            if lk != 0:
                entries.append(((a, b), lk))
    return LinkingMatrix(tuple(ids), tuple(sorted(entries)))


def linking_rows_for(c: TopoCircuit, targets: set[str], *,
                     cross_check: bool = True) -> dict[tuple[str, str], int]:
    """Nonzero linking entries touching any strand in ``targets`` (for
    incremental signature updates after a move)."""
    rank = open_strand_rank(c)
    loops = {s.id: _prepared_loop(s, c, rank) for s in c.strands}
    arrays = {sid: np.array(lp, dtype=np.int64) for sid, lp in loops.items()}
    out: dict[tuple[str, str], int] = {}
    ids = sorted(loops)
    for a in sorted(targets & set(ids)):
        for b in ids:
            if b == a or (b in targets and b < a):
                continue
            key = (a, b) if a < b else (b, a)
            if _boxes_separated(arrays[a], arrays[b]):
                continue
            lk = _linking_of_loops(loops[a], loops[b], a, b, check=cross_check)
            if lk != 0:
                out[key] = lk
    return out


# --- signatures ---------------------------------------------------------------

@dataclass(frozen=True)
class TopoSignature:
    """What deformation must preserve: boundary ports, strand labels, linking."""

    ports: tuple[tuple[str, str, LatticePoint], ...]
    registry: tuple[tuple[str, tuple[str, str, tuple[tuple[str, str], ...]]], ...]
    linking: LinkingMatrix

    def registry_dict(self) -> dict[str, tuple[str, str, tuple[tuple[str, str], ...]]]:
        return dict(self.registry)


def signature(c: TopoCircuit, *, cross_check: bool = True) -> TopoSignature:
    ports = tuple((p.name, p.face, p.position) for p in c.ports)
    registry = tuple(sorted(
        (s.id, (s.kind, s.closure, s.meta)) for s in c.strands
    ))
    return TopoSignature(ports, registry, linking_matrix(c, cross_check=cross_check))


@dataclass
class SignatureDiff:
    differences: list[str] = field(default_factory=list)

    @property
    def equal(self) -> bool:
        return not self.differences

    def __bool__(self) -> bool:
        return self.equal

    def add(self, msg: str) -> None:
        self.differences.append(msg)

    def __str__(self) -> str:
        return "equal" if self.equal else "; ".join(self.differences)


def _is_null_in(sig: TopoSignature, sid: str) -> bool:
    kind, closure, _meta = sig.registry_dict()[sid]
    if closure != "closed":
        return False
    return not sig.linking.row(sid)


class _ParityUnion:
    """Union-find with parity: tracks whether two strands' orientation flips
    must agree (+1) or differ (-1)."""

    def __init__(self):
        self.parent: dict[str, str] = {}
        self.parity: dict[str, int] = {}

    def find(self, x: str) -> tuple[str, int]:
        if x not in self.parent:
            self.parent[x] = x
            self.parity[x] = 1
            return x, 1
        if self.parent[x] == x:
            return x, 1
        root, p = self.find(self.parent[x])
        self.parent[x] = root
        self.parity[x] *= p
        return root, self.parity[x]

    def union(self, a: str, b: str, rel: int) -> bool:
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        if ra == rb:
            return pa * pb == rel
        self.parent[ra] = rb
        self.parity[ra] = pa * pb * rel
        return True


def linking_entries_equivalent(e1: dict[tuple[str, str], int],
                               e2: dict[tuple[str, str], int]) -> str | None:
    """None if the matrices are equal modulo per-strand orientation flips
    (a physical defect loop carries no intrinsic traversal direction), else
    a message naming the first discrepancy."""
    keys = set(e1) | set(e2)
    dsu = _ParityUnion()
    for key in sorted(keys):
        v1, v2 = e1.get(key, 0), e2.get(key, 0)
        if abs(v1) != abs(v2):
            return f"linking{key} magnitudes differ: {v1} vs {v2}"
        if v1 == 0:
            continue
        if not dsu.union(key[0], key[1], 1 if v1 == v2 else -1):
            return f"linking sign structure differs at {key}: {v1} vs {v2}"
    return None


def signatures_equal(s1: TopoSignature, s2: TopoSignature) -> SignatureDiff:
    """Equality up to removal of null strands (closed, port-free, all-zero
    linking row) and per-strand orientation sign flips; returns a diff report
    naming every discrepancy."""
    diff = SignatureDiff()
    if s1.ports != s2.ports:
        diff.add(f"ports differ: {s1.ports} vs {s2.ports}")
    r1, r2 = s1.registry_dict(), s2.registry_dict()
    for sid in sorted(set(r1) | set(r2)):
        if sid in r1 and sid in r2:
            if r1[sid] != r2[sid]:
                diff.add(f"strand {sid} registry differs: {r1[sid]} vs {r2[sid]}")
        else:
            present, name = (s1, "first") if sid in r1 else (s2, "second")
            if not _is_null_in(present, sid):
                diff.add(f"non-null strand {sid} only in {name} signature")
    common = set(r1) & set(r2)
    e1 = {k: v for k, v in s1.linking.as_dict().items()
          if k[0] in common and k[1] in common}
    e2 = {k: v for k, v in s2.linking.as_dict().items()
          if k[0] in common and k[1] in common}
    problem = linking_entries_equivalent(e1, e2)
    if problem is not None:
        diff.add(problem)
    return diff


def signature_to_text(sig: TopoSignature) -> str:
    """Canonical structured-text export (same conventions as .tqc)."""
    import json
    obj = {
        "version": 1,
        "ports": [
            {"name": n, "face": f, "position": list(p)} for n, f, p in sig.ports
        ],
        "strands": {
            sid: {"kind": kind, "closure": closure, "meta": dict(meta)}
            for sid, (kind, closure, meta) in sig.registry
        },
        "linking": [
            {"pair": list(pair), "lk": v} for pair, v in sig.linking.entries
        ],
    }
    return json.dumps(obj, indent=1) + "\n"
