"""Shared generators for the test suite: random ICM circuits, random
rectilinear loops (deformed by real slide moves), and slack padding
(hairpin corridors and unlinked decoration loops)."""

from __future__ import annotations

import random
from dataclasses import replace

from braidweaver.canonical import layout_canonical
from braidweaver.geometry import (
    Bounds,
    DefectStrand,
    LatticePoint,
    TopoCircuit,
    occupied_pieces,
    segment_points,
    validate_geometry,
)
from braidweaver.icm import CliffordGate, ICMCircuit, ICMEvent, clifford_t_to_icm
from braidweaver.moves import DIRECTION_ORDER, Move, _apply_unchecked, check_slide
from braidweaver.topology import _loop_points


def rand_icm(rng: random.Random, n_max: int = 6, m_max: int = 10,
             io: bool = False) -> ICMCircuit:
    """Random valid ICM circuit with n <= n_max lines and m <= m_max CNOTs."""
    n = rng.randint(1, n_max)
    m = rng.randint(0, m_max) if n >= 2 else 0
    events = [ICMEvent.init(q, rng.choice(("Z0", "X+", "A", "Y"))) for q in range(n)]
    for _ in range(m):
        c, t = rng.sample(range(n), 2)
        events.append(ICMEvent.cnot(c, t))
    for q in range(n):
        events.append(ICMEvent.measure(q, rng.choice(("Z", "X"))))
    inputs: set[int] = set()
    outputs: set[int] = set()
    if io:
        for q in range(n):
            if rng.random() < 0.3:
                inputs.add(q)
            if rng.random() < 0.3:
                outputs.add(q)
    return ICMCircuit(n, tuple(events), "rand",
                      frozenset(inputs), frozenset(outputs))


def rand_clifford_gates(rng: random.Random, n: int, count: int) -> list[CliffordGate]:
    gates = []
    for _ in range(count):
        kind = rng.choice(("H", "P", "T", "CNOT"))
        if kind == "CNOT" and n >= 2:
            gates.append(CliffordGate("CNOT", tuple(rng.sample(range(n), 2))))
        elif kind != "CNOT":
            gates.append(CliffordGate(kind, (rng.randrange(n),)))
    return gates


# --- random loops for the linking fuzz ---------------------------------------

#: fuzz loops live and wander inside this box; checked slides keep them there
_FUZZ_BOX = Bounds(20, 20, 20)
Loop = tuple[LatticePoint, ...]


def _rect_in_plane(normal: int, base: list[int], du: int, dv: int) -> Loop:
    u, v = [i for i in range(3) if i != normal]
    verts = []
    for (a, b) in ((0, 0), (du, 0), (du, dv), (0, dv)):
        q = list(base)
        q[u] += a
        q[v] += b
        verts.append(LatticePoint(*q))
    return tuple(verts)


def _joint_deform(rng: random.Random, loops: list[Loop], slides: int) -> list[Loop]:
    """Random checked slides on a multi-strand circuit: sweeps avoid every
    strand and stay inside the fuzz box, so pairwise linking is exactly
    preserved while shapes wander without escaping."""
    strands = tuple(DefectStrand(id=f"s{i}", kind="primal", path=lp)
                    for i, lp in enumerate(loops))
    c = TopoCircuit(strands, _FUZZ_BOX)
    for _ in range(slides):
        sid = f"s{rng.randrange(len(loops))}"
        s = c.strand(sid)
        if len(s.path) >= 22:
            continue
        seg = rng.randrange(len(s.segments()))
        d = rng.choice(DIRECTION_ORDER)
        dist = rng.randint(1, 2)
        if check_slide(c, sid, seg, d, dist).ok:
            c = _apply_unchecked(c, Move.slide(sid, seg, d, dist))
    return [c.strand(f"s{i}").path for i in range(len(loops))]


def _deformed_loop(rng: random.Random, slides: int = 5) -> Loop:
    base = _rect_in_plane(rng.randrange(3), [7, 7, 7],
                          rng.randint(1, 6), rng.randint(1, 6))
    return _joint_deform(rng, [base], slides)[0]


def _threaded_seed(rng: random.Random) -> tuple[Loop, Loop]:
    """Rectangles in perpendicular planes; roughly half the time the second
    pierces the first's disk exactly once (|lk| = 1)."""
    du, dv = rng.randint(2, 5), rng.randint(2, 5)
    a = _rect_in_plane(2, [6, 6, 10], du, dv)  # plane z=10, hole in x/y
    by = 6 + rng.randint(1, dv - 1)
    inside_x = 6 + rng.randint(1, du - 1)
    outside_x = 6 + du + rng.randint(1, 3)
    if rng.random() < 0.45:
        bx1, bx2 = outside_x, outside_x + rng.randint(1, 3)  # misses the hole
    else:
        bx1, bx2 = inside_x, outside_x  # threads it once
    e, f = rng.randint(1, 4), rng.randint(1, 4)
    b = (LatticePoint(bx1, by, 10 - e), LatticePoint(bx2, by, 10 - e),
         LatticePoint(bx2, by, 10 + f), LatticePoint(bx1, by, 10 + f))
    return a, b


def _translated(loop: Loop, off: tuple[int, int, int]) -> Loop:
    return tuple(LatticePoint(p.x + off[0], p.y + off[1], p.z + off[2]) for p in loop)


def loop_pool(rng: random.Random, size: int = 160) -> list[Loop]:
    return [_deformed_loop(rng) for _ in range(size)]


def pair_pool(rng: random.Random, size: int = 120,
              slides: int = 6) -> list[tuple[Loop, Loop]]:
    out = []
    for _ in range(size):
        a, b = _threaded_seed(rng)
        a, b = _joint_deform(rng, [a, b], slides)
        out.append((a, b))
    return out


def _offset_within_box(rng: random.Random, loop: Loop, spread: int,
                       hi: int = 20) -> tuple[int, int, int]:
    """Random offset keeping the loop inside [0, hi]^3."""
    off = []
    for ax in range(3):
        vals = [p[ax] for p in loop]
        lo_ok, hi_ok = -min(vals), hi - max(vals)
        off.append(rng.randint(max(-spread, lo_ok), min(spread, hi_ok)))
    return tuple(off)  # type: ignore[return-value]


def rand_loop_pair(rng: random.Random, singles: list[Loop],
                   pairs: list[tuple[Loop, Loop]]) -> tuple[Loop, Loop]:
    """A random disjoint loop pair inside the 20^3 fuzz box: either a deformed
    threaded pair under a small jitter, or two independent loops thrown
    together."""
    while True:
        if pairs and rng.random() < 0.7:
            a, b = rng.choice(pairs)
            off = _offset_within_box(rng, b, 1)
        else:
            a = rng.choice(singles)
            b = rng.choice(singles)
            off = _offset_within_box(rng, b, 7)
        b2 = _translated(b, off)  # type: ignore[arg-type]
        if not (_loop_points(a) & _loop_points(b2)):
            return a, b2


# --- slack padding -------------------------------------------------------------

def grow_bounds(c: TopoCircuit, pad: int = 3) -> TopoCircuit:
    """Room to maneuver: enlarge declared bounds without touching geometry."""
    b = c.bounds
    return TopoCircuit(c.strands, Bounds(b.x, b.y + pad, b.z + pad), c.ports)


def _free(c: TopoCircuit, pts) -> bool:
    occ = occupied_pieces(c)
    return all(p not in occ and c.bounds.contains(p) for p in pts)


def add_hairpin(c: TopoCircuit, rng: random.Random,
                span: int | None = None) -> TopoCircuit | None:
    """Graft a depth-1 hairpin corridor onto some strand segment, in free
    space.  Span-1 corridors have facing walls at distance 1 (bridgeable);
    span-2 corridors collapse via a single slide.  Returns None if nothing
    fits."""
    strands = list(c.strands)
    rng.shuffle(strands)
    spans = (span,) if span else (1, 2)
    for s in strands:
        segs = s.segments()
        order = list(range(len(segs)))
        rng.shuffle(order)
        for seg in order:
            a, b = segs[seg]
            pts = segment_points(a, b)
            w = rng.choice(spans)
            if len(pts) < w + 1:
                continue
            k = rng.randrange(len(pts) - w)
            p, q = pts[k], pts[k + w]
            dirs = list(DIRECTION_ORDER)
            rng.shuffle(dirs)
            for d in dirs:
                roof = [pts[k + j] + d for j in range(w + 1)]
                if not _free(c, roof):
                    continue
                detour = [p, roof[0], roof[-1], q]
                new_path = _splice_detour(s, seg, detour)
                if new_path is None:
                    continue
                cand = c.with_strand_replaced(s.id, replace(s, path=new_path))
                if validate_geometry(cand).ok:
                    return cand
    return None


def _splice_detour(s: DefectStrand, seg: int, detour: list[LatticePoint]):
    """Insert detour corners right after segment ``seg``'s start vertex."""
    from braidweaver.geometry import normalize_path
    out: list[LatticePoint] = []
    for i in range(len(s.path)):
        out.append(s.path[i])
        if i == seg:
            out.extend(detour)
    path = normalize_path(out, closed=s.is_closed)
    uniq = set()
    for v in path:
        if v in uniq:
            return None
        uniq.add(v)
    return path


def add_decoration(c: TopoCircuit, rng: random.Random) -> TopoCircuit | None:
    """Drop an unlinked 1x1 decoration loop into free space."""
    b = c.bounds
    occ = occupied_pieces(c)
    kinds = ("primal", "dual")
    for _ in range(200):
        x = rng.randint(0, max(0, b.x - 1))
        y = rng.randint(0, max(0, b.y - 1))
        z = rng.randint(0, b.z)
        pts = [LatticePoint(x, y, z), LatticePoint(x + 1, y, z),
               LatticePoint(x + 1, y + 1, z), LatticePoint(x, y + 1, z)]
        if all(p not in occ and b.contains(p) for p in pts):
            deco = DefectStrand(id=f"deco{sum(1 for s in c.strands if s.id.startswith('deco'))}",
                                kind=rng.choice(kinds), path=tuple(pts))
            cand = TopoCircuit(c.strands + (deco,), b, c.ports)
            if validate_geometry(cand).ok:
                return cand
    return None


def padded_canonical(rng: random.Random, k: int, n: int = 2, m: int = 1
                     ) -> tuple[TopoCircuit, TopoCircuit]:
    """(unpadded, padded-with-k-slack-features) canonical circuit pair."""
    cnots = []
    if n >= 2:
        for _ in range(m):
            c_, t_ = rng.sample(range(n), 2)
            cnots.append(ICMEvent.cnot(c_, t_))
    events = [ICMEvent.init(q, "Z0") for q in range(n)] + cnots + \
        [ICMEvent.measure(q, "Z") for q in range(n)]
    icm = ICMCircuit(n, tuple(events), "pad")
    base = grow_bounds(layout_canonical(icm), pad=4)
    padded = base
    added = 0
    attempts = 0
    while added < k and attempts < 50 * k:
        attempts += 1
        cand = add_hairpin(padded, rng) if rng.random() < 0.5 else \
            add_decoration(padded, rng)
        if cand is not None:
            padded = cand
            added += 1
    if added < k:
        raise RuntimeError(f"could not place {k} slack features")
    return base, padded


# --- incremental signature checking for bulk move fuzzing ----------------------

def signature_parts(c: TopoCircuit):
    """(ports, registry, linking entries) with both backends cross-checked."""
    from braidweaver.topology import linking_matrix
    ports = tuple((p.name, p.face, p.position) for p in c.ports)
    registry = {s.id: (s.kind, s.closure, s.meta) for s in c.strands}
    entries = dict(linking_matrix(c, cross_check=True).entries)
    return ports, registry, entries


def move_preserves_signature(before_parts, move, after: TopoCircuit) -> str | None:
    """Row-level signature comparison after one move; None if preserved, else
    a message.  Only the moved strand's rows are recomputed (everything else
    is geometrically untouched), which keeps 10^4-move suites fast."""
    from braidweaver.topology import linking_entries_equivalent, linking_rows_for
    ports, registry, entries = before_parts
    after_ports = tuple((p.name, p.face, p.position) for p in after.ports)
    if after_ports != ports:
        return f"ports changed: {ports} -> {after_ports}"
    after_registry = {s.id: (s.kind, s.closure, s.meta) for s in after.strands}
    common = set(registry) & set(after_registry)
    for sid in common:
        if registry[sid] != after_registry[sid]:
            return f"registry changed for {sid}"
    for sid in set(after_registry) - set(registry):
        return f"unexpected new strand {sid}"
    for sid in set(registry) - set(after_registry):
        # removed strands must have been null before
        if any(sid in k for k in entries):
            return f"non-null strand {sid} vanished"
        kind, closure, _ = registry[sid]
        if closure != "closed":
            return f"open strand {sid} vanished"
    before_common = {k: v for k, v in entries.items()
                     if k[0] in common and k[1] in common}
    kept = {k: v for k, v in before_common.items() if move.strand not in k}
    touched = {move.strand} & set(after_registry)
    new_rows = linking_rows_for(after, touched, cross_check=True)
    new_rows = {k: v for k, v in new_rows.items()
                if k[0] in common and k[1] in common}
    return linking_entries_equivalent(before_common, {**kept, **new_rows})
