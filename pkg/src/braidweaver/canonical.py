"""Lowering ICM circuits to the unoptimized canonical defect geometry.

Each qubit line becomes a primal rectangle loop running the full temporal
extent; each CNOT becomes a dual ring standing in its own temporal slot,
threading between the rails of its control and target loops so the linking
pattern is exactly {ring <-> control, ring <-> target} = +-1 and everything
else 0.  Intermediate loops are pierced by both rails with cancelling signs.

Coordinates are kept non-negative: qubit loops live in the plane z=1 and
rings span z in [0,2].
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import (
    Bounds,
    DefectStrand,
    LatticePoint,
    PortLabel,
    TopoCircuit,
)
from .icm import ICMCircuit, IcmError, validate_icm

LOOP_Z = 1  # plane of the qubit loops; rings span [LOOP_Z-1, LOOP_Z+1]


@dataclass(frozen=True)
class CanonicalLayoutParams:
    rail_gap: int = 2      # y distance between a loop's two rails
    qubit_pitch: int = 4   # y spacing between successive qubit loops
    slot_pitch: int = 2    # x spacing between successive CNOT rings

    def __post_init__(self):
        for name in ("rail_gap", "qubit_pitch", "slot_pitch"):
            v = getattr(self, name)
            if v < 2 or v % 2 != 0:
                raise ValueError(f"{name} must be an even integer >= 2, got {v}")


def layout_canonical(c: ICMCircuit,
                     p: CanonicalLayoutParams = CanonicalLayoutParams()) -> TopoCircuit:
    """Deterministic canonical geometry for a valid ICM circuit."""
    rep = validate_icm(c)
    if not rep.ok:
        raise IcmError(rep.violations[0].code, str(rep.violations[0]))

    n = c.num_qubits
    m = c.cnot_count
    x_end = p.slot_pitch * m + 2
    bounds = Bounds(x_end, max(0, p.qubit_pitch * (n - 1) + p.rail_gap), LOOP_Z + 1)

    # init/measure bases per wire, recorded as opaque strand labels
    bases: dict[int, dict[str, str]] = {q: {} for q in range(n)}
    cnot_order: list[tuple[int, int]] = []
    for e in c.events:
        if e.kind == "init":
            bases[e.qubits[0]]["init"] = e.basis
        elif e.kind == "measure":
            bases[e.qubits[0]]["measure"] = e.basis
            if e.flag:
                bases[e.qubits[0]]["flag"] = e.flag
        else:
            cnot_order.append((e.qubits[0], e.qubits[1]))

    strands: list[DefectStrand] = []
    ports: list[PortLabel] = []
    for q in range(n):
        lo = p.qubit_pitch * q
        hi = lo + p.rail_gap
        meta = dict(bases[q])
        meta["line"] = str(q)
        is_in = q in c.inputs
        is_out = q in c.outputs
        pt = lambda x, y: LatticePoint(x, y, LOOP_Z)
        if is_in and is_out:
            for tag, y in (("lo", lo), ("hi", hi)):
                pin = PortLabel(f"q{q}.in.{tag}", pt(0, y), "input")
                pout = PortLabel(f"q{q}.out.{tag}", pt(x_end, y), "output")
                ports += [pin, pout]
                strands.append(DefectStrand(
                    id=f"q{q}.{tag}", kind="primal",
                    path=(pt(0, y), pt(x_end, y)),
                    closure="open", ports=(pin.name, pout.name), meta=meta))
        elif is_in:
            pa = PortLabel(f"q{q}.in.lo", pt(0, lo), "input")
            pb = PortLabel(f"q{q}.in.hi", pt(0, hi), "input")
            ports += [pa, pb]
            strands.append(DefectStrand(
                id=f"q{q}", kind="primal",
                path=(pt(0, lo), pt(x_end, lo), pt(x_end, hi), pt(0, hi)),
                closure="open", ports=(pa.name, pb.name), meta=meta))
        elif is_out:
            pa = PortLabel(f"q{q}.out.lo", pt(x_end, lo), "output")
            pb = PortLabel(f"q{q}.out.hi", pt(x_end, hi), "output")
            ports += [pa, pb]
            strands.append(DefectStrand(
                id=f"q{q}", kind="primal",
                path=(pt(x_end, lo), pt(0, lo), pt(0, hi), pt(x_end, hi)),
                closure="open", ports=(pa.name, pb.name), meta=meta))
        else:
            strands.append(DefectStrand(
                id=f"q{q}", kind="primal",
                path=(pt(0, lo), pt(x_end, lo), pt(x_end, hi), pt(0, hi)),
                closure="closed", meta=meta))

    half_gap = p.rail_gap // 2
    for k, (cq, tq) in enumerate(cnot_order):
        a, b = sorted((cq, tq))
        x = p.slot_pitch * k + p.slot_pitch // 2
        if x % 2 == 0:
            x += 1  # keep ring planes off the loop corner planes
        y_lo = p.qubit_pitch * a + half_gap
        y_hi = p.qubit_pitch * b + half_gap
        strands.append(DefectStrand(
            id=f"cnot{k}", kind="dual",
            path=(
                LatticePoint(x, y_lo, LOOP_Z - 1),
                LatticePoint(x, y_hi, LOOP_Z - 1),
                LatticePoint(x, y_hi, LOOP_Z + 1),
                LatticePoint(x, y_lo, LOOP_Z + 1),
            ),
            closure="closed",
            meta={"control": str(cq), "target": str(tq), "slot": str(k)}))

    return TopoCircuit(tuple(strands), bounds, tuple(ports))


def expected_linking_pattern(c: ICMCircuit) -> dict[tuple[str, str], int]:
    """The closed-form |linking| pattern the canonical layout realizes:
    entry 1 for every (ring, endpoint-loop) pair, nothing else, with one
    geometric exception: a line designated both input and output is laid out
    as two separate open rails, so a ring spanning across it threads each
    rail once (the closed-loop double-puncture cancellation needs the two
    rails joined)."""
    out: dict[tuple[str, str], int] = {}
    k = 0
    split = {q for q in c.inputs & c.outputs}
    for e in c.events:
        if e.kind != "cnot":
            continue
        lo_q, hi_q = sorted(e.qubits)
        for q in e.qubits:
            tag = f"q{q}"
            if q in split:
                # endpoint split line: only the rail inside the span threads
                tag = f"q{q}.hi" if q == lo_q else f"q{q}.lo"
            key = tuple(sorted((f"cnot{k}", tag)))
            out[key] = 1  # type: ignore[index]
        for q in split:
            if lo_q < q < hi_q:  # split spectator: both rails thread the ring
                for rail in ("lo", "hi"):
                    key = tuple(sorted((f"cnot{k}", f"q{q}.{rail}")))
                    out[key] = 1  # type: ignore[index]
        k += 1
    return out  # type: ignore[return-value]


def canonical_volume(n: int, m: int, p: CanonicalLayoutParams = CanonicalLayoutParams()) -> int:
    """Tight bounding volume of the canonical layout (the optimizer's start)."""
    if n == 0:
        return 0
    ex = p.slot_pitch * m + 2
    ey = max(1, p.qubit_pitch * (n - 1) + p.rail_gap)
    ez = 2 if m >= 1 else 1
    return ex * ey * ez
