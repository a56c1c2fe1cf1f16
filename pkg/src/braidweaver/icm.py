"""Circuits in initialize / CNOT / measure normal form.

The ``.icm`` text format is line-oriented (``;`` also separates statements):

    qubits N
    input q          # optional: leave this line's start open as boundary ports
    output q         # optional: same for the temporal end
    init q BASIS     # BASIS in {Z0, X+, A, Y}
    cnot c t
    measure q BASIS [flag]   # BASIS in {Z, X}; flag names a classical correction

Corrections are recorded as named flags on measurements; downstream geometry
renders the deterministic branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import ValidityReport

INIT_BASES = ("Z0", "X+", "A", "Y")
MEASURE_BASES = ("Z", "X")


class IcmError(ValueError):
    def __init__(self, code: str, message: str, line: int | None = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{code}: {message}{where}")
        self.code = code
        self.line = line


@dataclass(frozen=True)
class ICMEvent:
    kind: str  # "init" | "cnot" | "measure"
    qubits: tuple[int, ...]
    basis: str = ""
    flag: str = ""

    @staticmethod
    def init(q: int, basis: str) -> "ICMEvent":
        return ICMEvent("init", (q,), basis)

    @staticmethod
    def cnot(control: int, target: int) -> "ICMEvent":
        return ICMEvent("cnot", (control, target))

    @staticmethod
    def measure(q: int, basis: str, flag: str = "") -> "ICMEvent":
        return ICMEvent("measure", (q,), basis, flag)


@dataclass(frozen=True)
class ICMCircuit:
    num_qubits: int
    events: tuple[ICMEvent, ...]
    name: str = ""
    inputs: frozenset[int] = field(default_factory=frozenset)
    outputs: frozenset[int] = field(default_factory=frozenset)

    @property
    def cnot_count(self) -> int:
        return sum(1 for e in self.events if e.kind == "cnot")


def validate_icm(c: ICMCircuit) -> ValidityReport:
    """Every ordering and index violation, as diagnostics."""
    rep = ValidityReport()
    inited: set[int] = set()
    measured: set[int] = set()

    def check_index(q: int, what: str) -> bool:
        if not 0 <= q < c.num_qubits:
            rep.add("bad-index", f"{what} references qubit {q} outside 0..{c.num_qubits - 1}")
            return False
        return True

    for i, e in enumerate(c.events):
        if e.kind == "init":
            q = e.qubits[0]
            if not check_index(q, f"init #{i}"):
                continue
            if e.basis not in INIT_BASES:
                rep.add("bad-basis", f"init #{i} basis {e.basis!r}")
            if q in inited:
                rep.add("double-init", f"qubit {q} initialized twice (event #{i})")
            if q in measured:
                rep.add("use-after-measure", f"init of qubit {q} after its measurement")
            inited.add(q)
        elif e.kind == "cnot":
            cq, tq = e.qubits
            ok = check_index(cq, f"cnot #{i}") & check_index(tq, f"cnot #{i}")
            if cq == tq:
                rep.add("cnot-self-target", f"cnot #{i} uses qubit {cq} as control and target")
            if ok:
                for q in (cq, tq):
                    if q not in inited:
                        rep.add("use-before-init", f"cnot #{i} touches uninitialized qubit {q}")
                    if q in measured:
                        rep.add("use-after-measure", f"cnot #{i} touches measured qubit {q}")
        elif e.kind == "measure":
            q = e.qubits[0]
            if not check_index(q, f"measure #{i}"):
                continue
            if e.basis not in MEASURE_BASES:
                rep.add("bad-basis", f"measure #{i} basis {e.basis!r}")
            if q not in inited:
                rep.add("use-before-init", f"measure of qubit {q} before init")
            if q in measured:
                rep.add("double-measure", f"qubit {q} measured twice (event #{i})")
            measured.add(q)
        else:
            rep.add("bad-event", f"unknown event kind {e.kind!r}")
    for q in range(c.num_qubits):
        if q not in inited:
            rep.add("missing-init", f"qubit {q} never initialized")
        if q not in measured:
            rep.add("missing-measure", f"qubit {q} never measured")
    for q in sorted(c.inputs | c.outputs):
        check_index(q, "input/output designation")
    return rep


def parse_icm(text: str, name: str = "") -> ICMCircuit:
    """Parse the .icm format; raises IcmError with a line number on failure."""
    num_qubits: int | None = None
    events: list[ICMEvent] = []
    inputs: set[int] = set()
    outputs: set[int] = set()

    def fail(code: str, msg: str, line_no: int):
        raise IcmError(code, msg, line_no)

    def parse_int(tok: str, line_no: int, what: str) -> int:
        try:
            return int(tok)
        except ValueError:
            fail("syntax", f"{what} must be an integer, got {tok!r}", line_no)

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        for stmt in line.split(";"):
            toks = stmt.split()
            if not toks:
                continue
            op, args = toks[0].lower(), toks[1:]
            if op == "qubits":
                if num_qubits is not None:
                    fail("syntax", "duplicate qubits header", line_no)
                if len(args) != 1:
                    fail("syntax", "qubits takes one count", line_no)
                num_qubits = parse_int(args[0], line_no, "qubit count")
                if num_qubits < 0:
                    fail("syntax", "qubit count must be >= 0", line_no)
                continue
            if num_qubits is None:
                fail("syntax", "statement before 'qubits N' header", line_no)
            if op in ("input", "output"):
                if len(args) != 1:
                    fail("syntax", f"{op} takes one qubit index", line_no)
                q = parse_int(args[0], line_no, "qubit index")
                (inputs if op == "input" else outputs).add(q)
            elif op == "init":
                if len(args) != 2:
                    fail("syntax", "init takes: qubit basis", line_no)
                q = parse_int(args[0], line_no, "qubit index")
                if args[1] not in INIT_BASES:
                    fail("bad-basis", f"init basis {args[1]!r} not in {INIT_BASES}", line_no)
                events.append(ICMEvent.init(q, args[1]))
            elif op == "cnot":
                if len(args) != 2:
                    fail("syntax", "cnot takes: control target", line_no)
                cq = parse_int(args[0], line_no, "control")
                tq = parse_int(args[1], line_no, "target")
                if cq == tq:
                    fail("cnot-self-target", f"cnot {cq} {tq} targets its own control", line_no)
                events.append(ICMEvent.cnot(cq, tq))
            elif op == "measure":
                if len(args) not in (2, 3):
                    fail("syntax", "measure takes: qubit basis [flag]", line_no)
                q = parse_int(args[0], line_no, "qubit index")
                if args[1] not in MEASURE_BASES:
                    fail("bad-basis", f"measure basis {args[1]!r} not in {MEASURE_BASES}", line_no)
                flag = args[2] if len(args) == 3 else ""
                events.append(ICMEvent.measure(q, args[1], flag))
            else:
                fail("syntax", f"unknown statement {op!r}", line_no)

    if num_qubits is None:
        raise IcmError("syntax", "missing 'qubits N' header", 1)
    circuit = ICMCircuit(num_qubits, tuple(events), name,
                         frozenset(inputs), frozenset(outputs))
    rep = validate_icm(circuit)
    if not rep.ok:
        first = rep.violations[0]
        raise IcmError(first.code, first.message)
    return circuit


def print_icm(c: ICMCircuit) -> str:
    """Canonical printer; parse(print(c)) == c and re-printing is byte-identical."""
    lines = [f"qubits {c.num_qubits}"]
    lines += [f"input {q}" for q in sorted(c.inputs)]
    lines += [f"output {q}" for q in sorted(c.outputs)]
    for e in c.events:
        if e.kind == "init":
            lines.append(f"init {e.qubits[0]} {e.basis}")
        elif e.kind == "cnot":
            lines.append(f"cnot {e.qubits[0]} {e.qubits[1]}")
        else:
            flag = f" {e.flag}" if e.flag else ""
            lines.append(f"measure {e.qubits[0]} {e.basis}{flag}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CliffordGate:
    kind: str  # "H" | "P" | "T" | "CNOT"
    qubits: tuple[int, ...]


def _gadget(kind: str) -> tuple[str, str, str]:
    """(ancilla init basis, old-wire measure basis, flag prefix) per gate."""
    return {
        "T": ("A", "Z", "t"),
        "P": ("Y", "Z", "p"),
        "H": ("X+", "X", "h"),
    }[kind]


def clifford_t_to_icm(gates: list[CliffordGate], n: int, name: str = "") -> ICMCircuit:
    """Lower an H/P/T/CNOT gate list to ICM form.

    Each H, P or T teleports its qubit through one fresh ancilla: the ancilla
    is initialized in the gate's resource basis, one CNOT couples old wire to
    ancilla, the old wire is measured with a named correction flag, and the
    ancilla becomes the qubit's carrier.  CNOT passes through on the current
    carriers.  Ancilla count is therefore #T + #P + #H.
    """
    for g in gates:
        for q in g.qubits:
            if not 0 <= q < n:
                raise IcmError("bad-index", f"gate {g.kind} references qubit {q}")
        if g.kind == "CNOT":
            if len(g.qubits) != 2 or g.qubits[0] == g.qubits[1]:
                raise IcmError("cnot-self-target", f"bad CNOT qubits {g.qubits}")
        elif g.kind in ("H", "P", "T"):
            if len(g.qubits) != 1:
                raise IcmError("bad-gate", f"{g.kind} takes one qubit")
        else:
            raise IcmError("bad-gate", f"unsupported gate {g.kind!r}")

    carrier = list(range(n))
    events = [ICMEvent.init(q, "Z0") for q in range(n)]
    next_wire = n
    counts = {"T": 0, "P": 0, "H": 0}
    for g in gates:
        if g.kind == "CNOT":
            events.append(ICMEvent.cnot(carrier[g.qubits[0]], carrier[g.qubits[1]]))
            continue
        basis, mbasis, prefix = _gadget(g.kind)
        counts[g.kind] += 1
        anc = next_wire
        next_wire += 1
        old = carrier[g.qubits[0]]
        events.append(ICMEvent.init(anc, basis))
        events.append(ICMEvent.cnot(old, anc))
        events.append(ICMEvent.measure(old, mbasis, f"{prefix}{counts[g.kind]}"))
        carrier[g.qubits[0]] = anc
    for q in range(n):
        events.append(ICMEvent.measure(carrier[q], "Z"))
    return ICMCircuit(next_wire, tuple(events), name)
