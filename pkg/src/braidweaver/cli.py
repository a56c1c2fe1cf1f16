"""Command-line frontend.

Exit codes: 0 success, 1 semantic failure (invalid input, unequal
signatures, unreachable target), 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .canonical import CanonicalLayoutParams, layout_canonical
from .geometry import (
    bounding_volume,
    circuit_from_tqc,
    circuit_to_tqc,
    occupied_count,
    validate_geometry,
)
from .icm import IcmError, parse_icm, validate_icm
from .moves import MoveError, MoveLog, replay
from .optimizer import AnnealParams, BeamParams, OptimizeResult, SearchConfig, optimize
from .resources import CODES, ErrorModel, ResourceError, estimate, qubits_per_piece, \
    steps_per_piece
from .topology import TopologyError, linking_matrix, signature, signatures_equal, \
    signature_to_text

EXIT_OK = 0
EXIT_SEMANTIC = 1
EXIT_USAGE = 2
EXIT_IO = 3


class _CliParser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise _IoError(f"cannot read {path}: {e}") from None


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise _IoError(f"cannot write {path}: {e}") from None


class _IoError(Exception):
    pass


def _load_circuit(path: str):
    return circuit_from_tqc(_read(path))


def _emit(payload: dict, as_json: bool, text_lines: list[str]) -> None:
    if as_json:
        print(json.dumps(payload, indent=1, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _cmd_compile(args) -> int:
    icm = parse_icm(_read(args.input), name=Path(args.input).stem)
    params = CanonicalLayoutParams()
    circuit = layout_canonical(icm, params)
    _write(args.output, circuit_to_tqc(circuit))
    print(f"compiled {args.input}: {icm.num_qubits} lines, {icm.cnot_count} cnots "
          f"-> volume {bounding_volume(circuit)} ({args.output})")
    return EXIT_OK


def _cmd_validate(args) -> int:
    text = _read(args.input)
    if args.input.endswith(".icm"):
        try:
            icm = parse_icm(text)
        except IcmError as e:
            _emit({"ok": False, "errors": [str(e)]}, args.format == "json",
                  [f"invalid: {e}"])
            return EXIT_SEMANTIC
        rep = validate_icm(icm)
    else:
        rep = validate_geometry(circuit_from_tqc(text))
    payload = {"ok": rep.ok, "errors": [str(v) for v in rep.violations]}
    _emit(payload, args.format == "json",
          ["ok"] if rep.ok else [str(v) for v in rep.violations])
    return EXIT_OK if rep.ok else EXIT_SEMANTIC


def _cmd_verify(args) -> int:
    sig_a = signature(_load_circuit(args.first))
    sig_b = signature(_load_circuit(args.second))
    diff = signatures_equal(sig_a, sig_b)
    payload = {"equal": diff.equal, "differences": diff.differences}
    _emit(payload, args.format == "json",
          ["signatures equal"] if diff.equal else
          ["signatures differ:"] + [f"  {d}" for d in diff.differences])
    return EXIT_OK if diff.equal else EXIT_SEMANTIC


def _cmd_lk(args) -> int:
    c = _load_circuit(args.input)
    rep = validate_geometry(c)
    if not rep.ok:
        print(f"invalid circuit: {rep}", file=sys.stderr)
        return EXIT_SEMANTIC
    m = linking_matrix(c)
    if args.format == "json":
        print(json.dumps({
            "strands": list(m.strand_ids),
            "entries": [{"pair": list(k), "lk": v} for k, v in m.entries],
        }, indent=1))
    elif args.signature:
        print(signature_to_text(signature(c)), end="")
    else:
        print(f"strands: {' '.join(m.strand_ids)}")
        if not m.entries:
            print("all pairwise linking numbers are 0")
        for (a, b), v in m.entries:
            print(f"lk({a},{b}) = {v}")
    return EXIT_OK


def _cmd_optimize(args) -> int:
    c = _load_circuit(args.input)
    rep = validate_geometry(c)
    if not rep.ok:
        print(f"invalid circuit: {rep}", file=sys.stderr)
        return EXIT_SEMANTIC
    cfg = SearchConfig(
        strategy=args.strategy,
        seed=args.seed,
        max_steps=args.max_steps,
        objective=args.objective,
        anneal=AnnealParams(t0=args.t0, cooling=args.cooling,
                            steps_per_temp=args.steps_per_temp),
        beam=BeamParams(width=args.beam_width),
        workers=args.workers,
    )
    result: OptimizeResult = optimize(c, cfg)
    _write(args.output, circuit_to_tqc(result.final))
    if args.emit_log:
        _write(args.emit_log, result.log.to_text())
    if args.emit_trace:
        _write(args.emit_trace, result.trace_csv())
    print(f"{args.strategy}: {result.initial_volume} -> {result.final_volume} "
          f"({result.steps_taken} steps, {len(result.log.moves)} moves kept)")
    return EXIT_OK


def _cmd_estimate(args) -> int:
    c = _load_circuit(args.input)
    model = ErrorModel(p_phys=args.p, p_th=args.p_th, prefactor=args.prefactor)
    report = estimate(c, args.code, model, args.eps, d=args.d)
    if args.sweep_csv:
        lines = ["d,qubits_per_piece,steps_per_piece,total_qubits,total_steps"]
        for d in range(3, args.sweep_max + 1, 2):
            r = estimate(c, args.code, model, args.eps, d=d)
            lines.append(f"{d},{qubits_per_piece(args.code, d)},"
                         f"{steps_per_piece(args.code, d)},{r.qubits},{r.time_steps}")
        _write(args.sweep_csv, "\n".join(lines) + "\n")
    payload = {
        "code": report.code, "d": report.d, "qubits": report.qubits,
        "time_steps": report.time_steps, "volume_pieces": report.volume_pieces,
        "p_phys": args.p, "p_th": args.p_th, "prefactor": args.prefactor,
        "eps": args.eps,
    }
    _emit(payload, args.format == "json", report.lines())
    return EXIT_OK


def _cmd_replay(args) -> int:
    base = _load_circuit(args.base)
    log = MoveLog.from_text(_read(args.log))
    final = replay(base, log)
    _write(args.output, circuit_to_tqc(final))
    print(f"replayed {len(log.moves)} moves -> volume {bounding_volume(final)}, "
          f"occupied {occupied_count(final)} ({args.output})")
    return EXIT_OK


def _cmd_serve(args) -> int:
    from .service import PuzzleServer
    server = PuzzleServer(args.host, args.port, args.data_dir)
    actual_port = server.server_address[1]
    print(f"serving on {args.host}:{actual_port}, data in {args.data_dir}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    import os
    p = _CliParser(prog="braidweaver",
                   description="compile, compress, and cost out defect-based "
                               "topological circuits")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="lower an .icm circuit to canonical .tqc geometry")
    c.add_argument("input")
    c.add_argument("-o", "--output", required=True)
    c.set_defaults(func=_cmd_compile)

    v = sub.add_parser("validate", help="check an .icm or .tqc file; exit 0 iff clean")
    v.add_argument("input")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.set_defaults(func=_cmd_validate)

    w = sub.add_parser("verify", help="compare two circuits' topological signatures")
    w.add_argument("first")
    w.add_argument("second")
    w.add_argument("--format", choices=("text", "json"), default="text")
    w.set_defaults(func=_cmd_verify)

    k = sub.add_parser("lk", help="print the pairwise linking matrix")
    k.add_argument("input")
    k.add_argument("--format", choices=("text", "json"), default="text")
    k.add_argument("--signature", action="store_true",
                   help="print the full signature export instead")
    k.set_defaults(func=_cmd_lk)

    o = sub.add_parser("optimize", help="compress a .tqc circuit")
    o.add_argument("input")
    o.add_argument("-o", "--output", required=True)
    o.add_argument("--strategy", choices=("greedy", "anneal", "beam"), default="greedy")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--max-steps", type=int, default=200)
    o.add_argument("--objective", choices=("bounding_volume", "occupied_cells"),
                   default="bounding_volume")
    o.add_argument("--t0", type=float, default=5.0)
    o.add_argument("--cooling", type=float, default=0.95)
    o.add_argument("--steps-per-temp", type=int, default=20)
    o.add_argument("--beam-width", type=int, default=4)
    o.add_argument("--workers", type=int, default=1,
                   help="candidate evaluation parallelism; never changes results")
    o.add_argument("--emit-log", metavar="OUT.moves")
    o.add_argument("--emit-trace", metavar="OUT.csv")
    o.set_defaults(func=_cmd_optimize)

    e = sub.add_parser("estimate", help="physical qubit/time costs for a circuit")
    e.add_argument("input")
    e.add_argument("--code", choices=CODES, default="surface")
    e.add_argument("--p", type=float, default=1e-3, help="physical error rate")
    e.add_argument("--p-th", type=float, default=0.01, help="threshold error rate")
    e.add_argument("--prefactor", type=float, default=0.1)
    e.add_argument("--eps", type=float, default=1e-9, help="whole-circuit failure budget")
    e.add_argument("--d", type=int, default=None, help="force a code distance")
    e.add_argument("--sweep-csv", metavar="OUT.csv", help="also write a sweep over d")
    e.add_argument("--sweep-max", type=int, default=25)
    e.add_argument("--format", choices=("text", "json"), default="text")
    e.set_defaults(func=_cmd_estimate)

    r = sub.add_parser("replay", help="re-run a .moves log from its base circuit")
    r.add_argument("base")
    r.add_argument("log")
    r.add_argument("-o", "--output", required=True)
    r.set_defaults(func=_cmd_replay)

    s = sub.add_parser("serve", help="run the puzzle session service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=int(os.environ.get("BW_PORT", "7341")))
    s.add_argument("--data-dir", default=os.environ.get("BW_DATA_DIR", "bw-data"))
    s.set_defaults(func=_cmd_serve)
    return p


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except _IoError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO
    except (IcmError, MoveError, TopologyError, ResourceError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SEMANTIC


def main() -> None:
    sys.exit(cli_main())
