"""Puzzle session service: circuits, move submission, solution trees.

State is an append-only JSON-lines log per puzzle; every accepted move is
fsynced before it is acknowledged, and restart rebuilds every tree by
replaying the logs through the same validation path clients go through.
The server re-validates everything: no client-supplied volume or geometry
is ever trusted.

Wire protocol: newline-delimited JSON request/response over TCP, one
request per line, ``{"v": 1, "op": ...}``; see docs/formats.md.
"""

from __future__ import annotations

import json
import os
import socketserver
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .geometry import (
    TopoCircuit,
    bounding_volume,
    circuit_from_tqc,
    circuit_to_tqc,
    tqc_digest,
    validate_geometry,
)
from .moves import Move, MoveError, MoveLog, apply_move, check_move

PROTOCOL_VERSION = 1


class ServiceError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def move_to_json(m: Move) -> dict:
    if m.kind == "slide":
        return {"kind": "slide", "strand": m.strand, "segment": m.segment,
                "direction": list(m.direction), "distance": m.distance}
    if m.kind == "bridge":
        return {"kind": "bridge", "strand": m.strand, "seg_a": m.seg_a, "seg_b": m.seg_b}
    return {"kind": "delete", "strand": m.strand}


def move_from_json(obj: dict) -> Move:
    try:
        kind = obj["kind"]
        if kind == "slide":
            return Move.slide(str(obj["strand"]), int(obj["segment"]),
                              tuple(int(v) for v in obj["direction"]),
                              int(obj["distance"]))
        if kind == "bridge":
            return Move.bridge(str(obj["strand"]), int(obj["seg_a"]), int(obj["seg_b"]))
        if kind == "delete":
            return Move.delete(str(obj["strand"]))
    except (KeyError, TypeError, ValueError) as e:
        raise ServiceError("bad-move", f"malformed move object: {e}") from None
    raise ServiceError("bad-move", f"unknown move kind {obj.get('kind')!r}")


@dataclass
class TreeNode:
    node_id: str
    parent: str | None
    move: Move | None
    author: str
    volume: int
    circuit: TopoCircuit


@dataclass
class PuzzleState:
    puzzle_id: str
    title: str
    created_at: float
    base: TopoCircuit
    base_tqc: str
    nodes: dict[str, TreeNode] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def root_id(self) -> str:
        return "n0"

    def best(self) -> TreeNode:
        return min(self.nodes.values(), key=lambda n: (n.volume, int(n.node_id[1:])))


class PuzzleStore:
    """Durable store: data_dir/puzzles/<id>.tqc + data_dir/trees/<id>.log."""

    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        (self.root / "puzzles").mkdir(parents=True, exist_ok=True)
        (self.root / "trees").mkdir(parents=True, exist_ok=True)
        self.puzzles: dict[str, PuzzleState] = {}
        self._registry_lock = threading.Lock()
        self._load_all()

    # -- persistence -----------------------------------------------------

    def _tree_log(self, puzzle_id: str) -> Path:
        return self.root / "trees" / f"{puzzle_id}.log"

    def _puzzle_path(self, puzzle_id: str) -> Path:
        return self.root / "puzzles" / f"{puzzle_id}.tqc"

    def _meta_path(self, puzzle_id: str) -> Path:
        return self.root / "puzzles" / f"{puzzle_id}.meta.json"

    def _load_all(self) -> None:
        for tqc_file in sorted(self.root.glob("puzzles/*.tqc")):
            puzzle_id = tqc_file.stem
            try:
                self._load_puzzle(puzzle_id)
            except (ValueError, OSError) as e:
                raise ServiceError("corrupt-store",
                                   f"puzzle {puzzle_id} failed to load: {e}")

    def _load_puzzle(self, puzzle_id: str) -> None:
        text = self._puzzle_path(puzzle_id).read_text()
        base = circuit_from_tqc(text)
        rep = validate_geometry(base)
        if not rep.ok:
            raise ServiceError("corrupt-store", f"stored base invalid: {rep}")
        meta = {"title": puzzle_id, "created_at": 0.0}
        if self._meta_path(puzzle_id).exists():
            meta.update(json.loads(self._meta_path(puzzle_id).read_text()))
        st = PuzzleState(puzzle_id, meta["title"], meta["created_at"], base, text)
        st.nodes["n0"] = TreeNode("n0", None, None, "", bounding_volume(base), base)
        log = self._tree_log(puzzle_id)
        if log.exists():
            for line_no, line in enumerate(log.read_text().splitlines(), 1):
                if not line.strip():
                    continue
                rec = json.loads(line)
                move = move_from_json(rec["move"])
                parent = st.nodes[rec["parent"]]
                circuit = apply_move(parent.circuit, move)  # authoritative re-check
                node = TreeNode(rec["node"], rec["parent"], move,
                                rec.get("author", ""), bounding_volume(circuit), circuit)
                st.nodes[node.node_id] = node
        self.puzzles[puzzle_id] = st

    def _append_node(self, st: PuzzleState, node: TreeNode) -> None:
        rec = {"node": node.node_id, "parent": node.parent,
               "move": move_to_json(node.move), "author": node.author,
               "volume": node.volume, "ts": time.time()}
        with open(self._tree_log(st.puzzle_id), "a", encoding="utf-8") as f:
            f.write(json.dumps(rec, sort_keys=True) + "\n")
            f.flush()
            os.fsync(f.fileno())

    # -- operations --------------------------------------------------------

    def add_puzzle(self, puzzle_id: str, title: str, tqc_text: str) -> PuzzleState:
        if not puzzle_id or "/" in puzzle_id or puzzle_id.startswith("."):
            raise ServiceError("bad-id", f"bad puzzle id {puzzle_id!r}")
        with self._registry_lock:
            if puzzle_id in self.puzzles:
                raise ServiceError("exists", f"puzzle {puzzle_id} already exists")
            try:
                base = circuit_from_tqc(tqc_text)
            except ValueError as e:
                raise ServiceError("invalid-circuit", str(e)) from None
            rep = validate_geometry(base)
            if not rep.ok:
                raise ServiceError("invalid-circuit", str(rep))
            canonical = circuit_to_tqc(base)
            created = time.time()
            self._puzzle_path(puzzle_id).write_text(canonical)
            self._meta_path(puzzle_id).write_text(
                json.dumps({"title": title, "created_at": created}, sort_keys=True))
            st = PuzzleState(puzzle_id, title, created, base, canonical)
            st.nodes["n0"] = TreeNode("n0", None, None, "", bounding_volume(base), base)
            self.puzzles[puzzle_id] = st
            return st

    def puzzle(self, puzzle_id: str) -> PuzzleState:
        try:
            return self.puzzles[puzzle_id]
        except KeyError:
            raise ServiceError("not-found", f"no puzzle {puzzle_id!r}") from None

    def node(self, st: PuzzleState, node_id: str) -> TreeNode:
        try:
            return st.nodes[node_id]
        except KeyError:
            raise ServiceError("not-found",
                               f"no node {node_id!r} in puzzle {st.puzzle_id}") from None

    def check(self, puzzle_id: str, node_id: str, move: Move) -> tuple[bool, str]:
        st = self.puzzle(puzzle_id)
        parent = self.node(st, node_id)
        rep = check_move(parent.circuit, move)
        return rep.ok, "" if rep.ok else str(rep.violations[0])

    def submit(self, puzzle_id: str, node_id: str, move: Move, author: str) -> TreeNode:
        st = self.puzzle(puzzle_id)
        with st.lock:  # one serialized writer per puzzle
            parent = self.node(st, node_id)
            try:
                circuit = apply_move(parent.circuit, move)
            except MoveError as e:
                raise ServiceError("rejected", str(e)) from None
            child = TreeNode(f"n{len(st.nodes)}", node_id, move, author,
                             bounding_volume(circuit), circuit)
            self._append_node(st, child)  # durable before acknowledgment
            st.nodes[child.node_id] = child
            return child

    def leaderboard(self) -> list[dict]:
        out = []
        for pid in sorted(self.puzzles):
            st = self.puzzles[pid]
            best = st.best()
            out.append({"puzzle": pid, "volume": best.volume,
                        "author": best.author, "node": best.node_id})
        return out

    def export_moves(self, puzzle_id: str, node_id: str) -> str:
        st = self.puzzle(puzzle_id)
        node = self.node(st, node_id)
        path: list[Move] = []
        cur: TreeNode | None = node
        while cur is not None and cur.move is not None:
            path.append(cur.move)
            cur = st.nodes[cur.parent] if cur.parent else None
        path.reverse()
        return MoveLog(tqc_digest(st.base_tqc), tuple(path)).to_text()

    def tree_summary(self, puzzle_id: str) -> dict:
        st = self.puzzle(puzzle_id)
        return {
            "root": st.root_id,
            "nodes": {
                n.node_id: {
                    "parent": n.parent,
                    "move": move_to_json(n.move) if n.move else None,
                    "volume": n.volume,
                    "author": n.author,
                }
                for n in st.nodes.values()
            },
        }


# --- the socket front end ---------------------------------------------------

def handle_request(store: PuzzleStore, req: dict) -> dict:
    if not isinstance(req, dict) or req.get("v") != PROTOCOL_VERSION:
        return {"v": PROTOCOL_VERSION, "ok": False,
                "error": {"code": "bad-request", "reason": "missing or wrong 'v'"}}
    op = req.get("op")
    try:
        if op == "list_puzzles":
            return _ok(puzzles=[
                {"id": pid, "title": st.title, "created_at": st.created_at,
                 "best_known_volume": st.best().volume,
                 "base_volume": st.nodes["n0"].volume}
                for pid, st in sorted(store.puzzles.items())
            ])
        if op == "add_puzzle":
            st = store.add_puzzle(str(req["id"]), str(req.get("title", req["id"])),
                                  str(req["tqc"]))
            return _ok(id=st.puzzle_id, root=st.root_id,
                       volume=st.nodes["n0"].volume)
        if op == "get_puzzle":
            st = store.puzzle(str(req["puzzle"]))
            return _ok(id=st.puzzle_id, title=st.title, tqc=st.base_tqc,
                       root=st.root_id)
        if op == "get_node":
            st = store.puzzle(str(req["puzzle"]))
            node = store.node(st, str(req["node"]))
            return _ok(node=node.node_id, volume=node.volume,
                       tqc=circuit_to_tqc(node.circuit))
        if op == "get_tree":
            return _ok(**store.tree_summary(str(req["puzzle"])))
        if op == "check_move":
            valid, reason = store.check(str(req["puzzle"]), str(req["node"]),
                                        move_from_json(req["move"]))
            return _ok(valid=valid, reason=reason)
        if op == "submit_move":
            child = store.submit(str(req["puzzle"]), str(req["node"]),
                                 move_from_json(req["move"]),
                                 str(req.get("author", "")))
            return _ok(node=child.node_id, parent=child.parent, volume=child.volume)
        if op == "leaderboard":
            return _ok(entries=store.leaderboard())
        if op == "export_node":
            fmt = req.get("format", "tqc")
            st = store.puzzle(str(req["puzzle"]))
            node = store.node(st, str(req["node"]))
            if fmt == "tqc":
                return _ok(data=circuit_to_tqc(node.circuit), format="tqc")
            if fmt == "moves":
                return _ok(data=store.export_moves(st.puzzle_id, node.node_id),
                           format="moves")
            raise ServiceError("bad-request", f"unknown export format {fmt!r}")
        raise ServiceError("bad-request", f"unknown op {op!r}")
    except ServiceError as e:
        return {"v": PROTOCOL_VERSION, "ok": False,
                "error": {"code": e.code, "reason": str(e)}}
    except (KeyError, TypeError) as e:
        return {"v": PROTOCOL_VERSION, "ok": False,
                "error": {"code": "bad-request", "reason": f"malformed request: {e}"}}


def _ok(**fields) -> dict:
    return {"v": PROTOCOL_VERSION, "ok": True, **fields}


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        store: PuzzleStore = self.server.store  # type: ignore[attr-defined]
        for raw in self.rfile:
            line = raw.decode("utf-8", errors="replace").strip()
            if not line:
                continue
            try:
                req = json.loads(line)
            except json.JSONDecodeError as e:
                resp = {"v": PROTOCOL_VERSION, "ok": False,
                        "error": {"code": "bad-json", "reason": str(e)}}
            else:
                resp = handle_request(store, req)
            self.wfile.write((json.dumps(resp) + "\n").encode("utf-8"))
            self.wfile.flush()


class PuzzleServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, host: str, port: int, data_dir: str | Path):
        self.store = PuzzleStore(data_dir)
        super().__init__((host, port), _Handler)


def serve(host: str = "127.0.0.1", port: int = 7341,
          data_dir: str | Path = "bw-data") -> PuzzleServer:
    """Start the session service; blocks in serve_forever via .run()."""
    return PuzzleServer(host, port, data_dir)
