"""Automated volume minimization over the move set.

Three strategies share one contract: the returned circuit is the best state
seen (uphill-capable strategies checkpoint), its signature equals the
input's, and the whole run is a pure function of the input bytes and the
config, seed included.  The returned move log replays from the input
circuit to exactly the returned circuit.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .geometry import TopoCircuit, bounding_volume, occupied_count, tqc_digest, \
    validate_geometry
from .moves import Move, MoveLog, _apply_unchecked, enumerate_moves

OBJECTIVES = {
    "bounding_volume": bounding_volume,
    "occupied_cells": occupied_count,
}


@dataclass(frozen=True)
class AnnealParams:
    t0: float = 5.0
    cooling: float = 0.95
    steps_per_temp: int = 20
    proposal_budget: int = 2048

    def __post_init__(self):
        if not 0.0 < self.cooling < 1.0:
            raise ValueError(f"cooling must be in (0,1), got {self.cooling}")
        if self.t0 <= 0 or self.steps_per_temp <= 0 or self.proposal_budget <= 0:
            raise ValueError("anneal budgets must be positive")


@dataclass(frozen=True)
class BeamParams:
    width: int = 4
    expand_budget: int = 2048

    def __post_init__(self):
        if self.width <= 0 or self.expand_budget <= 0:
            raise ValueError("beam budgets must be positive")


@dataclass(frozen=True)
class SearchConfig:
    strategy: str = "greedy"  # "greedy" | "anneal" | "beam"
    seed: int = 0
    max_steps: int = 200
    anneal: AnnealParams = field(default_factory=AnnealParams)
    beam: BeamParams = field(default_factory=BeamParams)
    objective: str = "bounding_volume"
    #: candidate-evaluation parallelism; results must not depend on it
    workers: int = 1

    def __post_init__(self):
        if self.strategy not in ("greedy", "anneal", "beam"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"unknown objective {self.objective!r}")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class TraceRow:
    step: int
    objective: int
    accepted: bool
    kind: str

    def csv(self) -> str:
        return f"{self.step},{self.objective},{str(self.accepted).lower()},{self.kind}"


@dataclass
class OptimizeResult:
    final: TopoCircuit
    log: MoveLog
    initial_volume: int
    final_volume: int
    steps_taken: int
    objective_trace: list[int]
    trace_rows: list[TraceRow]

    def trace_csv(self) -> str:
        return "step,objective,accepted,move\n" + \
            "".join(r.csv() + "\n" for r in self.trace_rows)


def greedy_step(c: TopoCircuit, objective: str = "bounding_volume",
                budget: int = 10_000) -> tuple[Move, int] | None:
    """Best strictly-improving move, ties to the earliest enumerated; None if
    no move improves the objective."""
    obj = OBJECTIVES[objective]
    base = obj(c)
    best: tuple[int, int, Move] | None = None
    for idx, m in enumerate(enumerate_moves(c, budget)):
        val = obj(_apply_unchecked(c, m))
        if val < base and (best is None or val < best[0]):
            best = (val, idx, m)
    if best is None:
        return None
    return best[2], best[0]


def _result(base: TopoCircuit, cfg: SearchConfig, accepted: list[Move],
            best_prefix: int, best_circuit: TopoCircuit, steps: int,
            trace: list[int], rows: list[TraceRow]) -> OptimizeResult:
    obj = OBJECTIVES[cfg.objective]
    log = MoveLog(tqc_digest(base), tuple(accepted[:best_prefix]))
    return OptimizeResult(
        final=best_circuit,
        log=log,
        initial_volume=obj(base),
        final_volume=obj(best_circuit),
        steps_taken=steps,
        objective_trace=trace,
        trace_rows=rows,
    )


def _verify_state(base: TopoCircuit, state: TopoCircuit) -> None:
    from .topology import signature, signatures_equal
    rep = validate_geometry(state)
    if not rep.ok:
        raise AssertionError(f"optimizer produced invalid geometry: {rep}")
    diff = signatures_equal(signature(base), signature(state))
    if not diff.equal:
        raise AssertionError(f"optimizer changed the signature: {diff}")


def _optimize_greedy(c: TopoCircuit, cfg: SearchConfig,
                     verify_states: bool = False) -> OptimizeResult:
    obj = OBJECTIVES[cfg.objective]
    current = c
    accepted: list[Move] = []
    trace = [obj(c)]
    rows: list[TraceRow] = []
    steps = 0
    while steps < cfg.max_steps:
        nxt = greedy_step(current, cfg.objective)
        if nxt is None:
            break
        move, val = nxt
        current = _apply_unchecked(current, move)
        if verify_states:
            _verify_state(c, current)
        accepted.append(move)
        trace.append(val)
        rows.append(TraceRow(steps, val, True, move.kind))
        steps += 1
    return _result(c, cfg, accepted, len(accepted), current, steps, trace, rows)


def _optimize_anneal(c: TopoCircuit, cfg: SearchConfig,
                     verify_states: bool = False) -> OptimizeResult:
    obj = OBJECTIVES[cfg.objective]
    rng = random.Random(cfg.seed)
    p = cfg.anneal
    current, cur_val = c, obj(c)
    best_circuit, best_val, best_prefix = c, cur_val, 0
    accepted: list[Move] = []
    trace = [cur_val]
    rows: list[TraceRow] = []
    temp = p.t0
    for step in range(cfg.max_steps):
        candidates = enumerate_moves(current, p.proposal_budget)
        if not candidates:
            break
        move = rng.choice(candidates)
        new = _apply_unchecked(current, move)
        val = obj(new)
        delta = val - cur_val
        take = delta <= 0 or rng.random() < math.exp(-delta / temp)
        rows.append(TraceRow(step, val, take, move.kind))
        if take:
            if verify_states:
                _verify_state(c, new)
            current, cur_val = new, val
            accepted.append(move)
            trace.append(val)
            if val < best_val:
                best_circuit, best_val, best_prefix = new, val, len(accepted)
        if (step + 1) % p.steps_per_temp == 0:
            temp = max(temp * p.cooling, 1e-9)
    return _result(c, cfg, accepted, best_prefix, best_circuit,
                   len(rows), trace, rows)


def _optimize_beam(c: TopoCircuit, cfg: SearchConfig) -> OptimizeResult:
    obj = OBJECTIVES[cfg.objective]
    p = cfg.beam
    start_val = obj(c)
    # key = (objective, occupied cells, insertion order): occupied cells break
    # plateau ties toward already-compressed geometry, deterministically
    beam: list[tuple[tuple[int, int, int], TopoCircuit, list[Move]]] = [
        ((start_val, occupied_count(c), 0), c, [])]
    best = beam[0]
    seen = {tqc_digest(c)}
    trace = [start_val]
    rows: list[TraceRow] = []
    steps = 0
    for step in range(cfg.max_steps):
        pool: list[tuple[tuple[int, int, int], TopoCircuit, list[Move]]] = []
        order = 0
        for _, circ, path in beam:
            for m in enumerate_moves(circ, p.expand_budget):
                new = _apply_unchecked(circ, m)
                digest = tqc_digest(new)
                if digest in seen:
                    continue
                seen.add(digest)
                val = obj(new)
                pool.append(((val, occupied_count(new), order), new, path + [m]))
                rows.append(TraceRow(step, val, False, m.kind))
                order += 1
        if not pool:
            break
        pool.sort(key=lambda t: t[0])
        beam = pool[:p.width]
        steps += 1
        for entry in beam:
            rows.append(TraceRow(step, entry[0][0], True, entry[2][-1].kind))
        trace.append(beam[0][0][0])
        if beam[0][0][:2] < best[0][:2]:
            best = beam[0]
    return _result(c, cfg, best[2], len(best[2]), best[1], steps, trace, rows)


def optimize(c: TopoCircuit, cfg: SearchConfig = SearchConfig(),
             verify_states: bool = False) -> OptimizeResult:
    """Minimize the objective; deterministic given (circuit bytes, config).

    ``verify_states`` re-checks geometry validity and signature equality after
    every accepted move (slow; for debugging and verification suites).
    """
    if cfg.strategy == "greedy":
        return _optimize_greedy(c, cfg, verify_states)
    if cfg.strategy == "anneal":
        return _optimize_anneal(c, cfg, verify_states)
    result = _optimize_beam(c, cfg)
    if verify_states:
        _verify_state(c, result.final)
    return result
