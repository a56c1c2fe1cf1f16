"""braidweaver: a compiler and volume optimizer for defect-based topological
quantum circuits, plus a collaborative puzzle service for compressing them.

Pipeline: ``.icm`` circuit -> canonical 3-D defect geometry (``.tqc``) ->
signature-preserving compression (``.moves`` logs) -> physical qubit/time
estimates for surface-code or measurement-based hardware.
"""

__version__ = "0.1.0"

from .canonical import CanonicalLayoutParams, layout_canonical
from .geometry import (
    Bounds,
    DefectStrand,
    LatticePoint,
    PortLabel,
    TopoCircuit,
    bounding_volume,
    circuit_from_tqc,
    circuit_to_tqc,
    occupied_count,
    occupied_pieces,
    validate_geometry,
)
from .icm import CliffordGate, ICMCircuit, ICMEvent, clifford_t_to_icm, parse_icm, \
    print_icm, validate_icm
from .moves import Move, MoveLog, apply_move, check_move, enumerate_moves, replay
from .optimizer import OptimizeResult, SearchConfig, greedy_step, optimize
from .resources import CodeParams, ErrorModel, ResourceReport, estimate, \
    qubits_per_piece, select_distance, steps_per_piece
from .topology import LinkingMatrix, TopoSignature, linking_matrix, linking_number, \
    signature, signatures_equal

__all__ = [
    "Bounds", "CanonicalLayoutParams", "CliffordGate", "CodeParams",
    "DefectStrand", "ErrorModel", "ICMCircuit", "ICMEvent", "LatticePoint",
    "LinkingMatrix", "Move", "MoveLog", "OptimizeResult", "PortLabel",
    "ResourceReport", "SearchConfig", "TopoCircuit", "TopoSignature",
    "apply_move", "bounding_volume", "check_move", "circuit_from_tqc",
    "circuit_to_tqc", "clifford_t_to_icm", "enumerate_moves", "estimate",
    "greedy_step", "layout_canonical", "linking_matrix", "linking_number",
    "occupied_count", "occupied_pieces", "optimize", "parse_icm", "print_icm",
    "qubits_per_piece", "replay", "select_distance", "signature",
    "signatures_equal", "steps_per_piece", "validate_geometry", "validate_icm",
]
