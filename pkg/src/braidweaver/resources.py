"""Physical resource estimates from circuit volume.

Per plumbing piece, a distance-d surface code needs ceil(25 d^2 / 4) + 5d + 1
qubits and ceil(5d/4) syndrome rounds; the measurement-based 3-D lattice
needs 6 d^3 + 9 d^2 + 3 d qubits per piece.  Both formulas are exactly
integral when 4 divides d; ceilings apply otherwise.

Totals follow the dimensionality of each code: the surface code pays qubits
over the spatial cross-section and time along the temporal extent, the 3-D
lattice pays qubits over the full volume.

The per-piece logical failure law is a configurable standard form
p_L = prefactor * (p_phys / p_th)^ceil((d+1)/2); distance selection picks the
smallest odd d meeting the failure budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .geometry import TopoCircuit, bounding_volume, tight_extents

CODES = ("surface", "raussendorf")
MAX_DISTANCE = 199


class ResourceError(ValueError):
    pass


@dataclass(frozen=True)
class CodeParams:
    code: str
    d: int

    def __post_init__(self):
        if self.code not in CODES:
            raise ResourceError(f"unknown code {self.code!r}")
        if self.d < 3:
            raise ResourceError(f"distance must be >= 3, got {self.d}")


@dataclass(frozen=True)
class ErrorModel:
    p_phys: float
    p_th: float = 0.01
    prefactor: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.p_phys < 1.0:
            raise ResourceError(f"p_phys must be in (0,1), got {self.p_phys}")
        if self.p_phys >= self.p_th:
            raise ResourceError(
                f"p_phys {self.p_phys} must be below threshold {self.p_th}")
        if self.prefactor <= 0:
            raise ResourceError("prefactor must be positive")

    def piece_failure(self, d: int) -> float:
        return self.prefactor * (self.p_phys / self.p_th) ** math.ceil((d + 1) / 2)

    def piece_failure_exact(self, d: int) -> Fraction:
        """Decimal-faithful rational evaluation, so thresholds sitting exactly
        on the failure budget resolve the way the printed formula says."""
        ratio = Fraction(str(self.p_phys)) / Fraction(str(self.p_th))
        return Fraction(str(self.prefactor)) * ratio ** math.ceil((d + 1) / 2)


@dataclass(frozen=True)
class ResourceReport:
    code: str
    d: int
    qubits: int
    time_steps: int
    volume_pieces: int
    model: ErrorModel

    def lines(self) -> list[str]:
        return [
            f"code: {self.code}",
            f"distance: {self.d}",
            f"volume_pieces: {self.volume_pieces}",
            f"qubits: {self.qubits}",
            f"time_steps: {self.time_steps}",
            f"p_phys: {self.model.p_phys}",
            f"p_th: {self.model.p_th}",
            f"prefactor: {self.model.prefactor}",
        ]


def qubits_per_piece(code: str, d: int) -> int:
    """Physical qubits in one plumbing piece of a distance-d code."""
    if d < 3:
        raise ResourceError(f"distance must be >= 3, got {d}")
    if code == "surface":
        return -(-25 * d * d // 4) + 5 * d + 1
    if code == "raussendorf":
        return 6 * d ** 3 + 9 * d * d + 3 * d
    raise ResourceError(f"unknown code {code!r}")


def steps_per_piece(code: str, d: int) -> int:
    """Syndrome-extraction rounds spanned by one piece along the temporal axis."""
    if d < 3:
        raise ResourceError(f"distance must be >= 3, got {d}")
    if code not in CODES:
        raise ResourceError(f"unknown code {code!r}")
    return -(-5 * d // 4)


def select_distance(volume_pieces: int, model: ErrorModel, eps_target: float) -> int:
    """Smallest odd d >= 3 keeping the whole-circuit failure below target."""
    if volume_pieces < 1:
        raise ResourceError(f"volume must be >= 1, got {volume_pieces}")
    if not 0.0 < eps_target < 1.0:
        raise ResourceError(f"eps_target must be in (0,1), got {eps_target}")
    budget = Fraction(str(eps_target))
    for d in range(3, MAX_DISTANCE + 1, 2):
        if volume_pieces * model.piece_failure_exact(d) <= budget:
            return d
    raise ResourceError(
        f"target unreachable under model: no d <= {MAX_DISTANCE} reaches "
        f"{eps_target} for volume {volume_pieces}")


def estimate(c: TopoCircuit, code: str, model: ErrorModel, eps_target: float,
             d: int | None = None) -> ResourceReport:
    """Full report for a circuit: distance choice, qubit count, time steps."""
    volume = bounding_volume(c)
    if volume == 0:
        raise ResourceError("empty circuit")
    if code not in CODES:
        raise ResourceError(f"unknown code {code!r}")
    if d is None:
        d = select_distance(volume, model, eps_target)
    elif d < 3:
        raise ResourceError(f"distance must be >= 3, got {d}")
    ex, ey, ez = tight_extents(c)
    if code == "surface":
        qubits = ey * ez * qubits_per_piece(code, d)
    else:
        qubits = volume * qubits_per_piece(code, d)
    time_steps = ex * steps_per_piece(code, d)
    return ResourceReport(code, d, qubits, time_steps, volume, model)
