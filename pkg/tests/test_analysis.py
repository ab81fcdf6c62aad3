import numpy as np
import pytest

from notouch.analysis import (
    MeasurementSetting,
    chsh_grid_max,
    chsh_value,
    correlation,
    correlation_table,
    fidelity,
    three_tangle,
)
from notouch.circuit import bell_circuit, ghz_circuit, w_circuit
from notouch.engine import extract_dual_rail, run, run_distinguishable
from notouch.errors import DimensionMismatch, ZeroProbability
from notouch.fock import BOSON, FERMION
from notouch.qubits import QubitState

PAIRS = bell_circuit().target_pairs


def test_setting_matrix_is_orthogonal():
    m = MeasurementSetting(0.8).matrix
    assert np.allclose(m @ m.conj().T, np.eye(2), atol=1e-12)
    assert np.allclose(m, [[np.cos(0.4), np.sin(0.4)], [np.sin(0.4), -np.cos(0.4)]])


@pytest.mark.parametrize(
    "t1,t2", [(0.0, 0.0), (0.7, 0.2), (2.5, 4.0), (5.9, 1.1)]
)
def test_bell_correlations_match_closed_forms(t1, t2):
    out_b = run(bell_circuit(), BOSON)
    out_f = run(bell_circuit(), FERMION)
    out_d = run_distinguishable(bell_circuit())
    assert abs(correlation(out_b, (t1, t2), PAIRS) - np.cos(t1 - t2)) < 1e-9
    assert abs(correlation(out_f, (t1, t2), PAIRS) - np.cos(t1 + t2)) < 1e-9
    assert abs(correlation(out_d, (t1, t2), PAIRS) - np.cos(t1) * np.cos(t2)) < 1e-9


def test_correlation_accepts_setting_objects():
    out = run(bell_circuit(), BOSON)
    value = correlation(out, (MeasurementSetting(0.3), MeasurementSetting(1.0)), PAIRS)
    assert abs(value - np.cos(0.7)) < 1e-9


def test_correlation_is_bounded_and_phase_invariant():
    out = run(bell_circuit(), BOSON)
    rng = np.random.default_rng(17)
    for _ in range(25):
        t1, t2 = rng.uniform(0, 2 * np.pi, size=2)
        e = correlation(out, (t1, t2), PAIRS)
        assert -1 - 1e-12 <= e <= 1 + 1e-12
    # global phase on the accepted state changes nothing
    from notouch.engine import RunOutput

    rotated = RunOutput(
        out.pre_selection,
        out.accepted.scaled(np.exp(0.4j)),
        out.probability,
        out.statistics,
    )
    assert abs(correlation(rotated, (0.3, 0.9), PAIRS) - np.cos(0.6)) < 1e-9


def test_boson_correlation_shift_invariance():
    out = run(bell_circuit(), BOSON)
    rng = np.random.default_rng(23)
    for _ in range(10):
        t1, t2, shift = rng.uniform(0, 2 * np.pi, size=3)
        a = correlation(out, (t1, t2), PAIRS)
        b = correlation(out, (t1 + shift, t2 + shift), PAIRS)
        assert abs(a - b) < 1e-9


def test_distinguishable_correlation_factorizes():
    out = run_distinguishable(bell_circuit())
    rng = np.random.default_rng(29)
    for _ in range(10):
        t1, t2 = rng.uniform(0, 2 * np.pi, size=2)
        lhs = correlation(out, (t1, t2), PAIRS) * correlation(out, (0.0, 0.0), PAIRS)
        rhs = correlation(out, (t1, 0.0), PAIRS) * correlation(out, (0.0, t2), PAIRS)
        assert abs(lhs - rhs) < 1e-9


def test_correlation_errors():
    out = run(bell_circuit(), BOSON)
    with pytest.raises(DimensionMismatch):
        correlation(out, (0.1,), PAIRS)
    from notouch.engine import RunOutput
    from notouch.fock import FockState

    empty = RunOutput(FockState(4), FockState(4), 0.0, BOSON)
    with pytest.raises(ZeroProbability):
        correlation(empty, (0.0, 0.0), PAIRS)


def test_correlation_table_grid_order():
    out = run(bell_circuit(), BOSON)
    rows = correlation_table(out, [0.0, 1.0], [0.0, 0.5], PAIRS)
    assert [(r[0], r[1]) for r in rows] == [(0.0, 0.0), (0.0, 0.5), (1.0, 0.0), (1.0, 0.5)]
    for t1, t2, e in rows:
        assert abs(e - np.cos(t1 - t2)) < 1e-9


def test_chsh_canonical_angles():
    out = run(bell_circuit(), BOSON)
    s = chsh_value(out, 0.0, np.pi / 2, np.pi / 4, -np.pi / 4, PAIRS)
    assert abs(s - 2 * np.sqrt(2)) < 1e-9
    # all angles equal collapses to twice the diagonal correlation
    assert abs(chsh_value(out, 0.3, 0.3, 0.3, 0.3, PAIRS) - 2.0) < 1e-9


def test_chsh_grid_max_coarse():
    out_b = run(bell_circuit(), BOSON)
    value, angles = chsh_grid_max(out_b, PAIRS, resolution_deg=3.0)
    assert abs(value - 2 * np.sqrt(2)) < 1e-9
    check = chsh_value(out_b, *angles, pairs=PAIRS)
    assert abs(check - value) < 1e-9
    out_d = run_distinguishable(bell_circuit())
    value_d, _ = chsh_grid_max(out_d, PAIRS, resolution_deg=3.0)
    assert value_d <= 2 + 1e-9


def test_chsh_grid_refinement_converges():
    out = run(bell_circuit(), BOSON)
    value, _ = chsh_grid_max(out, PAIRS, resolution_deg=10.0, refine=True)
    assert abs(value - 2 * np.sqrt(2)) < 1e-3


def test_fidelity_examples():
    ghz = extract_dual_rail(run(ghz_circuit(), BOSON).accepted, ghz_circuit().target_pairs)
    w = extract_dual_rail(run(w_circuit(), BOSON).accepted, w_circuit().target_pairs)
    assert abs(fidelity(ghz, ghz) - 1) < 1e-12
    assert fidelity(ghz, w) < 1e-12  # disjoint supports
    s = 1 / np.sqrt(2)
    target = QubitState(3, np.array([s, 0, 0, 0, 0, 0, 0, s]))
    assert abs(fidelity(ghz, target) - 1) < 1e-9
    with pytest.raises(DimensionMismatch):
        fidelity(ghz, QubitState(2, np.array([1, 0, 0, 0])))


def test_three_tangle_witnesses():
    ghz = extract_dual_rail(run(ghz_circuit(), BOSON).accepted, ghz_circuit().target_pairs)
    w = extract_dual_rail(run(w_circuit(), BOSON).accepted, w_circuit().target_pairs)
    assert abs(three_tangle(ghz) - 1.0) < 1e-9
    assert three_tangle(w) == 0.0
    product = QubitState(3, np.eye(8)[0])
    assert three_tangle(product) == 0.0
    with pytest.raises(DimensionMismatch):
        three_tangle(QubitState(2, np.array([1, 0, 0, 0])))


def _haar_unitary(rng, n=2):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def test_three_tangle_local_unitary_invariance():
    rng = np.random.default_rng(31)
    ghz = extract_dual_rail(run(ghz_circuit(), BOSON).accepted, ghz_circuit().target_pairs)
    w = extract_dual_rail(run(w_circuit(), BOSON).accepted, w_circuit().target_pairs)
    for state, expected in ((ghz, 1.0), (w, 0.0)):
        for _ in range(10):
            tensor = state.amplitudes.reshape(2, 2, 2)
            for axis in range(3):
                u = _haar_unitary(rng)
                tensor = np.moveaxis(
                    np.tensordot(u, np.moveaxis(tensor, axis, 0), axes=(1, 0)), 0, axis
                )
            rotated = QubitState(3, tensor.reshape(8))
            assert abs(three_tangle(rotated) - expected) < 1e-8
