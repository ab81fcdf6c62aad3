"""Correlation experiments, CHSH evaluation and tripartite class witnesses.

Measurements follow the optical picture: a real rotation on each rail pair
followed by particle detection, with outcome +1 assigned to the pair's first
rail and -1 to the second.  Correlations are expectations of the outcome
product over the re-post-selected distribution.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .circuit import LocalUnitary
from .engine import RunOutput, apply_gate, post_select
from .errors import DimensionMismatch, ZeroProbability
from .fock import canonicalize, canonicalize_labeled, norm
from .qubits import QubitState

Pair = Tuple[int, int]


@dataclass(frozen=True)
class MeasurementSetting:
    """One detection angle; realized as the rotation [[p, q], [q, -p]]."""

    theta: float

    @property
    def matrix(self) -> np.ndarray:
        p = np.cos(self.theta / 2.0)
        q = np.sin(self.theta / 2.0)
        return np.array([[p, q], [q, -p]], dtype=complex)


def _as_setting(value) -> MeasurementSetting:
    if isinstance(value, MeasurementSetting):
        return value
    return MeasurementSetting(float(value))


def correlation(out: RunOutput, settings: Sequence, pairs: Sequence[Pair]) -> float:
    """Expectation of the product of rail outcomes at the given settings."""
    if out.probability <= 0.0:
        raise ZeroProbability("cannot correlate an impossible run")
    if len(settings) != len(pairs):
        raise DimensionMismatch("one measurement setting per rail pair required")
    state = out.accepted.scaled(1.0 / norm(out.accepted))
    for setting, pair in zip(settings, pairs):
        gate = LocalUnitary(tuple(pair), _as_setting(setting).matrix)
        state = apply_gate(state, gate, out.statistics)
    kept, weight = post_select(state, pairs)
    if weight <= 0.0:
        raise ZeroProbability("post-selection kept no events at these settings")
    total = 0.0
    for modes, _species, amp in kept.items():
        sign = 1
        for pair in pairs:
            sign *= 1 if pair[0] in modes else -1
        total += sign * abs(amp) ** 2
    return total / weight


def correlation_table(
    out: RunOutput,
    thetas1: Sequence[float],
    thetas2: Sequence[float],
    pairs: Sequence[Pair],
) -> list[Tuple[float, float, float]]:
    """Correlation on a two-angle grid, rows in (theta1-major) grid order."""
    if len(pairs) != 2:
        raise DimensionMismatch("a correlation table needs exactly two rail pairs")
    rows = []
    for t1 in thetas1:
        for t2 in thetas2:
            rows.append((float(t1), float(t2), correlation(out, (t1, t2), pairs)))
    return rows


def chsh_value(
    out: RunOutput,
    a: float,
    a_prime: float,
    b: float,
    b_prime: float,
    pairs: Sequence[Pair],
) -> float:
    """E(a,b) + E(a,b') + E(a',b) - E(a',b')."""
    e = lambda x, y: correlation(out, (x, y), pairs)  # noqa: E731
    return e(a, b) + e(a, b_prime) + e(a_prime, b) - e(a_prime, b_prime)


def _correlation_grid(
    out: RunOutput,
    pairs: Sequence[Pair],
    thetas1: np.ndarray,
    thetas2: np.ndarray,
) -> np.ndarray:
    """Vectorized two-pair correlation over an angle grid.

    Precomputes, per accepted term and per branch of the two rail rotations,
    the angle-independent coefficient (amplitude times reordering phase) and
    which trig factor each angle contributes; the grid evaluation is then a
    handful of broadcast products.
    """
    if len(pairs) != 2:
        raise DimensionMismatch("grid evaluation supports exactly two rail pairs")
    if out.probability <= 0.0:
        raise ZeroProbability("cannot correlate an impossible run")

    base = out.accepted.scaled(1.0 / norm(out.accepted))
    # trig factor codes: (axis, kind, sign) with kind 0 -> cos(t/2), 1 -> sin(t/2)
    entries = []
    for modes, species, amp in base.items():
        rails = []
        for k, pair in enumerate(pairs):
            u = 0 if pair[0] in modes else 1
            pos = modes.index(pair[u])
            rails.append((k, pos, u))
        for branch in itertools.product((0, 1), repeat=len(pairs)):
            raw = list(modes)
            coeff = amp
            outcome = 1
            factors = []
            for (k, pos, u), v in zip(rails, branch):
                raw[pos] = pairs[k][v]
                outcome *= 1 if v == 0 else -1
                # [[p, q], [q, -p]] entry at (v, u)
                kind = 0 if v == u else 1
                sign = -1.0 if (v, u) == (1, 1) else 1.0
                factors.append((k, kind, sign))
            if species is not None:
                key = canonicalize_labeled(raw, species)
                phase = 1.0 + 0.0j
            else:
                sorted_modes, phase = canonicalize(raw, out.statistics)
                key = (sorted_modes, None)
            entries.append((key, outcome, coeff * phase, tuple(factors)))

    p1 = np.cos(np.asarray(thetas1, dtype=float) / 2.0)[:, None]
    q1 = np.sin(np.asarray(thetas1, dtype=float) / 2.0)[:, None]
    p2 = np.cos(np.asarray(thetas2, dtype=float) / 2.0)[None, :]
    q2 = np.sin(np.asarray(thetas2, dtype=float) / 2.0)[None, :]
    trig = {(0, 0): p1, (0, 1): q1, (1, 0): p2, (1, 1): q2}

    shape = (len(thetas1), len(thetas2))
    amplitudes: dict = {}
    outcomes: dict = {}
    for key, outcome, coeff, factors in entries:
        term = np.full(shape, coeff, dtype=complex)
        for axis, kind, sign in factors:
            term = term * (sign * trig[(axis, kind)])
        if key not in amplitudes:
            amplitudes[key] = term
            outcomes[key] = outcome
        else:
            amplitudes[key] = amplitudes[key] + term

    numerator = np.zeros(shape)
    denominator = np.zeros(shape)
    for key, grid in amplitudes.items():
        weight = np.abs(grid) ** 2
        numerator += outcomes[key] * weight
        denominator += weight
    return numerator / denominator


def chsh_grid_max(
    out: RunOutput,
    pairs: Sequence[Pair],
    resolution_deg: float = 1.0,
    refine: bool = False,
    refine_tolerance: float = 1e-3,
) -> Tuple[float, Tuple[float, float, float, float]]:
    """Maximum CHSH combination over a four-angle grid.

    The grid spans [0, 2 pi) at the given resolution.  The search splits the
    combination into the two halves that depend on a and a' separately, so
    the cost stays cubic in the grid size.  With ``refine`` set, the grid
    optimum is polished by per-coordinate golden-section sweeps until the
    improvement drops below ``refine_tolerance``.
    """
    n = int(round(360.0 / resolution_deg))
    angles = np.arange(n) * (2.0 * np.pi / n)
    e = _correlation_grid(out, pairs, angles, angles)

    best = -np.inf
    best_idx = (0, 0, 0, 0)
    for b in range(n):
        col = e[:, b][:, None]
        plus = col + e  # over (a, b')
        minus = col - e  # over (a', b')
        a_best = plus.argmax(axis=0)
        ap_best = minus.argmax(axis=0)
        totals = plus[a_best, np.arange(n)] + minus[ap_best, np.arange(n)]
        bp = int(totals.argmax())
        if totals[bp] > best:
            best = float(totals[bp])
            best_idx = (int(a_best[bp]), int(ap_best[bp]), b, bp)

    best_angles = tuple(float(angles[i]) for i in best_idx)
    if not refine:
        return best, best_angles

    def objective(args):
        return chsh_value(out, *args, pairs=pairs)

    current = list(best_angles)
    value = objective(current)
    step = 2.0 * np.pi / n
    while True:
        improved = value
        for i in range(4):
            lo, hi = current[i] - step, current[i] + step
            gr = (np.sqrt(5.0) - 1.0) / 2.0
            x1 = hi - gr * (hi - lo)
            x2 = lo + gr * (hi - lo)
            for _ in range(40):
                c1, c2 = list(current), list(current)
                c1[i], c2[i] = x1, x2
                if objective(c1) < objective(c2):
                    lo = x1
                    x1, x2 = x2, lo + gr * (hi - lo)
                else:
                    hi = x2
                    x2, x1 = x1, hi - gr * (hi - lo)
            current[i] = (lo + hi) / 2.0
        value = objective(current)
        if value - improved < refine_tolerance:
            break
    return value, tuple(current)


def fidelity(state: QubitState, target: QubitState) -> float:
    """Squared overlap of two normalized qubit states."""
    if state.num_qubits != target.num_qubits:
        raise DimensionMismatch("states must have the same number of qubits")
    return float(abs(np.vdot(target.amplitudes, state.amplitudes)) ** 2)


def three_tangle(state: QubitState) -> float:
    """Residual tangle of a three-qubit state.

    Positive for the GHZ entanglement class, zero for the W class and for
    product states; invariant under local unitaries.
    """
    if state.num_qubits != 3:
        raise DimensionMismatch("the tangle is defined for three qubits")
    a = state.amplitudes

    def amp(i, j, k):
        return a[(i << 2) | (j << 1) | k]

    d1 = (
        amp(0, 0, 0) ** 2 * amp(1, 1, 1) ** 2
        + amp(0, 0, 1) ** 2 * amp(1, 1, 0) ** 2
        + amp(0, 1, 0) ** 2 * amp(1, 0, 1) ** 2
        + amp(1, 0, 0) ** 2 * amp(0, 1, 1) ** 2
    )
    d2 = (
        amp(0, 0, 0) * amp(1, 1, 1) * amp(0, 1, 1) * amp(1, 0, 0)
        + amp(0, 0, 0) * amp(1, 1, 1) * amp(1, 0, 1) * amp(0, 1, 0)
        + amp(0, 0, 0) * amp(1, 1, 1) * amp(1, 1, 0) * amp(0, 0, 1)
        + amp(0, 1, 1) * amp(1, 0, 0) * amp(1, 0, 1) * amp(0, 1, 0)
        + amp(0, 1, 1) * amp(1, 0, 0) * amp(1, 1, 0) * amp(0, 0, 1)
        + amp(1, 0, 1) * amp(0, 1, 0) * amp(1, 1, 0) * amp(0, 0, 1)
    )
    d3 = (
        amp(0, 0, 0) * amp(1, 1, 0) * amp(1, 0, 1) * amp(0, 1, 1)
        + amp(1, 1, 1) * amp(0, 0, 1) * amp(0, 1, 0) * amp(1, 0, 0)
    )
    hyper = d1 - 2.0 * d2 + 4.0 * d3
    magnitude = abs(hyper)
    if magnitude < 1e-12:
        return 0.0
    return float(4.0 * magnitude)
