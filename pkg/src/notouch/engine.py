"""Circuit execution on single-occupancy Fock states.

The pipeline follows the staged circuit layout: inject one particle per
input subsystem, apply the input-stage local unitaries, relabel modes by the
permutation, apply the output-stage local unitaries, then post-select on one
particle per target rail pair.

Gate application expands each occupied support mode by its matrix column and
re-canonicalizes every resulting operator product, picking up the exchange
phase of the statistics.  Expansion branches that would put two particles
into one mode leave the single-occupancy sector; by default their squared
weight is moved into the state's ``escaped`` ledger instead of being
represented (post-selection rejects such events anyway, and no later gate in
a valid circuit can act on a doubly occupied mode, because stage supports
are disjoint).  Mass is conserved: ``norm(out)**2 + out.escaped ==
norm(in)**2 + in.escaped`` for every application.  For fermions the escaped
weight is always zero, since antisymmetry cancels the offending branches
exactly.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .circuit import Circuit, Gate, LocalUnitary, Permute, validate_circuit
from .errors import (
    DoubleOccupancy,
    InvalidCircuit,
    PatternMismatch,
    ZeroState,
)
from .fock import (
    FockState,
    Statistics,
    canonicalize,
    canonicalize_labeled,
)
from .qubits import QubitState

Pair = Tuple[int, int]


@dataclass(frozen=True)
class RunOutput:
    """Result of executing a circuit.

    ``pre_selection`` is the full evolved state before post-selection (its
    ``escaped`` attribute holds any squared weight that left the
    single-occupancy sector).  ``accepted`` is the unnormalized projection
    onto the one-particle-per-pair patterns and ``probability`` its squared
    norm.  ``statistics`` records how the run reordered operators; it is
    ``None`` for distinguishable-particle runs.
    """

    pre_selection: FockState
    accepted: FockState
    probability: float
    statistics: Optional[Statistics]


def _require_valid(c: Circuit) -> None:
    report = validate_circuit(c)
    if not report.ok:
        raise InvalidCircuit("; ".join(report.violations))


def inject(c: Circuit) -> FockState:
    """Initial state: one particle in each subsystem's injection mode."""
    _require_valid(c)
    return FockState.single(c.num_modes, sorted(c.injections))


def inject_distinguishable(c: Circuit) -> FockState:
    """Initial state with particle labels assigned by subsystem order."""
    _require_valid(c)
    labelled = sorted(zip(c.injections, range(1, len(c.injections) + 1)))
    modes = [m for m, _ in labelled]
    species = [s for _, s in labelled]
    return FockState.single(c.num_modes, modes, species=species)


def _canonical(raw_modes, species, statistics):
    """Canonical key and phase for a raw operator sequence."""
    if species is not None:
        modes, labels = canonicalize_labeled(raw_modes, species)
        return (modes, labels), 1.0 + 0.0j
    if statistics is None:
        raise ValueError("statistics required for unlabelled terms")
    modes, phase = canonicalize(raw_modes, statistics)
    return (modes, None), phase


def apply_gate(
    state: FockState,
    gate: Gate,
    statistics: Optional[Statistics],
    *,
    collision: str = "escape",
) -> FockState:
    """Apply one gate, preserving total mass (stored norm plus escaped).

    ``collision`` controls expansion branches that would doubly occupy a
    mode: ``"escape"`` (default) moves their weight into the ``escaped``
    ledger, ``"raise"`` raises ``DoubleOccupancy``.  Fermionic branches of
    this kind vanish identically and never raise.
    """
    if collision not in ("escape", "raise"):
        raise ValueError(f"unknown collision policy {collision!r}")

    if isinstance(gate, Permute):
        out: dict = {}
        for modes, species, amp in state.items():
            raw = [gate.apply(m) for m in modes]
            aligned = None if species is None else list(species)
            key, phase = _canonical(raw, aligned, statistics)
            out[key] = out.get(key, 0.0 + 0.0j) + amp * phase
        return FockState(state.num_modes, out, escaped=state.escaped)

    support = gate.support
    support_set = set(support)
    matrix = gate.matrix
    out = {}
    in_sq = 0.0
    out_sq = 0.0
    for modes, species, amp in state.items():
        in_sq += abs(amp) ** 2
        positions = [i for i, m in enumerate(modes) if m in support_set]
        if not positions:
            key = (modes, species)
            out[key] = out.get(key, 0.0 + 0.0j) + amp
            continue
        col_indices = [support.index(modes[i]) for i in positions]
        for targets in itertools.product(range(len(support)), repeat=len(positions)):
            coeff = amp
            for tgt, src in zip(targets, col_indices):
                coeff = coeff * matrix[tgt, src]
            if coeff == 0:
                continue
            raw = list(modes)
            for pos, tgt in zip(positions, targets):
                raw[pos] = support[tgt]
            if len(set(raw)) != len(raw):
                # branch leaves the single-occupancy sector
                if statistics is not None and statistics.kind == "fermion":
                    continue  # identical operators annihilate the branch
                if collision == "raise":
                    raise DoubleOccupancy(
                        f"gate on modes {support} would doubly occupy a mode "
                        f"(branch {tuple(raw)})"
                    )
                continue
            aligned = None if species is None else list(species)
            key, phase = _canonical(raw, aligned, statistics)
            out[key] = out.get(key, 0.0 + 0.0j) + coeff * phase
    for value in out.values():
        out_sq += abs(value) ** 2
    escaped = state.escaped + max(in_sq - out_sq, 0.0)
    return FockState(state.num_modes, out, escaped=escaped)


def _pattern_accepted(modes: Iterable[int], pairs: Sequence[Pair]) -> bool:
    """True when each pair holds exactly one particle and no mode outside
    the pairs is occupied.  Accepts multisets (repeats count as particles),
    so path-history finals can reuse the same predicate."""
    counts = Counter(modes)
    pair_modes = set()
    for pair in pairs:
        pair_modes |= set(pair)
        if counts[pair[0]] + counts[pair[1]] != 1:
            return False
    return all(m in pair_modes for m in counts)


def post_select(state: FockState, pairs: Sequence[Pair]) -> Tuple[FockState, float]:
    """Project onto one particle per pair; returns the kept part and its weight."""
    seen: set[int] = set()
    for pair in pairs:
        if seen & set(pair):
            raise ValueError("target pairs must be disjoint")
        seen |= set(pair)
    kept = {}
    probability = 0.0
    for modes, species, amp in state.items():
        if _pattern_accepted(modes, pairs):
            kept[(modes, species)] = amp
            probability += abs(amp) ** 2
    return FockState(state.num_modes, kept), probability


def run(c: Circuit, statistics: Statistics) -> RunOutput:
    """Execute the full pipeline for indistinguishable particles."""
    state = inject(c)
    for gate in c.input_stage:
        state = apply_gate(state, gate, statistics)
    state = apply_gate(state, c.permutation, statistics)
    for gate in c.output_stage:
        state = apply_gate(state, gate, statistics)
    accepted, probability = post_select(state, c.target_pairs)
    return RunOutput(state, accepted, probability, statistics)


def run_distinguishable(c: Circuit) -> RunOutput:
    """Execute the pipeline with a distinct label on every particle.

    Terms whose particles land in the same modes but with different label
    assignments stay orthogonal, so no exchange interference occurs; the
    output carries only classical correlations.
    """
    state = inject_distinguishable(c)
    for gate in c.input_stage:
        state = apply_gate(state, gate, None)
    state = apply_gate(state, c.permutation, None)
    for gate in c.output_stage:
        state = apply_gate(state, gate, None)
    accepted, probability = post_select(state, c.target_pairs)
    return RunOutput(state, accepted, probability, None)


def extract_dual_rail(accepted: FockState, pairs: Sequence[Pair]) -> QubitState:
    """Read the dual-rail qubit register out of a post-selected state.

    The particle in pair ``k`` sitting on the pair's first mode encodes bit
    0, on the second mode bit 1; amplitudes are taken from the canonical
    ascending-mode form, so all exchange phases are already folded in.
    """
    if accepted.is_empty():
        raise ZeroState("no accepted terms to extract a qubit state from")
    k = len(pairs)
    vec = np.zeros(2**k, dtype=complex)
    for modes, species, amp in accepted.items():
        if species is not None:
            raise PatternMismatch(
                "labelled (distinguishable) terms do not form a coherent qubit state"
            )
        if not _pattern_accepted(modes, pairs):
            raise PatternMismatch(f"term {modes} does not match the rail pairs {pairs}")
        idx = 0
        for pair in pairs:
            idx = (idx << 1) | (0 if pair[0] in modes else 1)
        vec[idx] += amp
    total = np.linalg.norm(vec)
    if total == 0.0:
        raise ZeroState("accepted terms cancel to the zero vector")
    return QubitState(k, vec / total)


def computational_distribution(out: RunOutput, pairs: Sequence[Pair]) -> dict:
    """Probabilities of the rail-detection bit patterns, labels ignored.

    This is what ideal detectors on the rails record; it coincides for
    indistinguishable and distinguishable runs of the same circuit.
    """
    if out.probability <= 0:
        return {}
    dist: dict = {}
    for modes, _species, amp in out.accepted.items():
        bits = tuple(0 if pair[0] in modes else 1 for pair in pairs)
        dist[bits] = dist.get(bits, 0.0) + abs(amp) ** 2 / out.probability
    return dist
