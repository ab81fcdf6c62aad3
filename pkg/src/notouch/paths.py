"""Classical path histories and the no-touching verifier.

A path history assigns every particle a definite mode at each stage
boundary: after injection, after the input stage, after the permutation and
after the output stage.  A particle changes mode only inside a gate whose
support contains it, branching once per support mode with the corresponding
matrix element as amplitude.  The history's amplitude is the product of the
traversed matrix elements times the exchange phase of the permutation that
sorts the particles' final modes (particles are identified by injection
order).

Two particles "touch" when they share a mode at a stage boundary or sit
inside the same gate's support during a stage.  The verifier certifies that
no history contributing to a post-selected outcome ever touches; dropping
post-selection exposes the touching branches that the accepted events never
contain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .circuit import Circuit, LocalUnitary, validate_circuit
from .engine import _pattern_accepted
from .errors import InvalidCircuit, TooManyHistories
from .fock import Statistics, count_inversions

STAGE_BOUNDARIES = ("injection", "input", "permutation", "output")

DEFAULT_HISTORY_LIMIT = 10**6


@dataclass(frozen=True)
class PathHistory:
    """Modes of every particle at each stage boundary, with amplitude.

    ``particle_modes[b][p]`` is the mode of particle ``p`` at boundary ``b``
    (boundaries ordered as in ``STAGE_BOUNDARIES``).
    """

    particle_modes: Tuple[Tuple[int, ...], ...]
    amplitude: complex

    @property
    def final_modes(self) -> Tuple[int, ...]:
        return self.particle_modes[-1]


@dataclass(frozen=True)
class TouchEvent:
    """A point where two particles co-locate in a history."""

    stage: str
    location: str
    history: PathHistory


@dataclass(frozen=True)
class TouchReport:
    passed: bool
    counterexamples: Tuple[TouchEvent, ...]
    histories_total: int
    histories_checked: int

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


def _stage_gate_for(mode: int, gates: Sequence[LocalUnitary]):
    for gate in gates:
        if mode in gate.support:
            return gate
    return None


def _particle_paths(c: Circuit, injected: int) -> List[Tuple[Tuple[int, int, int, int], complex]]:
    """All branch choices for one particle: boundary modes and amplitude."""
    paths = []
    gate_in = _stage_gate_for(injected, c.input_stage)
    if gate_in is None:
        input_branches = [(injected, 1.0 + 0.0j)]
    else:
        src = gate_in.support.index(injected)
        input_branches = [
            (dest, complex(gate_in.matrix[i, src]))
            for i, dest in enumerate(gate_in.support)
        ]
    for after_input, amp_in in input_branches:
        after_perm = c.permutation.apply(after_input)
        gate_out = _stage_gate_for(after_perm, c.output_stage)
        if gate_out is None:
            paths.append(((injected, after_input, after_perm, after_perm), amp_in))
        else:
            src = gate_out.support.index(after_perm)
            for i, dest in enumerate(gate_out.support):
                amp = amp_in * complex(gate_out.matrix[i, src])
                paths.append(((injected, after_input, after_perm, dest), amp))
    return paths


def enumerate_histories(
    c: Circuit,
    statistics: Statistics,
    max_histories: int = DEFAULT_HISTORY_LIMIT,
) -> List[PathHistory]:
    """Exhaustive branch assignment for every particle.

    Histories whose particles end in the same mode are retained (their
    amplitude carries no exchange phase, since sorting a collision is not
    defined); callers that compare against engine amplitudes should group by
    final pattern, where such branches either cancel or correspond to weight
    outside the single-occupancy sector.
    """
    report = validate_circuit(c)
    if not report.ok:
        raise InvalidCircuit("; ".join(report.violations))

    per_particle = [_particle_paths(c, mode) for mode in c.injections]
    total = 1
    for paths in per_particle:
        total *= len(paths)
    if total > max_histories:
        raise TooManyHistories(
            f"{total} histories exceed the enumeration limit of {max_histories}"
        )

    histories = []
    for combo in itertools.product(*per_particle):
        amplitude = 1.0 + 0.0j
        for _, amp in combo:
            amplitude *= amp
        finals = tuple(modes[3] for modes, _ in combo)
        if len(set(finals)) == len(finals):
            amplitude *= statistics.reorder_phase(count_inversions(finals))
        boundaries = tuple(
            tuple(modes[b] for modes, _ in combo) for b in range(4)
        )
        histories.append(PathHistory(boundaries, amplitude))
    return histories


def history_pattern_sums(histories: Sequence[PathHistory]) -> dict:
    """Coherent amplitude per sorted final pattern (collision-free only)."""
    sums: dict = {}
    for h in histories:
        finals = h.final_modes
        if len(set(finals)) != len(finals):
            continue
        key = tuple(sorted(finals))
        sums[key] = sums.get(key, 0.0 + 0.0j) + h.amplitude
    return sums


def _touch_events(history: PathHistory, c: Circuit) -> List[TouchEvent]:
    events = []
    for b, stage in enumerate(STAGE_BOUNDARIES):
        modes = history.particle_modes[b]
        shared = {m for m in modes if modes.count(m) > 1}
        for m in sorted(shared):
            events.append(TouchEvent(stage, f"mode {m}", history))
    for stage, boundary, gates in (
        ("input", 0, c.input_stage),
        ("output", 2, c.output_stage),
    ):
        entering = history.particle_modes[boundary]
        for gate in gates:
            inside = [m for m in entering if m in gate.support]
            if len(inside) > 1:
                events.append(
                    TouchEvent(stage, f"gate on modes {gate.support}", history)
                )
    return events


def verify_no_touching(
    c: Circuit,
    statistics: Statistics,
    post_select: bool = True,
    amplitude_tolerance: float = 1e-12,
    max_histories: int = DEFAULT_HISTORY_LIMIT,
) -> TouchReport:
    """Certify that accepted outcomes involve no touching histories.

    Checks every history with amplitude above ``amplitude_tolerance`` whose
    final pattern survives post-selection (or every such history when
    ``post_select`` is false) for mode sharing at stage boundaries and for
    two particles inside one gate.
    """
    histories = enumerate_histories(c, statistics, max_histories=max_histories)
    counterexamples: List[TouchEvent] = []
    checked = 0
    for history in histories:
        if abs(history.amplitude) <= amplitude_tolerance:
            continue
        if post_select and not _pattern_accepted(history.final_modes, c.target_pairs):
            continue
        checked += 1
        counterexamples.extend(_touch_events(history, c))
    return TouchReport(
        passed=not counterexamples,
        counterexamples=tuple(counterexamples),
        histories_total=len(histories),
        histories_checked=checked,
    )
