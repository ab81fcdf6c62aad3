"""Dense multi-qubit states extracted from dual-rail encodings."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, ZeroState


@dataclass(frozen=True)
class QubitState:
    """Dense state of ``num_qubits`` qubits.

    The amplitude vector has length ``2**num_qubits`` and is ordered with
    qubit 1 as the most significant bit; bit value 0 is the "up" rail.
    """

    num_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.num_qubits,):
            raise DimensionMismatch(
                f"expected {2**self.num_qubits} amplitudes, got {amps.shape}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "QubitState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        k = int(np.log2(len(amps)))
        if 2**k != len(amps):
            raise DimensionMismatch("amplitude vector length is not a power of two")
        return cls(k, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "QubitState":
        n = self.norm()
        if n == 0.0:
            raise ZeroState("cannot normalize the zero vector")
        return QubitState(self.num_qubits, self.amplitudes / n)

    def amplitude(self, bits) -> complex:
        """Amplitude of the basis state given by a bit sequence (qubit 1 first)."""
        if len(bits) != self.num_qubits:
            raise DimensionMismatch("bit string length must equal qubit count")
        idx = 0
        for b in bits:
            idx = (idx << 1) | int(b)
        return complex(self.amplitudes[idx])
