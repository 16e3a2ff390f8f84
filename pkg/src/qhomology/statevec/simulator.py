"""Statevector simulation over gate-list circuits."""
from __future__ import annotations

import math
import threading
from typing import Sequence

import numpy as np

from . import backend as _backend
from .circuit import Circuit, CircuitError, H, Perm, Phase


class OracleCounter:
    """Counts applications of oracle-tagged gates."""

    def __init__(self):
        self._lock = threading.Lock()
        self._value = 0

    def add(self, n: int) -> None:
        with self._lock:
            self._value += n

    @property
    def value(self) -> int:
        return self._value

    def reset(self) -> None:
        with self._lock:
            self._value = 0


GLOBAL_ORACLE_COUNTER = OracleCounter()


class StateVector:
    __slots__ = ("qubit_count", "amplitudes")

    def __init__(self, qubit_count: int, amplitudes: np.ndarray | None = None):
        self.qubit_count = int(qubit_count)
        if amplitudes is None:
            amplitudes = np.zeros(1 << self.qubit_count, dtype=complex)
            amplitudes[0] = 1.0
        else:
            amplitudes = np.ascontiguousarray(amplitudes, dtype=complex)
            if amplitudes.shape != (1 << self.qubit_count,):
                raise ValueError("amplitude vector has the wrong length")
        self.amplitudes = amplitudes

    @classmethod
    def zero(cls, qubit_count: int) -> "StateVector":
        return cls(qubit_count)

    @classmethod
    def basis(cls, qubit_count: int, index: int) -> "StateVector":
        amp = np.zeros(1 << qubit_count, dtype=complex)
        amp[index] = 1.0
        return cls(qubit_count, amp)

    def copy(self) -> "StateVector":
        return StateVector(self.qubit_count, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __repr__(self) -> str:
        return f"StateVector(qubits={self.qubit_count})"


def apply_inplace(circuit: Circuit, state: StateVector, counter: OracleCounter | None = None,
                  backend: str | None = None) -> StateVector:
    if circuit.qubit_count != state.qubit_count:
        raise CircuitError(f"circuit on {circuit.qubit_count} qubits applied to a "
                           f"{state.qubit_count}-qubit state")
    _backend.get_backend(backend).run(circuit.ops, state.amplitudes, state.qubit_count)
    calls = circuit.oracle_gates
    if calls:
        GLOBAL_ORACLE_COUNTER.add(calls)
        if counter is not None:
            counter.add(calls)
    return state


def apply(circuit: Circuit, state: StateVector, counter: OracleCounter | None = None,
          backend: str | None = None) -> StateVector:
    return apply_inplace(circuit, state.copy(), counter, backend)


def controlled_apply(circuit: Circuit, control: int, state: StateVector, value: int = 1,
                     counter: OracleCounter | None = None, backend: str | None = None) -> StateVector:
    return apply(circuit.widened(state.qubit_count).controlled(control, value), state, counter, backend)


def qft(qubits: Sequence[int], qubit_count: int | None = None) -> Circuit:
    """Textbook QFT on ``qubits`` (first listed = most significant), bit reversal included."""
    qubits = [int(q) for q in qubits]
    if not qubits:
        raise ValueError("QFT needs at least one qubit")
    n = max(qubits) + 1 if qubit_count is None else qubit_count
    gates = []
    p = len(qubits)
    for j in range(p):
        gates.append(H(qubits[j]))
        for k in range(j + 1, p):
            gates.append(Phase(2 * math.pi / 2 ** (k - j + 1), qubits[j], controls=[(qubits[k], 1)]))
    if p > 1:
        contiguous = qubits == list(range(qubits[0], qubits[0] + p))
        if contiguous:
            rev = np.array([int(format(r, f"0{p}b")[::-1], 2) for r in range(1 << p)])
            gates.append(Perm(rev, qubits))
        else:
            from .circuit import X

            for j in range(p // 2):
                a, b = qubits[j], qubits[p - 1 - j]
                gates += [X(a, controls=[(b, 1)]), X(b, controls=[(a, 1)]), X(a, controls=[(b, 1)])]
    return Circuit(n, tuple(gates))


def inverse_qft(qubits: Sequence[int], qubit_count: int | None = None) -> Circuit:
    return qft(qubits, qubit_count).inverse()


def register_distribution(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Marginal distribution of ``qubits`` read as an integer, first qubit most significant."""
    qubits = [int(q) for q in qubits]
    n = state.qubit_count
    if len(set(qubits)) != len(qubits) or any(not 0 <= q < n for q in qubits):
        raise ValueError("register qubits must be distinct and in range")
    p = state.probabilities().reshape((2,) * n)
    others = tuple(q for q in range(n) if q not in qubits)
    m = p.sum(axis=others) if others else p
    order = sorted(qubits)
    m = np.transpose(m, [order.index(q) for q in qubits])
    return m.reshape(-1)


def measure_register(state: StateVector, qubits: Sequence[int], rng: np.random.Generator | int | None = None):
    """Sample ``qubits`` once; returns ``(outcome_bits, collapsed_state)``."""
    rng = np.random.default_rng(rng)
    dist = register_distribution(state, qubits)
    outcome = int(rng.choice(len(dist), p=dist / dist.sum()))
    bits = tuple(int(b) for b in format(outcome, f"0{len(qubits)}b"))
    n = state.qubit_count
    amp = state.amplitudes.reshape((2,) * n).copy()
    keep = np.ones(amp.shape, dtype=bool)
    for q, b in zip(qubits, bits):
        idx: list = [slice(None)] * n
        idx[q] = 1 - b
        keep[tuple(idx)] = False
    amp[~keep] = 0
    amp = amp.reshape(-1)
    amp /= np.linalg.norm(amp)
    return bits, StateVector(n, amp)


def sample_register(state: StateVector, qubits: Sequence[int], shots: int,
                    rng: np.random.Generator | int | None = None) -> np.ndarray:
    """Outcome counts over ``shots`` independent measurements."""
    rng = np.random.default_rng(rng)
    dist = register_distribution(state, qubits)
    return rng.multinomial(shots, dist / dist.sum())
