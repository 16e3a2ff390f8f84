"""Uniform-superposition synthesis over a label range, the constant-shift
adder, and the cochain state preparation built from them.

A uniform superposition over ``|0>..|T>`` is built by scanning the bits of
``T`` from the most significant end. Each 1-bit ``k`` gets a split gate on
qubit ``k`` (conditioned on the higher bits of ``T``) that sends weight
``2^k / R`` into the branch where bit ``k`` is 0. That branch then takes
Hadamards on all lower bits. ``R`` counts the range elements still
reachable under the current prefix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cohomology import Cochain
from .mesh import EdgeTable
from .statevec.circuit import RY, Circuit, Gate, H, Perm, Reflect, SignFlip


class SynthesisError(ValueError):
    pass


class NonIntervalSupportError(SynthesisError):
    """The cochain support is not a consecutive label range under the table."""


@dataclass(frozen=True)
class RangeSpec:
    width: int
    lower: int
    upper: int

    def __post_init__(self):
        if self.width < 0:
            raise SynthesisError("register width must be non-negative")
        if not 0 <= self.lower <= self.upper < (1 << self.width):
            raise SynthesisError(f"range [{self.lower}, {self.upper}] does not fit in {self.width} qubits")

    @property
    def size(self) -> int:
        return self.upper - self.lower + 1


def _check_target(n: int, target: int) -> None:
    if n < 0 or not 0 <= target < (1 << n):
        raise SynthesisError(f"target {target} out of range for {n} qubits")


def split_amplitudes(n: int, target: int) -> list[tuple[int, float, float]]:
    """``(bit, c, d)`` for every 1-bit of ``target``; ``c`` goes to the Hadamard branch."""
    _check_target(n, target)
    out = []
    for k in range(n - 1, -1, -1):
        if target >> k & 1:
            remaining = (target & ((1 << (k + 1)) - 1)) + 1
            covered = 1 << k
            out.append((k, math.sqrt(covered / remaining), math.sqrt((remaining - covered) / remaining)))
    return out


def prefix_blocks(n: int, target: int) -> list[str]:
    """Block labels, one character per qubit from the most significant.

    ``U`` is the split gate, ``H`` a Hadamard, ``I`` idle, and ``0``/``1``
    a control value.
    """
    _check_target(n, target)
    bits = format(target, f"0{n}b") if n else ""
    blocks = []
    for k in range(n - 1, -1, -1):
        if not target >> k & 1:
            continue
        prefix = bits[: n - 1 - k]
        blocks.append(prefix + "U" + "I" * k)
        if k:
            blocks.append(prefix + "0" + "H" * k)
    return blocks


def synth_uniform_prefix(n: int, target: int, register: Sequence[int] | None = None,
                         qubit_count: int | None = None) -> Circuit:
    """Circuit taking ``|0..0>`` to the uniform superposition of ``|0>..|target>``."""
    _check_target(n, target)
    reg = list(range(n)) if register is None else [int(q) for q in register]
    if len(reg) != n:
        raise SynthesisError("register length must equal the width")
    nq = (max(reg) + 1 if reg else 0) if qubit_count is None else qubit_count
    qubit = lambda k: reg[n - 1 - k]  # noqa: E731
    gates: list[Gate] = []
    for k, c, _d in split_amplitudes(n, target):
        prefix = [(qubit(j), target >> j & 1) for j in range(n - 1, k, -1)]
        gates.append(RY(c, qubit(k), controls=prefix))
        if k:
            gates.append(H(*(qubit(j) for j in range(k - 1, -1, -1)), controls=prefix + [(qubit(k), 0)]))
    return Circuit(nq, tuple(gates))


def prefix_gate_counts(n: int, target: int) -> dict[str, int]:
    """Block count and elementary one-qubit gate count of :func:`synth_uniform_prefix`."""
    blocks = prefix_blocks(n, target)
    return {
        "blocks": len(blocks),
        "split_gates": sum(b.count("U") for b in blocks),
        "hadamards": sum(b.count("H") for b in blocks),
    }


def synth_shift_adder(n: int, shift: int, register: Sequence[int] | None = None,
                      qubit_count: int | None = None) -> Circuit:
    """Basis permutation ``|j> -> |(j + shift) mod 2^n>``."""
    if not 0 <= shift < (1 << n):
        raise SynthesisError(f"shift {shift} out of range for {n} qubits")
    reg = list(range(n)) if register is None else [int(q) for q in register]
    nq = (max(reg) + 1 if reg else 0) if qubit_count is None else qubit_count
    if shift == 0 or n == 0:
        return Circuit(nq)
    table = (np.arange(1 << n) + shift) % (1 << n)
    return Circuit(nq, (Perm(table, reg, tag="adder"),))


def cochain_amplitudes(cochain: Cochain, table: EdgeTable) -> np.ndarray:
    """Normalized cochain vector over register labels."""
    vec = cochain.encoded(table).astype(float)
    if not vec.any():
        raise SynthesisError("cochain has empty support")
    return vec / math.sqrt(cochain.support_size)


def support_range(cochain: Cochain, table: EdgeTable) -> RangeSpec:
    labels = sorted(table.label(e) for e in cochain.values)
    if not labels:
        raise SynthesisError("cochain has empty support")
    if labels[-1] - labels[0] + 1 != len(labels):
        raise NonIntervalSupportError(
            f"support labels span [{labels[0]}, {labels[-1]}] but only {len(labels)} are used")
    return RangeSpec(table.width, labels[0], labels[-1])


def prepare_cochain_state(cochain: Cochain, table: EdgeTable, register: Sequence[int] | None = None,
                          qubit_count: int | None = None) -> Circuit:
    """Uniform prefix over the support length, shifted into place, then sign flips."""
    rng = support_range(cochain, table)
    n = table.width
    reg = list(range(n)) if register is None else [int(q) for q in register]
    nq = max(reg) + 1 if qubit_count is None else qubit_count
    circ = synth_uniform_prefix(n, rng.size - 1, reg, nq) + synth_shift_adder(n, rng.lower, reg, nq)
    negative = [int(j) for j in np.flatnonzero(cochain.encoded(table) < 0)]
    if negative:
        circ = circ.then(SignFlip(negative, reg))
    return circ


def injection_circuit(amplitudes: np.ndarray, register: Sequence[int], qubit_count: int | None = None) -> Circuit:
    """A unitary whose first column is the real vector ``amplitudes``.

    Uses the Householder reflection swapping ``|0>`` with the target.
    """
    psi = np.asarray(amplitudes)
    if np.iscomplexobj(psi) and np.abs(psi.imag).max() > 0:
        raise SynthesisError("injection supports real amplitude vectors only")
    psi = psi.real.astype(float)
    if abs(np.linalg.norm(psi) - 1) > 1e-12:
        raise SynthesisError("target vector must be normalized")
    reg = [int(q) for q in register]
    nq = max(reg) + 1 if qubit_count is None else qubit_count
    w = -psi
    w[0] += 1.0
    if np.linalg.norm(w) < 1e-14:
        return Circuit(nq)
    return Circuit(nq, (Reflect(w, reg),))


def cochain_state_circuit(cochain: Cochain, table: EdgeTable, register: Sequence[int] | None = None,
                          qubit_count: int | None = None) -> tuple[Circuit, str]:
    """Interval construction when possible, otherwise direct injection.

    Returns the circuit and ``"interval"`` or ``"injection"``.
    """
    reg = list(range(table.width)) if register is None else list(register)
    try:
        return prepare_cochain_state(cochain, table, reg, qubit_count), "interval"
    except NonIntervalSupportError:
        return injection_circuit(cochain_amplitudes(cochain, table), reg, qubit_count), "injection"
