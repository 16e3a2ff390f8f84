"""Gate-list circuits.

Qubit 0 is the most significant bit of a basis index: in a ``Q``-qubit state,
qubit ``q`` is bit ``Q - 1 - q``. Register gates (``perm``, ``diag``,
``reflect``) act on a contiguous ascending run of qubits read MSB first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

ONE_QUBIT_KINDS = ("h", "x", "z", "phase", "u")
REGISTER_KINDS = ("perm", "diag", "reflect")

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


class CircuitError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Gate:
    kind: str
    targets: tuple[int, ...]
    controls: tuple[tuple[int, int], ...] = ()
    payload: np.ndarray | float | None = field(default=None, repr=False)
    tag: str | None = None

    def __post_init__(self):
        if self.kind not in ONE_QUBIT_KINDS + REGISTER_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        targets = tuple(int(q) for q in self.targets)
        controls = tuple((int(q), int(v)) for q, v in self.controls)
        if not targets:
            raise CircuitError("gate needs at least one target")
        used = [q for q, _ in controls]
        if len(set(used)) != len(used) or set(used) & set(targets):
            raise CircuitError(f"control/target collision in {self.kind} gate")
        if any(v not in (0, 1) for _, v in controls):
            raise CircuitError("control values must be 0 or 1")
        if self.kind in REGISTER_KINDS:
            if list(targets) != list(range(targets[0], targets[0] + len(targets))):
                raise CircuitError("register gates need a contiguous ascending qubit run")
            size = 1 << len(targets)
            p = np.asarray(self.payload)
            if p.shape != (size,):
                raise CircuitError(f"{self.kind} payload must have length {size}")
            if self.kind == "perm":
                p = p.astype(np.int64)
                if not np.array_equal(np.sort(p), np.arange(size)):
                    raise CircuitError("perm table is not a bijection")
            else:
                p = p.astype(complex)
                if self.kind == "diag" and not np.allclose(np.abs(p), 1, atol=1e-12):
                    raise CircuitError("diag entries must have unit modulus")
                if self.kind == "reflect" and not np.linalg.norm(p) > 0:
                    raise CircuitError("reflection vector must be non-zero")
            object.__setattr__(self, "payload", p)
        elif self.kind == "u":
            m = np.asarray(self.payload, dtype=complex)
            if m.shape != (2, 2) or not np.allclose(m.conj().T @ m, np.eye(2), atol=1e-12):
                raise CircuitError("u payload must be a 2x2 unitary")
            object.__setattr__(self, "payload", m)
        elif self.kind == "phase":
            object.__setattr__(self, "payload", float(self.payload))
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "controls", controls)

    @property
    def qubits(self) -> set[int]:
        return set(self.targets) | {q for q, _ in self.controls}

    def matrix(self) -> np.ndarray:
        """2x2 matrix of a one-qubit kind."""
        if self.kind == "h":
            return _H
        if self.kind == "x":
            return np.array([[0, 1], [1, 0]], dtype=complex)
        if self.kind == "z":
            return np.array([[1, 0], [0, -1]], dtype=complex)
        if self.kind == "phase":
            return np.array([[1, 0], [0, np.exp(1j * self.payload)]], dtype=complex)
        if self.kind == "u":
            return self.payload
        raise CircuitError(f"{self.kind} is a register gate")

    def inverse(self) -> "Gate":
        kind, p = self.kind, self.payload
        if kind == "phase":
            p = -p
        elif kind == "u":
            p = p.conj().T
        elif kind == "perm":
            p = np.argsort(p)
        elif kind == "diag":
            p = p.conj()
        tag = self.tag
        if tag and tag.endswith("^-1"):
            tag = tag[:-3]
        elif tag:
            tag = tag + "^-1"
        return Gate(kind, self.targets, self.controls, p, tag)

    def with_controls(self, extra: Iterable[tuple[int, int]]) -> "Gate":
        return Gate(self.kind, self.targets, self.controls + tuple(extra), self.payload, self.tag)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "targets": list(self.targets),
               "controls": [list(c) for c in self.controls]}
        if self.kind == "phase":
            out["angle"] = self.payload
        elif self.kind == "u":
            out["matrix"] = [[[z.real, z.imag] for z in row] for row in self.payload]
        elif self.kind == "perm":
            out["table"] = self.payload.tolist()
        elif self.kind in ("diag", "reflect"):
            out["values"] = [[z.real, z.imag] for z in self.payload]
        if self.tag:
            out["tag"] = self.tag
        return out


def _ctl(controls) -> tuple[tuple[int, int], ...]:
    return tuple(controls)


def H(*targets: int, controls=()) -> Gate:
    return Gate("h", targets, _ctl(controls))


def X(*targets: int, controls=()) -> Gate:
    return Gate("x", targets, _ctl(controls))


def Z(*targets: int, controls=()) -> Gate:
    return Gate("z", targets, _ctl(controls))


def Phase(angle: float, target: int, controls=()) -> Gate:
    return Gate("phase", (target,), _ctl(controls), angle)


def U(matrix, target: int, controls=()) -> Gate:
    return Gate("u", (target,), _ctl(controls), matrix)


def RY(cos_half: float, target: int, controls=()) -> Gate:
    """Real rotation with ``|0> -> c|0> + s|1>`` where ``c = cos_half``."""
    c = float(cos_half)
    s = math.sqrt(max(0.0, 1.0 - c * c))
    return U(np.array([[c, -s], [s, c]]), target, controls)


def Perm(table, register: Sequence[int], controls=(), tag: str | None = None) -> Gate:
    return Gate("perm", tuple(register), _ctl(controls), table, tag)


def Diag(values, register: Sequence[int], controls=()) -> Gate:
    return Gate("diag", tuple(register), _ctl(controls), values)


def SignFlip(labels: Iterable[int], register: Sequence[int], controls=()) -> Gate:
    d = np.ones(1 << len(register), dtype=complex)
    for lab in labels:
        d[lab] = -1
    return Diag(d, register, controls)


def Reflect(vector, register: Sequence[int], controls=()) -> Gate:
    """Householder reflection ``I - 2|w><w|/<w|w>``."""
    return Gate("reflect", tuple(register), _ctl(controls), vector)


@dataclass(frozen=True, eq=False)
class Circuit:
    qubit_count: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        gates = tuple(self.gates)
        for g in gates:
            bad = [q for q in g.qubits if not 0 <= q < self.qubit_count]
            if bad:
                raise CircuitError(f"qubit index {bad[0]} out of range for {self.qubit_count} qubits")
        object.__setattr__(self, "gates", gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        return Circuit(max(self.qubit_count, other.qubit_count), self.gates + other.gates)

    def then(self, *gates: Gate) -> "Circuit":
        return Circuit(self.qubit_count, self.gates + gates)

    def widened(self, qubit_count: int) -> "Circuit":
        return Circuit(qubit_count, self.gates)

    def shifted(self, offset: int, qubit_count: int | None = None) -> "Circuit":
        """The same circuit with every qubit index moved by ``offset``."""
        n = self.qubit_count + offset if qubit_count is None else qubit_count
        gates = [Gate(g.kind, tuple(q + offset for q in g.targets),
                      tuple((q + offset, v) for q, v in g.controls), g.payload, g.tag)
                 for g in self.gates]
        return Circuit(n, tuple(gates))

    def inverse(self) -> "Circuit":
        return Circuit(self.qubit_count, tuple(g.inverse() for g in reversed(self.gates)))

    @cached_property
    def qubits_used(self) -> set[int]:
        out: set[int] = set()
        for g in self.gates:
            out |= g.qubits
        return out

    def controlled(self, control: int, value: int = 1) -> "Circuit":
        cache = self.__dict__.setdefault("_controlled_cache", {})
        key = (control, value)
        if key not in cache:
            if control in self.qubits_used:
                raise CircuitError(f"control qubit {control} is used by the circuit")
            n = max(self.qubit_count, control + 1)
            cache[key] = Circuit(n, tuple(g.with_controls([(control, value)]) for g in self.gates))
        return cache[key]

    def count(self, tag: str | None = None) -> int:
        if tag is None:
            return len(self.gates)
        return sum(1 for g in self.gates if g.tag and g.tag.split("^")[0] == tag)

    @cached_property
    def ops(self) -> list[tuple]:
        """Compiled kernel operations, see :mod:`qhomology.statevec.backend`."""
        from .backend import compile_gate

        out = []
        for g in self.gates:
            out.extend(compile_gate(g, self.qubit_count))
        return out

    @cached_property
    def oracle_gates(self) -> int:
        return sum(1 for g in self.gates if g.tag and g.tag.startswith("oracle"))

    def to_json(self) -> dict:
        return {"qubit_count": self.qubit_count, "gates": [g.to_json() for g in self.gates]}

    def dense_matrix(self) -> np.ndarray:
        """Full unitary by applying the circuit to every basis state (small circuits only)."""
        from .simulator import StateVector, apply

        n = 1 << self.qubit_count
        cols = []
        for k in range(n):
            cols.append(apply(self, StateVector.basis(self.qubit_count, k)).amplitudes)
        return np.array(cols).T
