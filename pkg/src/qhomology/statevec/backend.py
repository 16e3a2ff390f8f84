"""Kernel backend selection.

The compiled Cython extension is used when it imports; otherwise the numpy
fallback. ``QHOMOLOGY_BACKEND=python`` forces the fallback,
``QHOMOLOGY_BACKEND=cython`` makes a missing extension an error.
"""
from __future__ import annotations

import os

import numpy as np

from . import _pykernels

try:
    from . import _kernels as _ckernels
except ImportError:  # pragma: no cover - depends on build
    _ckernels = None

OP_U1, OP_X, OP_PHASE, OP_PERM, OP_DIAG, OP_REFLECT = range(6)


def compile_gate(gate, qubit_count: int) -> list[tuple]:
    """Kernel ops ``(code, qubit, width, payload, cmask, cval, controls)``."""
    cmask = cval = 0
    for q, v in gate.controls:
        bit = 1 << (qubit_count - 1 - q)
        cmask |= bit
        if v:
            cval |= bit
    controls = gate.controls
    kind = gate.kind
    if kind in ("perm", "diag", "reflect"):
        code = {"perm": OP_PERM, "diag": OP_DIAG, "reflect": OP_REFLECT}[kind]
        return [(code, gate.targets[0], len(gate.targets), gate.payload, cmask, cval, controls)]
    if kind == "x":
        code, payload = OP_X, None
    elif kind == "z":
        code, payload = OP_PHASE, complex(-1)
    elif kind == "phase":
        code, payload = OP_PHASE, complex(np.exp(1j * gate.payload))
    else:
        code, payload = OP_U1, np.ascontiguousarray(gate.matrix(), dtype=complex)
    return [(code, q, 1, payload, cmask, cval, controls) for q in gate.targets]


class _Backend:
    def __init__(self, name: str, module):
        self.name = name
        self.module = module

    def run(self, ops, state: np.ndarray, qubit_count: int) -> None:
        self.module.run(ops, state, qubit_count)

    def __repr__(self) -> str:
        return f"<backend {self.name}>"


PYTHON = _Backend("python", _pykernels)
CYTHON = _Backend("cython", _ckernels) if _ckernels is not None else None


def available() -> list[str]:
    return ["cython", "python"] if CYTHON is not None else ["python"]


def get_backend(name: str | None = None) -> _Backend:
    if name is None:
        return ACTIVE
    if name == "python":
        return PYTHON
    if name == "cython":
        if CYTHON is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return CYTHON
    raise ValueError(f"unknown backend {name!r}")


def _select() -> _Backend:
    choice = os.environ.get("QHOMOLOGY_BACKEND", "auto").lower()
    if choice == "auto":
        return CYTHON if CYTHON is not None else PYTHON
    return get_backend(choice)


ACTIVE = _select()


def set_backend(name: str) -> _Backend:
    global ACTIVE
    ACTIVE = get_backend(name)
    return ACTIVE
