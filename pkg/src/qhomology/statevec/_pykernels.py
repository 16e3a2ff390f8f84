"""Pure numpy kernels on ``(2,) * n`` tensor views of the state."""
from __future__ import annotations

import numpy as np


def _index(nq: int, controls) -> list:
    idx: list = [slice(None)] * nq
    for q, v in controls:
        idx[q] = slice(v, v + 1)  # a slice keeps the result a view
    return idx


def apply_1q(state, nq, q, m, controls):
    t = state.reshape((2,) * nq)
    i0 = _index(nq, controls)
    i1 = list(i0)
    i0[q], i1[q] = slice(0, 1), slice(1, 2)
    a, b = t[tuple(i0)], t[tuple(i1)]
    na = m[0, 0] * a + m[0, 1] * b
    b *= m[1, 1]
    b += m[1, 0] * a
    a[...] = na


def apply_x(state, nq, q, controls):
    t = state.reshape((2,) * nq)
    i0 = _index(nq, controls)
    i1 = list(i0)
    i0[q], i1[q] = slice(0, 1), slice(1, 2)
    a, b = t[tuple(i0)], t[tuple(i1)]
    tmp = a.copy()
    a[...] = b
    b[...] = tmp


def apply_phase(state, nq, q, factor, controls):
    t = state.reshape((2,) * nq)
    i1 = _index(nq, controls)
    i1[q] = slice(1, 2)
    t[tuple(i1)] *= factor


def _register_view(state, nq, q0, width, controls):
    shape = (2,) * q0 + (1 << width,) + (2,) * (nq - q0 - width)
    t = state.reshape(shape)
    idx: list = [slice(None)] * len(shape)
    for q, v in controls:
        if q0 <= q < q0 + width:
            raise ValueError("control inside register")
        idx[q if q < q0 else q - width + 1] = slice(v, v + 1)
    return t[tuple(idx)], q0


def apply_perm(state, nq, q0, width, table, controls):
    view, axis = _register_view(state, nq, q0, width, controls)
    inv = np.empty_like(table)
    inv[table] = np.arange(len(table))
    view[...] = np.take(view, inv, axis=axis)


def apply_diag(state, nq, q0, width, diag, controls):
    view, axis = _register_view(state, nq, q0, width, controls)
    shape = [1] * view.ndim
    shape[axis] = len(diag)
    view *= diag.reshape(shape)


def apply_reflect(state, nq, q0, width, w, controls):
    view, axis = _register_view(state, nq, q0, width, controls)
    vv = np.moveaxis(view, axis, -1)
    coef = (vv @ w.conj()) * (2.0 / np.vdot(w, w).real)
    vv -= coef[..., None] * w


def run(ops, state, nq):
    for code, q, width, payload, _cm, _cv, controls in ops:
        if code == 0:
            apply_1q(state, nq, q, payload, controls)
        elif code == 1:
            apply_x(state, nq, q, controls)
        elif code == 2:
            apply_phase(state, nq, q, payload, controls)
        elif code == 3:
            apply_perm(state, nq, q, width, payload, controls)
        elif code == 4:
            apply_diag(state, nq, q, width, payload, controls)
        else:
            apply_reflect(state, nq, q, width, payload, controls)
