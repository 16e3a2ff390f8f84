"""Compare the compiled and pure-numpy statevector kernels.

    python3 benchmarks/bench_backends.py [--repeat N] [--qubits 10 14 18]

Two workloads: a random gate mix at several register sizes, and one
power-engine phase estimation from the library pipeline.
"""
from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from qhomology.algorithm import build_state_prep_U, qpe_distribution
from qhomology.cohomology import cohomology_basis
from qhomology.homology import homology_basis
from qhomology.mesh import generate_torus
from qhomology.oracle import build_oracle, loop_from_vertex_walk, status_width
from qhomology.statevec import RegisterLayout, StateVector, apply_inplace, backend
from qhomology.statevec.circuit import Circuit, H, Perm, Phase, X


def random_circuit(n: int, gates: int, rng: np.random.Generator) -> Circuit:
    out = []
    for _ in range(gates):
        kind = rng.integers(4)
        q = int(rng.integers(n))
        ctl = [(int(c), int(rng.integers(2))) for c in rng.choice([i for i in range(n) if i != q],
                                                                   size=int(rng.integers(3)), replace=False)]
        if kind == 0:
            out.append(H(q, controls=ctl))
        elif kind == 1:
            out.append(X(q, controls=ctl))
        elif kind == 2:
            out.append(Phase(float(rng.uniform(0, 6.28)), q, controls=ctl))
        else:
            w = min(4, n - q)
            out.append(Perm(rng.permutation(1 << w), list(range(q, q + w))))
    return Circuit(n, tuple(out))


def time_run(fn, repeat: int) -> float:
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def qpe_workload():
    mesh = generate_torus(4, 4)
    cb = cohomology_basis(mesh, homology_basis(mesh))
    loop = loop_from_vertex_walk(mesh, [0, 1, 2, 3, 0])
    table = cb.table_for(0)
    layout = RegisterLayout(table.width, status_width(2))
    prep = build_state_prep_U(cb[0], build_oracle(loop, table, layout), table, layout)
    return lambda: qpe_distribution(prep, 7, "power")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--qubits", type=int, nargs="+", default=[10, 14, 18])
    parser.add_argument("--gates", type=int, default=200)
    args = parser.parse_args()

    names = [b for b in ("cython", "python") if b in backend.available()]
    if "cython" not in names:
        print("compiled kernels not built; only the numpy backend is timed")
    rng = np.random.default_rng(0)
    rows = []
    for n in args.qubits:
        circ = random_circuit(n, args.gates, rng)
        times = {}
        for name in names:
            def run(name=name):
                apply_inplace(circ, StateVector(n), backend=name)
            times[name] = time_run(run, args.repeat)
        rows.append((f"random {args.gates} gates, {n} qubits", times))

    workload = qpe_workload()
    times = {}
    for name in names:
        previous = backend.ACTIVE.name
        backend.set_backend(name)
        try:
            times[name] = time_run(workload, max(1, args.repeat // 2))
        finally:
            backend.set_backend(previous)
    rows.append(("phase estimation, torus(4,4), p=7", times))

    print(f"{'workload':<40}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label, t in rows:
        line = f"{label:<40}" + "".join(f"{t[n] * 1e3:>10.1f}ms" for n in names)
        if len(names) == 2:
            line += f"{t['python'] / t['cython']:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
