"""Shared meshes, bases and the loop corpus used across the suite."""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from qhomology.cohomology import CohomologyBasis, cohomology_basis, evaluate_cochain
from qhomology.homology import boundary_of_faces, homology_basis, tree_cotree_basis
from qhomology.mesh import Mesh, generate_double_torus, generate_torus, next_power_of_two, seven_vertex_torus
from qhomology.oracle import LoopSpec, loop_from_chain, loop_from_cycle, loop_from_vertex_walk


@lru_cache(maxsize=None)
def mesh_named(name: str) -> Mesh:
    if name == "torus7":
        return seven_vertex_torus()
    if name.startswith("torus"):
        r, c = name[5:].split("x")
        return generate_torus(int(r), int(c))
    if name == "genus2":
        return generate_double_torus()
    raise KeyError(name)


@lru_cache(maxsize=None)
def cobasis_named(name: str, kind: str = "auto") -> CohomologyBasis:
    mesh = mesh_named(name)
    hb = tree_cotree_basis(mesh) if kind == "tree-cotree" else homology_basis(mesh, kind)
    return cohomology_basis(mesh, hb)


def chain_sum(*chains: dict[int, int], weights=None) -> dict[int, int]:
    weights = weights or [1] * len(chains)
    out: dict[int, int] = {}
    for w, ch in zip(weights, chains):
        for e, c in ch.items():
            out[e] = out.get(e, 0) + w * c
    return {e: c for e, c in out.items() if c}


def fit_modulus(loop: LoopSpec) -> LoopSpec:
    K = max(2, next_power_of_two(loop.max_multiplicity() + 1))
    return loop.with_modulus(K)


def random_boundary(mesh: Mesh, rng: random.Random, max_faces: int | None = None):
    k = rng.randint(1, max_faces or mesh.F)
    return boundary_of_faces(mesh, rng.sample(range(mesh.F), k))


def torus_walk(rows: int, cols: int, steps: list[tuple[int, int]], start=(0, 0)) -> list[int]:
    """Vertex walk on a generated torus from unit moves ``(di, dj)``; diagonal moves must be (+1, +1) or (-1, -1)."""
    i, j = start
    walk = [i * cols + j]
    for di, dj in steps:
        i, j = (i + di) % rows, (j + dj) % cols
        walk.append(i * cols + j)
    return walk


def winding_curve(rows: int, cols: int, a: int, b: int) -> list[tuple[int, int]]:
    """Monotone staircase moving ``a`` times around in ``j`` and ``b`` times in ``i``."""
    nj, ni = a * cols, b * rows
    steps, x, y = [], 0, 0
    while x < nj or y < ni:
        if y * nj < x * ni or x == nj:  # keep close to the straight line
            steps.append((1, 0))
            y += 1
        else:
            steps.append((0, 1))
            x += 1
    return steps


@dataclass(frozen=True)
class CorpusLoop:
    name: str
    mesh: str
    loop: LoopSpec
    kind: str


def loop_corpus(seed: int = 7) -> list[CorpusLoop]:
    """At least 50 loops over several meshes: boundaries, basis curves, sums, winding and self-crossing curves."""
    rng = random.Random(seed)
    out: list[CorpusLoop] = []

    def add(name, mesh_name, loop, kind):
        out.append(CorpusLoop(name, mesh_name, fit_modulus(loop), kind))

    for mname in ("torus4x4", "torus3x5", "torus7", "genus2"):
        mesh = mesh_named(mname)
        cb = cobasis_named(mname)
        hb = cb.homology
        for k in range(4):
            b = random_boundary(mesh, rng, max_faces=8)
            add(f"{mname}-boundary-{k}", mname, loop_from_chain(mesh, b.as_chain, K=8), "boundary")
        for i, h in enumerate(hb):
            add(f"{mname}-h{i}", mname, loop_from_cycle(mesh, h), "basis")
            add(f"{mname}-h{i}-rev", mname, loop_from_cycle(mesh, h.reversed()), "basis")
        chains = [h.as_chain for h in hb]
        add(f"{mname}-sum01", mname, loop_from_chain(mesh, chain_sum(chains[0], chains[1]), K=8), "sum")
        add(f"{mname}-diff01", mname, loop_from_chain(mesh, chain_sum(chains[0], chains[1], weights=[1, -1]), K=8),
            "sum")
        add(f"{mname}-2h0", mname, loop_from_chain(mesh, chain_sum(chains[0], weights=[2]), K=8), "sum")
        b = random_boundary(mesh, rng, max_faces=6)
        add(f"{mname}-h1+bd", mname, loop_from_chain(mesh, chain_sum(chains[1], b.as_chain), K=8), "sum")
        if len(chains) == 4:
            add(f"{mname}-h0+h3", mname, loop_from_chain(mesh, chain_sum(chains[0], chains[3]), K=8), "sum")
            add(f"{mname}-all", mname, loop_from_chain(mesh, chain_sum(*chains, weights=[1, -1, 1, 1]), K=8), "sum")

    for mname, (r, c) in (("torus4x4", (4, 4)), ("torus3x5", (3, 5))):
        mesh = mesh_named(mname)
        for a, b in ((1, 1), (1, 2), (2, 1), (1, 3)):
            walk = torus_walk(r, c, winding_curve(r, c, a, b))
            add(f"{mname}-wind{a}{b}", mname, loop_from_vertex_walk(mesh, walk, K=8), "winding")
        # figure eight through vertex 0: a row loop followed by a column loop
        row = torus_walk(r, c, [(0, 1)] * c)
        col = torus_walk(r, c, [(1, 0)] * r)
        add(f"{mname}-figure8", mname, loop_from_vertex_walk(mesh, row + col[1:], K=8), "self-crossing")
        # a row loop traversed twice, touching itself everywhere
        add(f"{mname}-row-twice", mname, loop_from_vertex_walk(mesh, row + row[1:], K=8), "self-crossing")
        # one face boundary followed by a row loop from the same vertex
        steps = [(1, 0), (0, 1), (-1, -1)] + [(0, 1)] * c
        add(f"{mname}-triangle-row", mname, loop_from_vertex_walk(mesh, torus_walk(r, c, steps), K=8),
            "self-crossing")
    return out


@lru_cache(maxsize=None)
def corpus_verdicts(margin: int = 4, seed: int = 0) -> dict:
    """QPE verdict for every corpus loop, cached because the sweep is the slowest part of the suite."""
    from qhomology.algorithm import AlgorithmConfig, detect_homology

    out = {}
    for item in loop_corpus():
        config = AlgorithmConfig(K=item.loop.K, margin=margin, seed=seed)
        out[item.name] = detect_homology(mesh_named(item.mesh), cobasis_named(item.mesh), item.loop, config)
    return out


def classical(cb: CohomologyBasis, loop: LoopSpec) -> tuple[int, ...]:
    return tuple(evaluate_cochain(w, loop.chain()) for w in cb.cochains)
