"""Integer cohomology bases dual to a homology basis, classical cochain
evaluation and the edge orientation/labelling used for state preparation.

Cochains are stored against the mesh's canonical edge orientation:
``values[e]`` is the value on ``lo -> hi``, and the reversed half-edge carries
the negated value.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .homology import Cycle, HomologyBasis, is_simple
from .mesh import EdgeTable, Mesh, edge_table


class CohomologyError(RuntimeError):
    pass


@dataclass(frozen=True)
class Cochain:
    values: dict[int, int]

    def __post_init__(self):
        vals = {int(e): int(v) for e, v in self.values.items() if v}
        bad = {e: v for e, v in vals.items() if v not in (-1, 1)}
        if bad:
            raise CohomologyError(f"cochain values must be ±1, got {bad}")
        object.__setattr__(self, "values", dict(sorted(vals.items())))

    @property
    def support_size(self) -> int:
        return len(self.values)

    @property
    def support(self) -> list[int]:
        return list(self.values)

    def __call__(self, chain) -> int:
        return evaluate_cochain(self, chain)

    def __neg__(self) -> "Cochain":
        return Cochain({e: -v for e, v in self.values.items()})

    def encoded(self, table: EdgeTable) -> np.ndarray:
        """Values per register label, relative to the table's orientation."""
        vec = np.zeros(table.padded_count, dtype=np.int64)
        for e, v in self.values.items():
            vec[table.label(e)] = -v if table.flips[e] else v
        return vec


def evaluate_cochain(cochain: Cochain, loop) -> int:
    """Classical evaluation Σ β_j Ω(e_j) over the loop's half-edges."""
    vals = cochain.values
    if isinstance(loop, Cycle):
        return sum(vals.get(e, 0) * (1 if o == 0 else -1) for e, o in loop.half_edges)
    chain = loop.chain() if hasattr(loop, "chain") else loop
    return sum(vals.get(e, 0) * c for e, c in chain.items())


def is_closed_cochain(mesh: Mesh, values: Mapping[int, int]) -> bool:
    for fi in range(mesh.F):
        s = 0
        for e, o in mesh.face_halfedges(fi):
            v = values.get(e, 0)
            s += v if o == 0 else -v
        if s:
            return False
    return True


# ---------------------------------------------------------------------------
# construction


def slice_cochain(mesh: Mesh, cycle: Cycle) -> dict[int, int]:
    """``df`` for the 0-form that is 1 on the left copy of a simple cycle after
    cutting the surface along it, and 0 elsewhere.

    The cut is virtual: at each curve vertex the fan of incident edges is split
    by the two curve edges and the left wedge is the one holding the face to
    the left of the outgoing curve edge.
    """
    if not is_simple(cycle):
        raise CohomologyError("slicing needs a simple closed vertex walk")
    vs = list(cycle.vertices[:-1])
    n = len(vs)
    left: dict[int, set[int]] = {}
    curve_edges = set()
    for k, u in enumerate(vs):
        prev, nxt = vs[k - 1], vs[(k + 1) % n]
        ring = mesh.rotation(u, nxt)
        left[u] = set(ring[1 : ring.index(prev)])
        curve_edges.add(mesh.halfedge(u, nxt)[0])

    def f(end: int, other: int) -> int:
        side = left.get(end)
        return 1 if side is not None and other in side else 0

    values = {}
    touched = {e for u in vs for e in mesh.vertex_edges[u]}
    for e in sorted(touched - curve_edges):
        a, b = mesh.edges[e]
        val = f(b, a) - f(a, b)
        if val:
            values[e] = val
    return values


def dual_loop_cochain(mesh: Mesh, basis: HomologyBasis, j: int) -> dict[int, int]:
    """Cochain of the dual cycle closed by generator edge ``j``: the cotree
    path between the two faces of the generator, plus the generator itself.
    Only the generator edge of ``basis`` lies on both this loop and a basis
    cycle, so the result pairs to ``±δ_jk``."""
    gen = basis.generators[j]
    f_left, f_right = mesh.edge_faces[gen]
    adj: dict[int, list[tuple[int, int]]] = {}
    for e in basis.cotree_edges:
        a, b = mesh.edge_faces[e]
        adj.setdefault(a, []).append((b, e))
        adj.setdefault(b, []).append((a, e))
    prev: dict[int, tuple[int, int] | None] = {f_right: None}
    queue = deque([f_right])
    while queue:
        fa = queue.popleft()
        if fa == f_left:
            break
        for fb, e in sorted(adj.get(fa, [])):
            if fb not in prev:
                prev[fb] = (fa, e)
                queue.append(fb)
    if f_left not in prev:
        raise CohomologyError("generator faces are not joined by the cotree")

    def cross(e: int, src: int) -> int:
        return 1 if mesh.edge_faces[e][0] == src else -1

    values = {gen: cross(gen, f_left)}
    node = f_left
    while prev[node] is not None:
        src, e = prev[node]
        values[e] = values.get(e, 0) + cross(e, src)
        node = src
    return {e: v for e, v in values.items() if v}


def _integer_inverse(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    a = [[Fraction(int(x)) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise CohomologyError("intersection matrix is singular: basis cycles are dependent")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                k = a[r][col]
                a[r] = [x - k * y for x, y in zip(a[r], a[col])]
    inv = np.array([[x for x in row[n:]] for row in a], dtype=object)
    if any(x.denominator != 1 for x in inv.flat):
        raise CohomologyError("intersection matrix is not unimodular: not a basis of H_1(Z)")
    return inv.astype(np.int64)


def duality_matrix(cochains: Sequence[Cochain], basis: HomologyBasis) -> np.ndarray:
    """``D[i, j] = Ω_i(h_j)``."""
    return np.array([[evaluate_cochain(w, h) for h in basis] for w in cochains], dtype=np.int64).reshape(
        len(cochains), len(basis)
    )


@dataclass(frozen=True, eq=False)
class CohomologyBasis:
    cochains: tuple[Cochain, ...]
    labeling: EdgeTable
    interval_report: tuple[bool, ...]
    sign_report: tuple[bool, ...]  # True where a -1 entry survives under the table used
    tables: tuple[EdgeTable, ...]  # table each α is prepared against
    homology: HomologyBasis = field(repr=False)
    construction: str = "slice"
    intersection: np.ndarray | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.cochains)

    def __getitem__(self, a: int) -> Cochain:
        return self.cochains[a]

    def table_for(self, alpha: int) -> EdgeTable:
        return self.tables[alpha]

    @property
    def support_sizes(self) -> list[int]:
        return [w.support_size for w in self.cochains]

    def duality(self) -> np.ndarray:
        return duality_matrix(self.cochains, self.homology)

    def to_json(self) -> dict:
        return {
            "construction": self.construction,
            "cochains": [[[e, v] for e, v in w.values.items()] for w in self.cochains],
            "c_alpha": self.support_sizes,
            "labeling": self.labeling.to_json(),
            "interval_report": list(self.interval_report),
            "sign_report": list(self.sign_report),
            "per_alpha_labeling": [t is not self.labeling for t in self.tables],
            "duality_matrix": self.duality().tolist(),
        }


def _is_interval(cochain: Cochain, table: EdgeTable) -> bool:
    labels = sorted(table.label(e) for e in cochain.values)
    return not labels or labels[-1] - labels[0] + 1 == len(labels)


def _has_negative(cochain: Cochain, table: EdgeTable) -> bool:
    return bool((cochain.encoded(table) < 0).any())


def _with_tables(mesh: Mesh, cochains, labeling, **kw) -> CohomologyBasis:
    intervals = tuple(_is_interval(w, labeling) for w in cochains)
    tables = tuple(labeling if ok else _own_table(mesh, w) for w, ok in zip(cochains, intervals))
    signs = tuple(_has_negative(w, t) for w, t in zip(cochains, tables))
    return CohomologyBasis(tuple(cochains), labeling, intervals, signs, tables, **kw)


def build_cohomology_basis(mesh: Mesh, basis: HomologyBasis) -> CohomologyBasis:
    """Dual basis with ``Ω_i(h_j) = δ_ij`` and ±1 values.

    Each basis cycle is sliced to a closed cochain θ_i. The θ_i pair with the
    cycles through the intersection matrix ``I_ik = θ_i(h_k)``, so the dual
    basis is θ·I^{-T}. When that combination is not ±1-valued (possible only
    for genus ≥ 2) and the basis came from tree-cotree, the dual cycles of the
    cotree are sliced instead.
    """
    for h in basis:
        for e, _ in h.half_edges:
            if not 0 <= e < mesh.E:
                raise CohomologyError("homology basis does not belong to this mesh")
    n = len(basis)
    if n == 0:
        table = edge_table(mesh)
        return CohomologyBasis((), table, (), (), (), basis, "slice", np.zeros((0, 0), dtype=np.int64))
    thetas = [slice_cochain(mesh, h) for h in basis]
    inter = np.array([[evaluate_cochain(Cochain(t), h) for h in basis] for t in thetas], dtype=np.int64)
    coeff = _integer_inverse(inter).T
    combos = []
    for j in range(n):
        acc: dict[int, int] = {}
        for i in range(n):
            if coeff[i, j]:
                for e, v in thetas[i].items():
                    acc[e] = acc.get(e, 0) + int(coeff[i, j]) * v
        combos.append({e: v for e, v in acc.items() if v})
    construction = "slice"
    if any(abs(v) > 1 for c in combos for v in c.values()):
        if not basis.generators:
            raise CohomologyError(
                "sliced duals are not ±1-valued for this basis; use a tree-cotree basis"
            )
        combos = []
        for j in range(n):
            vals = dual_loop_cochain(mesh, basis, j)
            s = evaluate_cochain(Cochain(vals), basis[j])
            combos.append({e: s * v for e, v in vals.items()})
        construction = "dual-loop"
    cochains = [Cochain(c) for c in combos]
    for w in cochains:
        if not is_closed_cochain(mesh, w.values):
            raise CohomologyError("constructed cochain is not closed")
    dual = duality_matrix(cochains, basis)
    if not np.array_equal(dual, np.eye(n, dtype=np.int64)):
        raise CohomologyError(f"duality check failed:\n{dual}")
    return _with_tables(mesh, cochains, edge_table(mesh), homology=basis,
                        construction=construction, intersection=inter)


# ---------------------------------------------------------------------------
# orientation and labelling


def _own_table(mesh: Mesh, w: Cochain) -> EdgeTable:
    order = list(w.values) + [e for e in range(mesh.E) if e not in w.values]
    perm = np.empty(mesh.E, dtype=np.int64)
    perm[order] = np.arange(mesh.E)
    flips = np.zeros(mesh.E, dtype=bool)
    for e, v in w.values.items():
        flips[e] = v < 0
    return edge_table(mesh, perm, flips)


def _path_components(n: int, shared: dict[tuple[int, int], set[int]], bad: set[int]):
    adj = {a: [] for a in range(n)}
    for (a, b) in shared:
        adj[a].append(b)
        adj[b].append(a)
    seen = set()
    paths, rejected = [], set(bad)
    for start in range(n):
        if start in seen:
            continue
        comp, queue = [], deque([start])
        seen.add(start)
        while queue:
            a = queue.popleft()
            comp.append(a)
            for b in adj[a]:
                if b not in seen:
                    seen.add(b)
                    queue.append(b)
        n_links = sum(len(adj[a]) for a in comp) // 2
        is_path = all(len(adj[a]) <= 2 for a in comp) and n_links == len(comp) - 1
        if not is_path or rejected & set(comp):
            rejected |= set(comp)
            continue
        ends = sorted(a for a in comp if len(adj[a]) <= 1)
        order, prev, cur = [], None, ends[0]
        while cur is not None:
            order.append(cur)
            nxt = [b for b in adj[cur] if b != prev]
            prev, cur = cur, (nxt[0] if nxt else None)
        paths.append(order)
    return paths, rejected


def orient_and_relabel(mesh: Mesh, basis: CohomologyBasis) -> CohomologyBasis:
    """Flip edge orientations so support entries read +1 and lay supports out
    as consecutive label intervals.

    Supports whose overlap graph is a path are chained, each shared block
    being the tail of one interval and the head of the next. Cochains outside
    such a layout get their own per-α table for circuit synthesis. Where two
    cochains disagree on an edge's sign, the one laid out first keeps +1 and
    the other keeps a -1 entry.
    """
    n = len(basis)
    supports = [set(w.values) for w in basis.cochains]
    shared: dict[tuple[int, int], set[int]] = {}
    for a in range(n):
        for b in range(a + 1, n):
            s = supports[a] & supports[b]
            if s:
                shared[(a, b)] = s
    count: dict[int, list[int]] = {}
    for a, s in enumerate(supports):
        for e in s:
            count.setdefault(e, []).append(a)
    bad = {a for owners in count.values() if len(owners) > 2 for a in owners}
    paths, _ = _path_components(n, shared, bad)

    order: list[int] = []
    placed: set[int] = set()

    def put(edges):
        for e in sorted(edges):
            if e not in placed:
                placed.add(e)
                order.append(e)

    for path in paths:
        for k, a in enumerate(path):
            nxt = shared.get(tuple(sorted((a, path[k + 1]))), set()) if k + 1 < len(path) else set()
            prv = shared.get(tuple(sorted((a, path[k - 1]))), set()) if k > 0 else set()
            put(supports[a] - nxt - prv)
            put(nxt)
    for a in range(n):
        put(supports[a])
    put(range(mesh.E))
    perm = np.empty(mesh.E, dtype=np.int64)
    perm[order] = np.arange(mesh.E)

    flips = np.zeros(mesh.E, dtype=bool)
    decided: set[int] = set()
    for a in [a for p in paths for a in p] + sorted(set(range(n)) - {a for p in paths for a in p}):
        for e, v in basis.cochains[a].values.items():
            if e not in decided:
                decided.add(e)
                flips[e] = v < 0
    table = edge_table(mesh, perm, flips)
    return _with_tables(mesh, basis.cochains, table, homology=basis.homology,
                        construction=basis.construction, intersection=basis.intersection)


def cohomology_basis(mesh: Mesh, basis: HomologyBasis) -> CohomologyBasis:
    """Build and lay out in one step."""
    return orient_and_relabel(mesh, build_cohomology_basis(mesh, basis))


def replace_cochains(mesh: Mesh, basis: CohomologyBasis, cochains: Sequence[Cochain]) -> CohomologyBasis:
    """Same homology/layout bookkeeping with different cochains (testing aid)."""
    return _with_tables(mesh, tuple(cochains), basis.labeling, homology=basis.homology,
                        construction=basis.construction, intersection=basis.intersection)
