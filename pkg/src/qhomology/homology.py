"""Homology bases on closed meshes: tree-cotree fundamental cycles and
chain-level boundary utilities."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, NamedTuple, Sequence

from .mesh import Mesh, MeshError, genus


class HalfEdgeRef(NamedTuple):
    edge_index: int
    orientation: int  # 0 = canonical lo->hi, 1 = reversed


@dataclass(frozen=True)
class Cycle:
    half_edges: tuple[HalfEdgeRef, ...]
    vertices: tuple[int, ...] | None = None  # closed vertex walk when known
    as_chain: dict[int, int] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        chain: dict[int, int] = {}
        for e, o in self.half_edges:
            chain[e] = chain.get(e, 0) + (1 if o == 0 else -1)
        object.__setattr__(self, "as_chain", {e: c for e, c in chain.items() if c})

    @classmethod
    def from_vertex_walk(cls, mesh: Mesh, vertices: Sequence[int]) -> "Cycle":
        vertices = tuple(int(v) for v in vertices)
        if len(vertices) < 2 or vertices[0] != vertices[-1]:
            raise MeshError("vertex walk must start and end at the same vertex")
        hes = tuple(HalfEdgeRef(*mesh.halfedge(u, v)) for u, v in zip(vertices, vertices[1:]))
        return cls(hes, vertices)

    @classmethod
    def from_chain(cls, chain: Mapping[int, int]) -> "Cycle":
        hes = []
        for e in sorted(chain):
            c = chain[e]
            hes += [HalfEdgeRef(e, 0 if c > 0 else 1)] * abs(c)
        return cls(tuple(hes))

    def reversed(self) -> "Cycle":
        rv = tuple(HalfEdgeRef(e, 1 - o) for e, o in reversed(self.half_edges))
        return Cycle(rv, None if self.vertices is None else tuple(reversed(self.vertices)))

    def __len__(self) -> int:
        return len(self.half_edges)


@dataclass(frozen=True)
class HomologyBasis:
    cycles: tuple[Cycle, ...]
    method: str = "tree-cotree"
    tree_edges: frozenset[int] = frozenset()
    cotree_edges: frozenset[int] = frozenset()
    generators: tuple[int, ...] = ()  # leftover edge per cycle (tree-cotree only)

    def __len__(self) -> int:
        return len(self.cycles)

    def __getitem__(self, i: int) -> Cycle:
        return self.cycles[i]

    def __iter__(self):
        return iter(self.cycles)


def _chain_of(mesh: Mesh, chain) -> dict[int, int]:
    if isinstance(chain, Cycle):
        out = chain.as_chain
    elif hasattr(chain, "chain"):
        out = chain.chain()
    else:
        out = dict(chain)
    for e in out:
        if not 0 <= e < mesh.E:
            raise MeshError(f"edge index {e} out of range for mesh with {mesh.E} edges")
    return out


def boundary_vertices(mesh: Mesh, chain) -> dict[int, int]:
    """Signed vertex degrees of ``∂₁(chain)``; empty iff the chain is closed."""
    deg: dict[int, int] = {}
    for e, c in _chain_of(mesh, chain).items():
        u, v = mesh.edges[e]
        deg[v] = deg.get(v, 0) + c
        deg[u] = deg.get(u, 0) - c
    return {v: d for v, d in deg.items() if d}


def cycle_is_closed(mesh: Mesh, chain) -> bool:
    return not boundary_vertices(mesh, chain)


def boundary_of_faces(mesh: Mesh, faces: Iterable[int]) -> Cycle:
    faces = sorted(set(int(f) for f in faces))
    if not faces:
        raise ValueError("boundary_of_faces needs a non-empty face set")
    chain: dict[int, int] = {}
    for fi in faces:
        if not 0 <= fi < mesh.F:
            raise MeshError(f"face index {fi} out of range")
        for e, o in mesh.face_halfedges(fi):
            chain[e] = chain.get(e, 0) + (1 if o == 0 else -1)
    return Cycle.from_chain({e: c for e, c in chain.items() if c})


def _bfs_tree(mesh: Mesh, root: int = 0):
    parent = [-1] * mesh.V
    depth = [0] * mesh.V
    tree: set[int] = set()
    seen = [False] * mesh.V
    seen[root] = True
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in mesh.neighbors(u):
            if not seen[w]:
                seen[w] = True
                parent[w] = u
                depth[w] = depth[u] + 1
                tree.add(mesh.halfedge(u, w)[0])
                queue.append(w)
    return parent, depth, tree


def _dual_tree(mesh: Mesh, primal: set[int], root: int = 0) -> set[int]:
    face_edges = [sorted(mesh.halfedge(f[k], f[(k + 1) % 3])[0] for k in range(3)) for f in mesh.faces]
    seen = [False] * mesh.F
    seen[root] = True
    cotree: set[int] = set()
    queue = deque([root])
    while queue:
        f = queue.popleft()
        for e in face_edges[f]:
            if e in primal:
                continue
            a, b = mesh.edge_faces[e]
            g = b if a == f else a
            if not seen[g]:
                seen[g] = True
                cotree.add(e)
                queue.append(g)
    return cotree


def _tree_path(parent, depth, u: int, v: int) -> list[int]:
    """Vertex path u -> v through the spanning tree."""
    up, down = [u], [v]
    while depth[up[-1]] > depth[down[-1]]:
        up.append(parent[up[-1]])
    while depth[down[-1]] > depth[up[-1]]:
        down.append(parent[down[-1]])
    while up[-1] != down[-1]:
        up.append(parent[up[-1]])
        down.append(parent[down[-1]])
    return up + down[-2::-1]


def tree_cotree_basis(mesh: Mesh) -> HomologyBasis:
    """2g fundamental cycles from a BFS spanning tree and a dual spanning tree.

    Each leftover edge ``(u, v)`` closes the simple cycle
    ``u -> v -> ... -> lca -> ... -> u`` through the primal tree.
    """
    g = genus(mesh)
    parent, depth, tree = _bfs_tree(mesh)
    cotree = _dual_tree(mesh, tree)
    leftover = [e for e in range(mesh.E) if e not in tree and e not in cotree]
    if len(leftover) != 2 * g:
        raise MeshError(f"tree-cotree left {len(leftover)} edges, expected {2 * g}")
    cycles = []
    for e in leftover:
        u, v = mesh.edges[e]
        walk = [u] + _tree_path(parent, depth, v, u)
        cycles.append(Cycle.from_vertex_walk(mesh, walk))
    return HomologyBasis(
        tuple(cycles),
        method="tree-cotree",
        tree_edges=frozenset(tree),
        cotree_edges=frozenset(cotree),
        generators=tuple(leftover),
    )


def torus_grid_basis(mesh: Mesh) -> HomologyBasis:
    """Row loop ``i = 0`` and column loop ``j = 0`` of a generated torus grid."""
    if mesh.meta.get("kind") != "torus":
        raise MeshError("torus_grid_basis needs a mesh from generate_torus")
    rows, cols = mesh.meta["rows"], mesh.meta["cols"]
    row = [j for j in range(cols)] + [0]
    col = [i * cols for i in range(rows)] + [0]
    return HomologyBasis(
        (Cycle.from_vertex_walk(mesh, row), Cycle.from_vertex_walk(mesh, col)),
        method="torus-grid",
    )


def double_torus_handle_basis(mesh: Mesh) -> HomologyBasis:
    """Row loop ``i = rows//2`` and column loop ``j = cols//2`` on each handle of
    :func:`generate_double_torus`; loops of one handle meet at one vertex and
    the two handles' loops are disjoint."""
    if mesh.meta.get("kind") != "double_torus":
        raise MeshError("double_torus_handle_basis needs a mesh from generate_double_torus")
    rows, cols = mesh.meta["rows"], mesh.meta["cols"]
    copy = mesh.meta["second_copy"]
    i0, j0 = rows // 2, cols // 2
    row = [i0 * cols + j for j in range(cols)] + [i0 * cols]
    col = [i * cols + j0 for i in range(rows)] + [j0]
    cycles = []
    for vmap in (list(range(rows * cols)), copy):
        cycles.append(Cycle.from_vertex_walk(mesh, [vmap[v] for v in row]))
        cycles.append(Cycle.from_vertex_walk(mesh, [vmap[v] for v in col]))
    return HomologyBasis(tuple(cycles), method="handles")


def is_simple(cycle: Cycle) -> bool:
    vs = cycle.vertices
    return vs is not None and len(set(vs[:-1])) == len(vs) - 1


def intersection_report(basis: HomologyBasis) -> list[dict]:
    """Shared-vertex counts between basis curves; pairs sharing more than one
    vertex violate the one-common-vertex layout assumption."""
    out = []
    for i, j in combinations(range(len(basis)), 2):
        a, b = basis[i].vertices, basis[j].vertices
        shared = len(set(a or ()) & set(b or ()))
        out.append({"pair": [i, j], "shared_vertices": shared, "ok": shared <= 1})
    return out


def basis_to_json(basis: HomologyBasis) -> list[list[list[int]]]:
    return [[[int(e), int(o)] for e, o in c.half_edges] for c in basis.cycles]


BASIS_KINDS = ("auto", "tree-cotree", "grid", "handles")


def homology_basis(mesh: Mesh, kind: str = "auto") -> HomologyBasis:
    """``auto`` picks the grid or handle basis for generated meshes, tree-cotree otherwise."""
    if kind == "auto":
        kind = {"torus": "grid", "double_torus": "handles"}.get(mesh.meta.get("kind"), "tree-cotree")
    if kind == "grid":
        return torus_grid_basis(mesh)
    if kind == "handles":
        return double_torus_handle_basis(mesh)
    if kind == "tree-cotree":
        return tree_cotree_basis(mesh)
    raise ValueError(f"unknown basis kind {kind!r}")
