"""Closed oriented triangle meshes, OFF ingestion, fixture generators and the
padded edge table used to address edges from a qubit register.

Vertices are integers ``0..V-1``. Every undirected edge is stored once with its
canonical orientation ``lo -> hi`` (by vertex index) and edges are numbered in
lexicographic order of ``(lo, hi)``.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class MeshError(ValueError):
    """Raised when a mesh is not a closed, connected, orientable triangulation."""


class OffParseError(MeshError):
    pass


class NonTriangularFaceError(MeshError):
    pass


class BoundaryEdgeError(MeshError):
    pass


class OrientationError(MeshError):
    pass


@dataclass(frozen=True, eq=False)
class Mesh:
    vertex_count: int
    faces: tuple[tuple[int, int, int], ...]
    edges: tuple[tuple[int, int], ...]
    edge_index: dict[tuple[int, int], int] = field(repr=False)
    vertex_edges: tuple[tuple[int, ...], ...] = field(repr=False)
    vertex_faces: tuple[tuple[int, ...], ...] = field(repr=False)
    edge_faces: tuple[tuple[int, int], ...] = field(repr=False)
    halfedge_face: dict[tuple[int, int], int] = field(repr=False)
    positions: np.ndarray | None = field(default=None, repr=False)
    meta: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_faces(
        cls,
        vertex_count: int,
        faces: Iterable[Sequence[int]],
        positions: np.ndarray | None = None,
        meta: dict | None = None,
    ) -> "Mesh":
        faces = tuple(tuple(int(v) for v in f) for f in faces)
        if vertex_count < 1 or not faces:
            raise MeshError("mesh needs at least one vertex and one face")
        halfedge_face: dict[tuple[int, int], int] = {}
        for fi, f in enumerate(faces):
            if len(f) != 3:
                raise NonTriangularFaceError(f"face {fi} has {len(f)} vertices")
            if len(set(f)) != 3:
                raise MeshError(f"face {fi} is degenerate: {f}")
            for v in f:
                if not 0 <= v < vertex_count:
                    raise MeshError(f"face {fi} references vertex {v} out of range")
            for k in range(3):
                he = (f[k], f[(k + 1) % 3])
                if he in halfedge_face:
                    other = halfedge_face[he]
                    raise OrientationError(
                        f"half-edge {he} used by faces {other} and {fi}: "
                        "inconsistent winding or non-manifold edge"
                    )
                halfedge_face[he] = fi

        undirected: dict[tuple[int, int], list[int]] = {}
        for (u, v), fi in halfedge_face.items():
            undirected.setdefault((min(u, v), max(u, v)), []).append(fi)
        for key, fs in undirected.items():
            if len(fs) != 2:
                raise BoundaryEdgeError(f"edge {key} is incident to {len(fs)} face(s)")

        edges = tuple(sorted(undirected))
        edge_index = {e: i for i, e in enumerate(edges)}
        vedges: list[list[int]] = [[] for _ in range(vertex_count)]
        for i, (u, v) in enumerate(edges):
            vedges[u].append(i)
            vedges[v].append(i)
        vfaces: list[list[int]] = [[] for _ in range(vertex_count)]
        for fi, f in enumerate(faces):
            for v in f:
                vfaces[v].append(fi)
        unused = [v for v in range(vertex_count) if not vfaces[v]]
        if unused:
            raise MeshError(f"vertices {unused[:5]} are not used by any face")
        edge_faces = tuple(
            (halfedge_face[(u, v)], halfedge_face[(v, u)]) for (u, v) in edges
        )

        mesh = cls(
            vertex_count=vertex_count,
            faces=faces,
            edges=edges,
            edge_index=edge_index,
            vertex_edges=tuple(tuple(x) for x in vedges),
            vertex_faces=tuple(tuple(x) for x in vfaces),
            edge_faces=edge_faces,
            halfedge_face=halfedge_face,
            positions=None if positions is None else np.asarray(positions, dtype=float),
            meta=dict(meta or {}),
        )
        mesh._check_vertex_links()
        mesh._check_connected()
        chi = mesh.euler_characteristic
        if chi % 2 or chi > 2:
            raise MeshError(f"Euler characteristic {chi} is not that of a closed orientable surface")
        return mesh

    @property
    def V(self) -> int:
        return self.vertex_count

    @property
    def E(self) -> int:
        return len(self.edges)

    @property
    def F(self) -> int:
        return len(self.faces)

    @property
    def euler_characteristic(self) -> int:
        return self.V - self.E + self.F

    def third_vertex(self, u: int, v: int) -> int:
        """Third corner of the face containing half-edge ``u -> v``."""
        f = self.faces[self.halfedge_face[(u, v)]]
        for w in f:
            if w != u and w != v:
                return w
        raise AssertionError("unreachable")

    def rotation(self, u: int, start: int) -> list[int]:
        """Neighbours of ``u`` in rotation order, beginning with ``start``.

        Successive entries ``w_k, w_{k+1}`` are corners of the face that holds
        half-edge ``u -> w_k``.
        """
        order = [start]
        w = self.third_vertex(u, start)
        while w != start:
            order.append(w)
            w = self.third_vertex(u, w)
        return order

    def neighbors(self, u: int) -> list[int]:
        out = []
        for ei in self.vertex_edges[u]:
            a, b = self.edges[ei]
            out.append(b if a == u else a)
        return sorted(out)

    def halfedge(self, u: int, v: int) -> tuple[int, int]:
        """``(edge_index, orientation)`` of the directed edge ``u -> v``."""
        try:
            if u < v:
                return self.edge_index[(u, v)], 0
            return self.edge_index[(v, u)], 1
        except KeyError:
            raise MeshError(f"vertices {u} and {v} are not adjacent") from None

    def face_halfedges(self, fi: int) -> list[tuple[int, int]]:
        f = self.faces[fi]
        return [self.halfedge(f[k], f[(k + 1) % 3]) for k in range(3)]

    def _check_vertex_links(self) -> None:
        for u in range(self.V):
            nb = self.neighbors(u)
            ring = self.rotation(u, nb[0])
            if len(ring) != len(nb):
                raise MeshError(f"vertex {u} is not a manifold vertex (link is not a single cycle)")

    def _check_connected(self) -> None:
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for w in self.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        if len(seen) != self.V:
            raise MeshError("mesh is not connected")


def genus(mesh: Mesh) -> int:
    chi = mesh.euler_characteristic
    if chi % 2:
        raise MeshError(f"odd Euler characteristic {chi}")
    return (2 - chi) // 2


# ---------------------------------------------------------------------------
# OFF format


def load_off(text: str) -> Mesh:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise OffParseError("empty OFF input")
    head = lines[0].split()
    if head[0] != "OFF":
        raise OffParseError(f"expected 'OFF' header, got {head[0]!r}")
    rest = lines[1:]
    counts = head[1:]
    if not counts:
        if not rest:
            raise OffParseError("missing counts line")
        counts, rest = rest[0].split(), rest[1:]
    try:
        nv, nf = int(counts[0]), int(counts[1])
    except (IndexError, ValueError):
        raise OffParseError(f"malformed counts line: {' '.join(counts)!r}") from None
    if nv < 0 or nf < 0 or len(rest) < nv + nf:
        raise OffParseError(f"expected {nv} vertex and {nf} face lines, found {len(rest)} lines")

    pos = np.zeros((nv, 3))
    for i in range(nv):
        tok = rest[i].split()
        try:
            pos[i] = [float(t) for t in tok[:3]]
        except ValueError:
            raise OffParseError(f"bad vertex line {i}: {rest[i]!r}") from None
        if len(tok) < 3:
            raise OffParseError(f"bad vertex line {i}: {rest[i]!r}")
    faces = []
    for i in range(nf):
        tok = rest[nv + i].split()
        try:
            k = int(tok[0])
            idx = [int(t) for t in tok[1 : 1 + k]]
        except (IndexError, ValueError):
            raise OffParseError(f"bad face line {i}: {rest[nv + i]!r}") from None
        if k != 3:
            raise NonTriangularFaceError(f"face {i} has {k} vertices; only triangles are supported")
        if len(idx) != 3:
            raise OffParseError(f"bad face line {i}: {rest[nv + i]!r}")
        faces.append(idx)
    return Mesh.from_faces(nv, faces, positions=pos)


def dump_off(mesh: Mesh) -> str:
    pos = mesh.positions if mesh.positions is not None else np.zeros((mesh.V, 3))
    out = ["OFF", f"{mesh.V} {mesh.F} {mesh.E}"]
    out += [" ".join(f"{x:.6g}" for x in p) for p in pos]
    out += [f"3 {a} {b} {c}" for a, b, c in mesh.faces]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# generators


def generate_torus(rows: int, cols: int) -> Mesh:
    """Flat ``rows x cols`` torus grid, each quad split along its
    ``(i, j) -> (i+1, j+1)`` diagonal. Vertex ``(i, j)`` has index ``i*cols + j``."""
    if rows < 3 or cols < 3:
        raise MeshError(f"torus grid needs rows, cols >= 3 (got {rows}x{cols})")

    def vid(i: int, j: int) -> int:
        return (i % rows) * cols + (j % cols)

    faces = []
    for i in range(rows):
        for j in range(cols):
            v00, v01, v10, v11 = vid(i, j), vid(i, j + 1), vid(i + 1, j), vid(i + 1, j + 1)
            faces.append((v00, v10, v11))
            faces.append((v00, v11, v01))
    big, small = 2.0, 1.0
    pos = np.zeros((rows * cols, 3))
    for i in range(rows):
        for j in range(cols):
            a, b = 2 * math.pi * i / rows, 2 * math.pi * j / cols
            pos[vid(i, j)] = [
                (big + small * math.cos(a)) * math.cos(b),
                (big + small * math.cos(a)) * math.sin(b),
                small * math.sin(a),
            ]
    return Mesh.from_faces(
        rows * cols, faces, positions=pos, meta={"kind": "torus", "rows": rows, "cols": cols}
    )


def generate_double_torus(rows: int = 4, cols: int = 4) -> Mesh:
    """Genus-2 fixture: connected sum of two ``rows x cols`` torus grids.

    Face 0 of the first grid and the matching face of a mirrored copy are
    removed and their corners identified.
    """
    a = generate_torus(rows, cols)
    removed = a.faces[0]
    nva = a.V
    remap = {}
    nxt = nva
    for v in range(a.V):
        if v in removed:
            remap[v] = v
        else:
            remap[v] = nxt
            nxt += 1
    faces = list(a.faces[1:])
    for f in a.faces[1:]:
        x, y, z = (remap[v] for v in f)
        faces.append((x, z, y))
    pos = np.zeros((nxt, 3))
    pos[:nva] = a.positions
    for v in range(a.V):
        if v not in removed:
            p = a.positions[v].copy()
            p[0] = 6.0 - p[0]
            pos[remap[v]] = p
    return Mesh.from_faces(
        nxt, faces, positions=pos,
        meta={"kind": "double_torus", "rows": rows, "cols": cols,
              "second_copy": [remap[v] for v in range(a.V)]},
    )


def tetrahedron() -> Mesh:
    pos = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    return Mesh.from_faces(4, [(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)], positions=pos)


def seven_vertex_torus() -> Mesh:
    """Minimal (Möbius–Császár) triangulation of the torus."""
    faces = []
    for i in range(7):
        faces.append((i, (i + 1) % 7, (i + 3) % 7))
        faces.append((i, (i + 3) % 7, (i + 2) % 7))
    return Mesh.from_faces(7, faces)


# ---------------------------------------------------------------------------
# edge table


def next_power_of_two(n: int) -> int:
    return 1 if n <= 1 else 1 << (n - 1).bit_length()


@dataclass(frozen=True, eq=False)
class EdgeTable:
    """Map from mesh edges to register labels ``0..padded_count-1``.

    ``flips[e]`` marks edges whose register orientation (``o = 0``) is the
    reverse of the mesh's canonical ``lo -> hi`` direction. Labels
    ``logical_edge_count..padded_count-1`` are fictitious padding edges.
    """

    logical_edge_count: int
    padded_count: int
    permutation: np.ndarray
    flips: np.ndarray

    def __post_init__(self):
        perm = np.asarray(self.permutation, dtype=np.int64)
        if perm.shape != (self.logical_edge_count,):
            raise ValueError("permutation length must equal the edge count")
        if self.padded_count < self.logical_edge_count or self.padded_count & (self.padded_count - 1):
            raise ValueError(f"padded count {self.padded_count} is not a power of two >= E")
        if len(perm) and (perm.min() < 0 or perm.max() >= self.logical_edge_count
                          or len(np.unique(perm)) != len(perm)):
            raise ValueError("relabel is not a bijection on [0, E)")
        flips = np.asarray(self.flips, dtype=bool)
        if flips.shape != (self.logical_edge_count,):
            raise ValueError("flips length must equal the edge count")
        inverse = np.full(self.padded_count, -1, dtype=np.int64)
        inverse[perm] = np.arange(self.logical_edge_count)
        object.__setattr__(self, "permutation", perm)
        object.__setattr__(self, "flips", flips)
        object.__setattr__(self, "inverse", inverse)

    @property
    def width(self) -> int:
        """Number of qubits in the edge register."""
        return self.padded_count.bit_length() - 1

    @property
    def fictitious_labels(self) -> range:
        return range(self.logical_edge_count, self.padded_count)

    def label(self, edge: int) -> int:
        return int(self.permutation[edge])

    def edge(self, label: int) -> int:
        """Mesh edge for a label, or ``-1`` for padding."""
        return int(self.inverse[label])

    def to_register(self, edge: int, orientation: int) -> tuple[int, int]:
        """Mesh half-edge ``(edge, orientation)`` -> register ``(o, label)``."""
        return int(orientation) ^ int(self.flips[edge]), int(self.permutation[edge])

    def from_register(self, o: int, label: int) -> tuple[int, int] | None:
        e = self.edge(label)
        if e < 0:
            return None
        return e, int(o) ^ int(self.flips[e])

    def to_json(self) -> dict:
        return {
            "logical_edge_count": self.logical_edge_count,
            "padded_count": self.padded_count,
            "permutation": self.permutation.tolist(),
            "flips": [int(x) for x in self.flips],
        }


def edge_table(
    mesh: Mesh,
    relabel: Sequence[int] | None = None,
    flips: Sequence[bool] | None = None,
    padded_count: int | None = None,
) -> EdgeTable:
    E = mesh.E
    perm = np.arange(E) if relabel is None else np.asarray(relabel, dtype=np.int64)
    return EdgeTable(
        logical_edge_count=E,
        padded_count=next_power_of_two(E) if padded_count is None else padded_count,
        permutation=perm,
        flips=np.zeros(E, dtype=bool) if flips is None else np.asarray(flips, dtype=bool),
    )
