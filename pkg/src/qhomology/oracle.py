"""Loops as half-edge multiplicity tables, loop-file ingestion, and the
reversible query oracle ``|o, e, s> -> |o, e, s + a(o, e) mod K>``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .homology import Cycle, boundary_vertices
from .mesh import EdgeTable, Mesh, MeshError
from .statevec.circuit import Circuit, Perm
from .statevec.layout import RegisterLayout


class LoopError(ValueError):
    pass


class MultiplicityOverflowError(LoopError):
    pass


class LoopParseError(LoopError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class LayoutMismatchError(ValueError):
    pass


def _check_modulus(K: int) -> int:
    K = int(K)
    if K < 2 or K & (K - 1):
        raise LoopError(f"K must be a power of two >= 2, got {K}")
    return K


@dataclass(frozen=True, eq=False)
class LoopSpec:
    """Multiplicity of each traversed half-edge ``(edge, orientation)``.

    In modulo mode counts are stored reduced mod ``K`` and the boundary only
    has to vanish mod ``K``; otherwise a count ``>= K`` is rejected.
    """

    counts: Mapping[tuple[int, int], int]
    K: int = 2
    modulo: bool = False
    edge_count: int | None = None
    base_vertex: int | None = None
    _boundary: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        K = _check_modulus(self.K)
        counts: dict[tuple[int, int], int] = {}
        for (e, o), a in self.counts.items():
            e, o, a = int(e), int(o), int(a)
            if o not in (0, 1):
                raise LoopError(f"orientation must be 0 or 1, got {o}")
            if a < 0:
                raise LoopError(f"negative multiplicity {a} on half-edge ({e}, {o})")
            if self.edge_count is not None and not 0 <= e < self.edge_count:
                raise LoopError(f"edge index {e} out of range")
            if a >= K:
                if not self.modulo:
                    raise MultiplicityOverflowError(
                        f"half-edge ({e}, {o}) appears {a} times; K={K} allows at most {K - 1}")
                a %= K
            if a:
                counts[(e, o)] = a
        object.__setattr__(self, "counts", dict(sorted(counts.items())))
        object.__setattr__(self, "K", K)

    def chain(self) -> dict[int, int]:
        """Signed edge chain: count of ``+e`` minus count of ``-e``."""
        out: dict[int, int] = {}
        for (e, o), a in self.counts.items():
            out[e] = out.get(e, 0) + (a if o == 0 else -a)
        return {e: c for e, c in out.items() if c}

    def validate(self, mesh: Mesh) -> "LoopSpec":
        for e, _o in self.counts:
            if not 0 <= e < mesh.E:
                raise LoopError(f"edge index {e} out of range for mesh with {mesh.E} edges")
        bad = boundary_vertices(mesh, self.chain())
        if self.modulo:
            bad = {v: d for v, d in bad.items() if d % self.K}
        if bad:
            raise LoopError(f"loop is not closed; boundary at vertices {sorted(bad)}")
        return self

    @property
    def is_empty(self) -> bool:
        return not self.counts

    def reversed(self) -> "LoopSpec":
        return LoopSpec({(e, 1 - o): a for (e, o), a in self.counts.items()}, self.K, self.modulo,
                        self.edge_count, self.base_vertex)

    def combined(self, other: "LoopSpec", cancel: bool = True) -> "LoopSpec":
        """Sum of counts; with ``cancel`` opposite half-edges of one edge annihilate."""
        counts = dict(self.counts)
        for h, a in other.counts.items():
            counts[h] = counts.get(h, 0) + a
        if cancel:
            for e in {e for e, _ in counts}:
                m = min(counts.get((e, 0), 0), counts.get((e, 1), 0))
                if m:
                    counts[(e, 0)] -= m
                    counts[(e, 1)] -= m
        return LoopSpec(counts, max(self.K, other.K), self.modulo or other.modulo,
                        self.edge_count, self.base_vertex)

    def with_modulus(self, K: int, modulo: bool | None = None) -> "LoopSpec":
        return LoopSpec(self.counts, K, self.modulo if modulo is None else modulo,
                        self.edge_count, self.base_vertex)

    def max_multiplicity(self) -> int:
        return max(self.counts.values(), default=0)

    def to_json(self) -> dict:
        return {"K": self.K, "modulo": self.modulo,
                "half_edges": [[e, o, a] for (e, o), a in self.counts.items()]}


def classical_query(loop: LoopSpec, h: tuple[int, int] | None) -> int:
    """Multiplicity of exactly the oriented half-edge ``h``; ``None`` (padding) gives 0."""
    if h is None:
        return 0
    return loop.counts.get((int(h[0]), int(h[1])), 0)


def loop_from_halfedges(mesh: Mesh, half_edges: Iterable[tuple[int, int]], K: int = 2,
                        modulo: bool = False, base_vertex: int | None = None) -> LoopSpec:
    counts: dict[tuple[int, int], int] = {}
    for e, o in half_edges:
        counts[(int(e), int(o))] = counts.get((int(e), int(o)), 0) + 1
    return LoopSpec(counts, K, modulo, mesh.E, base_vertex).validate(mesh)


def loop_from_vertex_walk(mesh: Mesh, vertices: Sequence[int], K: int = 2, modulo: bool = False) -> LoopSpec:
    vertices = [int(v) for v in vertices]
    if len(vertices) < 2 or vertices[0] != vertices[-1]:
        raise LoopError("vertex walk must start and end at the same vertex")
    hes = []
    for u, v in zip(vertices, vertices[1:]):
        try:
            hes.append(mesh.halfedge(u, v))
        except MeshError as exc:
            raise LoopError(f"vertices {u} and {v} are not adjacent") from exc
    return loop_from_halfedges(mesh, hes, K, modulo, vertices[0])


def loop_from_cycle(mesh: Mesh, cycle: Cycle, K: int = 2, modulo: bool = False) -> LoopSpec:
    base = cycle.vertices[0] if cycle.vertices else None
    return loop_from_halfedges(mesh, cycle.half_edges, K, modulo, base)


def loop_from_chain(mesh: Mesh, chain: Mapping[int, int], K: int = 2, modulo: bool = False) -> LoopSpec:
    counts = {(e, 0 if c > 0 else 1): abs(c) for e, c in chain.items() if c}
    return LoopSpec(counts, K, modulo, mesh.E).validate(mesh)


def parse_loop(text: str, mesh: Mesh, K: int = 2, modulo: bool = False) -> LoopSpec:
    """Parse a loop file.

    Two line forms, which may be mixed; all contributions add up:

    * ``v v0 v1 ... v0``: a closed vertex walk
    * ``e <edge_index> <orientation 0|1> <multiplicity>``

    ``#`` starts a comment.
    """
    counts: dict[tuple[int, int], int] = {}
    base = None
    seen = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            nums = [int(t) for t in tok[1:]]
        except ValueError:
            raise LoopParseError(f"non-integer field in {raw.strip()!r}", lineno) from None
        if tok[0] == "v":
            if len(nums) < 2 or nums[0] != nums[-1]:
                raise LoopParseError("vertex walk must have at least two entries and return to its start", lineno)
            for u, v in zip(nums, nums[1:]):
                if not (0 <= u < mesh.V and 0 <= v < mesh.V):
                    raise LoopParseError(f"vertex index out of range in {u} -> {v}", lineno)
                try:
                    h = mesh.halfedge(u, v)
                except MeshError:
                    raise LoopParseError(f"vertices {u} and {v} are not adjacent", lineno) from None
                counts[h] = counts.get(h, 0) + 1
            if base is None:
                base = nums[0]
        elif tok[0] == "e":
            if len(nums) != 3:
                raise LoopParseError("expected 'e <edge_index> <orientation> <multiplicity>'", lineno)
            e, o, a = nums
            if not 0 <= e < mesh.E:
                raise LoopParseError(f"edge index {e} out of range", lineno)
            if o not in (0, 1) or a < 0:
                raise LoopParseError("orientation must be 0/1 and multiplicity non-negative", lineno)
            counts[(e, o)] = counts.get((e, o), 0) + a
        else:
            raise LoopParseError(f"unknown record type {tok[0]!r}", lineno)
        seen = True
    if not seen:
        raise LoopParseError("loop file is empty")
    return LoopSpec(counts, K, modulo, mesh.E, base).validate(mesh)


def dump_loop(loop: LoopSpec) -> str:
    return "".join(f"e {e} {o} {a}\n" for (e, o), a in loop.counts.items())


@dataclass(frozen=True, eq=False)
class OracleUnitary:
    circuit: Circuit
    inverse: Circuit
    table: np.ndarray = field(repr=False)  # multiplicity per (o, label)
    layout: RegisterLayout

    def query(self, o: int, label: int) -> int:
        return int(self.table[o, label])


def build_oracle(loop: LoopSpec, table: EdgeTable, layout: RegisterLayout) -> OracleUnitary:
    """Permutation on the contiguous ``(o, e, s)`` run adding ``a(o, e)`` into ``s``."""
    ns = layout.status_width
    if (1 << ns) != loop.K:
        raise LayoutMismatchError(f"status register has {ns} qubits but K={loop.K}")
    if layout.edge_width != table.width:
        raise LayoutMismatchError(f"edge register has {layout.edge_width} qubits, table needs {table.width}")
    mult = np.zeros((2, table.padded_count), dtype=np.int64)
    for (e, o), a in loop.counts.items():
        ro, label = table.to_register(e, o)
        mult[ro, label] = a
    K = loop.K
    s = np.arange(K)
    perm = ((mult.reshape(-1, 1) + s) % K + (np.arange(mult.size) * K).reshape(-1, 1)).reshape(-1)
    reg = layout.oracle_register
    circ = Circuit(layout.total_qubits, (Perm(perm, reg, tag="oracle"),))
    return OracleUnitary(circ, circ.inverse(), mult, layout)


def status_width(K: int) -> int:
    return int(math.log2(_check_modulus(K)))
