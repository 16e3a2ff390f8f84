import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qhomology.mesh import (BoundaryEdgeError, EdgeTable, MeshError, NonTriangularFaceError, OffParseError,
                            OrientationError, Mesh, dump_off, edge_table, generate_double_torus, generate_torus,
                            genus, load_off, next_power_of_two, seven_vertex_torus, tetrahedron)

TETRA_OFF = """OFF
4 4 6
1 1 1
1 -1 -1
-1 1 -1
-1 -1 1
3 0 1 2
3 0 2 3
3 0 3 1
3 1 3 2
"""


def torus7_off() -> str:
    lines = ["OFF", "7 14 21"] + ["0 0 0"] * 7
    for i in range(7):
        lines.append(f"3 {i} {(i + 1) % 7} {(i + 3) % 7}")
        lines.append(f"3 {i} {(i + 3) % 7} {(i + 2) % 7}")
    return "\n".join(lines) + "\n"


def test_tetrahedron_from_off():
    m = load_off(TETRA_OFF)
    assert (m.V, m.E, m.F) == (4, 6, 4)
    assert genus(m) == 0


def test_seven_vertex_torus_from_off():
    m = load_off(torus7_off())
    assert (m.V, m.E, m.F) == (7, 21, 14)
    assert genus(m) == 1
    assert m.faces == seven_vertex_torus().faces


def test_quad_face_rejected():
    text = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n"
    with pytest.raises(NonTriangularFaceError):
        load_off(text)


def test_boundary_edge_rejected():
    text = "OFF\n4 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n3 0 1 2\n3 0 2 3\n"
    with pytest.raises(BoundaryEdgeError):
        load_off(text)


def test_inconsistent_winding_rejected():
    bad = TETRA_OFF.replace("3 1 3 2", "3 1 2 3")
    with pytest.raises(OrientationError):
        load_off(bad)


@pytest.mark.parametrize("text", ["", "FOO\n1 1 0\n", "OFF\nx y\n", "OFF\n4 4 6\n0 0 0\n"])
def test_malformed_off(text):
    with pytest.raises(OffParseError):
        load_off(text)


def test_header_counts_on_same_line_and_comments():
    text = "OFF 4 4 6\n# vertices\n" + "\n".join(TETRA_OFF.splitlines()[2:]) + "\n"
    assert load_off(text).F == 4


def test_off_round_trip():
    m = generate_torus(3, 4)
    back = load_off(dump_off(m))
    assert back.faces == m.faces and back.edges == m.edges


@pytest.mark.parametrize("rows,cols,counts", [(3, 3, (9, 27, 18)), (4, 8, (32, 96, 64))])
def test_generate_torus_counts(rows, cols, counts):
    m = generate_torus(rows, cols)
    assert (m.V, m.E, m.F) == counts
    assert m.euler_characteristic == 0


def test_generate_torus_too_small():
    with pytest.raises(MeshError):
        generate_torus(2, 3)


def test_double_torus_is_genus_two():
    m = generate_double_torus()
    assert genus(m) == 2
    assert (m.V, m.E, m.F) == (29, 93, 62)


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 9), st.integers(3, 9))
def test_torus_grid_invariants(rows, cols):
    m = generate_torus(rows, cols)
    assert genus(m) == 1
    assert 3 * m.F == 2 * m.E
    incidence = np.zeros(m.E, dtype=int)
    for f in range(m.F):
        for e, _ in m.face_halfedges(f):
            incidence[e] += 1
    assert (incidence == 2).all()


def test_canonical_orientation_and_sorting():
    m = generate_torus(3, 3)
    assert all(u < v for u, v in m.edges)
    assert list(m.edges) == sorted(m.edges)
    for e, (u, v) in enumerate(m.edges):
        assert m.halfedge(u, v) == (e, 0)
        assert m.halfedge(v, u) == (e, 1)


def test_left_face_holds_canonical_halfedge():
    m = tetrahedron()
    for e, (u, v) in enumerate(m.edges):
        left, right = m.edge_faces[e]
        assert m.halfedge_face[(u, v)] == left
        assert m.halfedge_face[(v, u)] == right


def test_non_adjacent_halfedge_raises():
    m = generate_torus(4, 4)
    with pytest.raises(MeshError):
        m.halfedge(0, 10)


def test_edge_table_padding():
    t = edge_table(seven_vertex_torus())
    assert t.padded_count == 32
    assert len(t.fictitious_labels) == 11
    assert t.width == 5
    assert t.edge(31) == -1


def test_edge_table_no_padding_needed():
    t = EdgeTable(64, 64, np.arange(64), np.zeros(64, dtype=bool))
    assert len(t.fictitious_labels) == 0


def test_edge_table_rejects_non_bijection():
    m = tetrahedron()
    with pytest.raises(ValueError):
        edge_table(m, relabel=[0, 1, 2, 3, 4, 4])


def test_edge_table_rejects_bad_padding():
    with pytest.raises(ValueError):
        edge_table(tetrahedron(), padded_count=12)


@settings(max_examples=30, deadline=None)
@given(st.permutations(list(range(27))), st.lists(st.booleans(), min_size=27, max_size=27))
def test_edge_table_round_trip(perm, flips):
    m = generate_torus(3, 3)
    t = edge_table(m, relabel=perm, flips=flips)
    for e in range(m.E):
        assert t.edge(t.label(e)) == e
        for o in (0, 1):
            assert t.from_register(*t.to_register(e, o)) == (e, o)


@pytest.mark.parametrize("n,expected", [(1, 1), (2, 2), (3, 4), (21, 32), (64, 64), (93, 128)])
def test_next_power_of_two(n, expected):
    assert next_power_of_two(n) == expected


def test_disconnected_mesh_rejected():
    faces = list(tetrahedron().faces) + [tuple(v + 4 for v in f) for f in tetrahedron().faces]
    with pytest.raises(MeshError):
        Mesh.from_faces(8, faces)
