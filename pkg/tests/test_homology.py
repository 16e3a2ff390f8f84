import pytest
from hypothesis import given, settings, strategies as st

from qhomology.homology import (Cycle, HalfEdgeRef, basis_to_json, boundary_of_faces, cycle_is_closed,
                                double_torus_handle_basis, homology_basis, intersection_report, is_simple,
                                torus_grid_basis, tree_cotree_basis)
from qhomology.mesh import MeshError, generate_double_torus, generate_torus, seven_vertex_torus, tetrahedron

from helpers import mesh_named


@pytest.mark.parametrize("mesh,count", [
    (tetrahedron(), 0),
    (generate_torus(4, 4), 2),
    (seven_vertex_torus(), 2),
    (generate_double_torus(), 4),
])
def test_tree_cotree_size(mesh, count):
    hb = tree_cotree_basis(mesh)
    assert len(hb) == count
    assert len(hb.generators) == count
    assert len(hb.tree_edges) == mesh.V - 1
    assert len(hb.cotree_edges) == mesh.F - 1


@pytest.mark.parametrize("name", ["torus4x4", "torus3x5", "torus7", "genus2"])
def test_tree_cotree_cycles_closed_and_simple(name):
    mesh = mesh_named(name)
    for h in tree_cotree_basis(mesh):
        assert cycle_is_closed(mesh, h)
        assert is_simple(h)


def test_tree_cotree_is_deterministic():
    m = generate_double_torus()
    assert basis_to_json(tree_cotree_basis(m)) == basis_to_json(tree_cotree_basis(m))


def test_face_boundary_closed_single_halfedge_not():
    m = generate_torus(3, 3)
    assert cycle_is_closed(m, boundary_of_faces(m, [0]))
    assert not cycle_is_closed(m, Cycle((HalfEdgeRef(0, 0),)))


def test_invalid_edge_reference():
    m = generate_torus(3, 3)
    with pytest.raises(MeshError):
        cycle_is_closed(m, {999: 1})


def test_boundary_of_one_and_two_faces():
    m = generate_torus(3, 3)
    assert len(boundary_of_faces(m, [0]).as_chain) == 3
    f0, f1 = m.edge_faces[0]
    two = boundary_of_faces(m, [f0, f1])
    assert len(two.as_chain) == 4
    assert 0 not in two.as_chain


def test_boundary_of_all_faces_is_zero():
    m = generate_double_torus()
    assert boundary_of_faces(m, range(m.F)).as_chain == {}


def test_boundary_of_empty_set():
    with pytest.raises(ValueError):
        boundary_of_faces(generate_torus(3, 3), [])


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["torus4x4", "torus7", "genus2"]), st.data())
def test_boundary_is_closed(name, data):
    m = mesh_named(name)
    faces = data.draw(st.sets(st.integers(0, m.F - 1), min_size=1))
    assert cycle_is_closed(m, boundary_of_faces(m, faces))


def test_vertex_walk_must_close():
    with pytest.raises(MeshError):
        Cycle.from_vertex_walk(generate_torus(3, 3), [0, 1, 2])


def test_cycle_reversal_negates_chain():
    m = generate_torus(4, 4)
    h = torus_grid_basis(m)[0]
    assert h.reversed().as_chain == {e: -c for e, c in h.as_chain.items()}


def test_grid_basis_meets_in_one_vertex():
    hb = torus_grid_basis(generate_torus(4, 4))
    rep = intersection_report(hb)
    assert rep == [{"pair": [0, 1], "shared_vertices": 1, "ok": True}]


def test_handle_basis_layout():
    m = generate_double_torus()
    hb = double_torus_handle_basis(m)
    assert len(hb) == 4
    shared = {tuple(r["pair"]): r["shared_vertices"] for r in intersection_report(hb)}
    assert shared[(0, 1)] == 1 and shared[(2, 3)] == 1
    assert shared[(0, 2)] == 0 and shared[(1, 3)] == 0
    assert all(cycle_is_closed(m, h) for h in hb)


def test_special_bases_need_matching_mesh():
    with pytest.raises(MeshError):
        torus_grid_basis(seven_vertex_torus())
    with pytest.raises(MeshError):
        double_torus_handle_basis(generate_torus(4, 4))


def test_auto_basis_choice():
    assert homology_basis(generate_torus(4, 4)).method == "torus-grid"
    assert homology_basis(generate_double_torus()).method == "handles"
    assert homology_basis(seven_vertex_torus()).method == "tree-cotree"


def test_basis_json_shape():
    out = basis_to_json(tree_cotree_basis(generate_torus(3, 3)))
    assert len(out) == 2
    assert all(len(pair) == 2 and pair[1] in (0, 1) for cyc in out for pair in cyc)
