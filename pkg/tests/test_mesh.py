import numpy as np
import pytest

from qident.mesh import (build_uniform_mesh, eval_p1,
                         nodal_interpolate_matrix, nodal_interpolate_scalar)


@pytest.mark.parametrize("ell", [1, 2, 3, 6, 12])
def test_counts_and_mesh_size(ell):
    mesh = build_uniform_mesh(ell)
    assert mesh.n_nodes == (ell + 1) ** 2
    assert mesh.n_tris == 2 * ell ** 2
    assert mesh.n_interior == (ell - 1) ** 2
    assert mesh.h == pytest.approx(np.sqrt(8.0) / ell, rel=1e-14)


@pytest.mark.parametrize("ell", [2, 5, 8])
def test_total_area(ell):
    mesh = build_uniform_mesh(ell)
    assert np.sum(mesh.areas) == pytest.approx(4.0, abs=1e-12)
    assert np.all(mesh.areas == pytest.approx(2.0 / ell ** 2, rel=1e-14))


def test_triangles_counterclockwise():
    mesh = build_uniform_mesh(4)
    v = mesh.nodes[mesh.triangles]
    cross = ((v[:, 1, 0] - v[:, 0, 0]) * (v[:, 2, 1] - v[:, 0, 1])
             - (v[:, 1, 1] - v[:, 0, 1]) * (v[:, 2, 0] - v[:, 0, 0]))
    assert np.all(cross > 0)


def test_basis_gradient_partition_of_unity():
    mesh = build_uniform_mesh(5)
    assert np.abs(mesh.grads.sum(axis=1)).max() <= 1e-12


def test_boundary_interior_split():
    mesh = build_uniform_mesh(3)
    on_boundary = (np.abs(np.abs(mesh.nodes) - 1.0) <= 1e-12).any(axis=1)
    interior = np.setdiff1d(np.arange(mesh.n_nodes), np.where(on_boundary)[0])
    assert np.array_equal(np.sort(mesh.interior_ids), interior)
    # interior_index inverts interior_ids and is -1 on the boundary
    assert np.all(mesh.interior_index[mesh.interior_ids] == np.arange(mesh.n_interior))
    assert np.all(mesh.interior_index[on_boundary] == -1)


def test_centroids_and_edge_midpoints():
    mesh = build_uniform_mesh(2)
    v = mesh.nodes[mesh.triangles]
    assert np.allclose(mesh.centroids(), v.mean(axis=1))
    mids = mesh.edge_midpoints()
    # midpoint k lies opposite vertex k
    for k in range(3):
        other = [i for i in range(3) if i != k]
        assert np.allclose(mids[:, k], v[:, other].mean(axis=1))


def test_gradients_reproduce_affine():
    mesh = build_uniform_mesh(4)
    a, b, c = 0.7, -1.3, 0.25
    vals = a * mesh.nodes[:, 0] + b * mesh.nodes[:, 1] + c
    g = np.einsum("tid,ti->td", mesh.grads, vals[mesh.triangles])
    assert np.allclose(g, [a, b], atol=1e-12)


def test_nodal_interpolation():
    mesh = build_uniform_mesh(3)
    z = nodal_interpolate_scalar(mesh, lambda x1, x2: x1 * x2)
    assert np.allclose(z, mesh.nodes[:, 0] * mesh.nodes[:, 1])
    table = nodal_interpolate_matrix(
        mesh, lambda x1, x2: np.stack([x1, x1 * 0, x2], axis=-1))
    assert table.shape == (mesh.n_nodes, 3)
    assert np.allclose(table[:, 0], mesh.nodes[:, 0])
    assert np.allclose(table[:, 2], mesh.nodes[:, 1])


def test_eval_p1_exact_on_affine():
    mesh = build_uniform_mesh(5)
    vals = 2.0 * mesh.nodes[:, 0] - 0.5 * mesh.nodes[:, 1] + 1.0
    rng = np.random.default_rng(7)
    pts = rng.uniform(-1.0, 1.0, size=(200, 2))
    out = eval_p1(mesh, vals, pts)
    assert np.allclose(out, 2.0 * pts[:, 0] - 0.5 * pts[:, 1] + 1.0, atol=1e-12)


def test_bad_level_rejected():
    with pytest.raises(ValueError):
        build_uniform_mesh(0)
