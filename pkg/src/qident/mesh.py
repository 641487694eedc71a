"""Uniform triangulations of the square (-1,1)^2 and P1 nodal interpolation."""

from dataclasses import dataclass

import numpy as np

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class TriMesh:
    """Uniform triangulation of (-1,1)^2 with per-element P1 geometry.

    Each grid cell is split along its lower-left to upper-right diagonal,
    giving 2*ell^2 congruent right triangles.  Nodes are ordered
    lexicographically by (x2, x1); triangles cell-by-cell, lower then upper.
    Immutable after construction.
    """

    ell: int
    nodes: np.ndarray          # (n_nodes, 2)
    triangles: np.ndarray      # (n_tris, 3) node indices, counterclockwise
    areas: np.ndarray          # (n_tris,)
    grads: np.ndarray          # (n_tris, 3, 2) gradient of each local basis fn
    interior_ids: np.ndarray   # (n_interior,) node indices off the boundary
    interior_index: np.ndarray  # (n_nodes,) interior position or -1
    h: float                   # largest triangle diameter, sqrt(8)/ell

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_tris(self):
        return self.triangles.shape[0]

    @property
    def n_interior(self):
        return self.interior_ids.shape[0]

    def centroids(self):
        return self.nodes[self.triangles].mean(axis=1)

    def edge_midpoints(self):
        """Midpoints of the three edges of each triangle, shape (n_tris, 3, 2).

        Midpoint k is opposite local vertex k, i.e. the midpoint of the edge
        joining the other two vertices.
        """
        p = self.nodes[self.triangles]  # (nt, 3, 2)
        return 0.5 * (p[:, [1, 2, 0], :] + p[:, [2, 0, 1], :])


def build_uniform_mesh(ell: int) -> TriMesh:
    """Triangulate (-1,1)^2 with ell segments per axis."""
    if ell < 1:
        raise ValueError(f"refinement level must be >= 1, got {ell}")
    ell = int(ell)
    s = 2.0 / ell
    axis = -1.0 + s * np.arange(ell + 1)
    x2, x1 = np.meshgrid(axis, axis, indexing="ij")  # rows over x2
    nodes = np.column_stack([x1.ravel(), x2.ravel()])

    def nid(i, j):
        # i along x1, j along x2
        return j * (ell + 1) + i

    tris = np.empty((2 * ell * ell, 3), dtype=np.int64)
    t = 0
    for j in range(ell):
        for i in range(ell):
            ll, lr = nid(i, j), nid(i + 1, j)
            ul, ur = nid(i, j + 1), nid(i + 1, j + 1)
            tris[t] = (ll, lr, ur)      # lower triangle
            tris[t + 1] = (ll, ur, ul)  # upper triangle
            t += 2

    p = nodes[tris]  # (nt, 3, 2)
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    twice_area = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    areas = 0.5 * twice_area
    # grad phi_k = rot90(edge opposite k) / (2A)
    b = np.stack([p[:, 1, 1] - p[:, 2, 1],
                  p[:, 2, 1] - p[:, 0, 1],
                  p[:, 0, 1] - p[:, 1, 1]], axis=1)
    c = np.stack([p[:, 2, 0] - p[:, 1, 0],
                  p[:, 0, 0] - p[:, 2, 0],
                  p[:, 1, 0] - p[:, 0, 0]], axis=1)
    grads = np.stack([b, c], axis=2) / twice_area[:, None, None]

    on_boundary = (np.abs(np.abs(nodes[:, 0]) - 1.0) <= BOUNDARY_TOL) | \
                  (np.abs(np.abs(nodes[:, 1]) - 1.0) <= BOUNDARY_TOL)
    interior_ids = np.flatnonzero(~on_boundary)
    interior_index = np.full(nodes.shape[0], -1, dtype=np.int64)
    interior_index[interior_ids] = np.arange(interior_ids.size)

    return TriMesh(ell=ell, nodes=nodes, triangles=tris, areas=areas,
                   grads=grads, interior_ids=interior_ids,
                   interior_index=interior_index, h=np.sqrt(8.0) / ell)


def nodal_interpolate_scalar(mesh: TriMesh, g) -> np.ndarray:
    """Nodal values of g, i.e. the P1 interpolant of g on the mesh.

    g is called vectorized as g(x1, x2) on coordinate arrays.
    """
    return np.asarray(g(mesh.nodes[:, 0], mesh.nodes[:, 1]), dtype=float)


def nodal_interpolate_matrix(mesh: TriMesh, G) -> np.ndarray:
    """Entrywise nodal interpolation of a symmetric matrix function.

    G(x1, x2) must return an array of shape (n, 3) in (m11, m12, m22)
    storage.  Returns the (n_nodes, 3) nodal table.
    """
    vals = np.asarray(G(mesh.nodes[:, 0], mesh.nodes[:, 1]), dtype=float)
    if vals.shape != (mesh.n_nodes, 3):
        raise ValueError(f"matrix function returned shape {vals.shape}, "
                         f"expected {(mesh.n_nodes, 3)}")
    return vals


def eval_p1(mesh: TriMesh, values: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Evaluate the P1 function with the given nodal values at points (n, 2).

    Uses the structured-grid layout to locate cells directly.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    s = 2.0 / mesh.ell
    # local cell coordinates in [0, 1]
    fi = np.clip((pts[:, 0] + 1.0) / s, 0.0, mesh.ell - 1e-12)
    fj = np.clip((pts[:, 1] + 1.0) / s, 0.0, mesh.ell - 1e-12)
    i = np.minimum(fi.astype(np.int64), mesh.ell - 1)
    j = np.minimum(fj.astype(np.int64), mesh.ell - 1)
    xl = fi - i
    yl = fj - j
    n = mesh.ell + 1
    v_ll = values[j * n + i]
    v_lr = values[j * n + i + 1]
    v_ul = values[(j + 1) * n + i]
    v_ur = values[(j + 1) * n + i + 1]
    lower = yl <= xl  # below the lower-left/upper-right diagonal
    out = np.where(
        lower,
        v_ll + (v_lr - v_ll) * xl + (v_ur - v_lr) * yl,
        v_ll + (v_ur - v_ul) * xl + (v_ul - v_ll) * yl,
    )
    return out
