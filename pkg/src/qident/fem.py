"""P1 finite-element forward solver for -div(Q grad u) = f with homogeneous
Dirichlet data: stiffness/load assembly, interior-node elimination, sparse
solve, and norms of nodal fields."""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .fields import to_full

RESIDUAL_TOL = 1e-12


class SolverError(RuntimeError):
    """Forward solve failed; usually an inadmissible coefficient field."""


def assemble_stiffness(mesh, field) -> sp.csr_matrix:
    """Stiffness matrix for the coefficient field, interior nodes only.

    Entry (i, j) = sum_T area(T) (Q_T grad phi_j) . grad phi_i, exact for
    piecewise-constant Q and P1 basis gradients.
    """
    field = np.asarray(field, dtype=float)
    if field.shape != (mesh.n_tris, 3):
        raise ValueError("coefficient field does not match the mesh")
    q = to_full(field)                                    # (nt, 2, 2)
    flux = np.einsum("tde,tje->tjd", q, mesh.grads)       # Q grad phi_j
    k_loc = np.einsum("tid,tjd->tij", mesh.grads, flux) * mesh.areas[:, None, None]
    k_loc = 0.5 * (k_loc + k_loc.transpose(0, 2, 1))      # exact symmetry

    tri = mesh.triangles
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    vals = k_loc.ravel()
    ri = mesh.interior_index[rows]
    ci = mesh.interior_index[cols]
    keep = (ri >= 0) & (ci >= 0)
    n = mesh.n_interior
    return sp.coo_matrix((vals[keep], (ri[keep], ci[keep])), shape=(n, n)).tocsr()


def assemble_load_function(mesh, f) -> np.ndarray:
    """Interior load vector for a scalar source f, 3-point edge-midpoint rule.

    f is called vectorized as f(x1, x2); the rule is exact for integrands of
    degree <= 2 over each triangle.
    """
    mids = mesh.edge_midpoints()                          # (nt, 3, 2)
    fm = np.asarray(f(mids[..., 0], mids[..., 1]), dtype=float)
    fm = np.broadcast_to(fm, mids.shape[:2])
    # phi_i = 1/2 at the two midpoints adjacent to vertex i, 0 opposite
    contrib = (mesh.areas[:, None] / 3.0) * 0.5 * (fm[:, [1, 2, 0]] + fm[:, [2, 0, 1]])
    full = np.zeros(mesh.n_nodes)
    np.add.at(full, mesh.triangles.ravel(), contrib.ravel())
    return full[mesh.interior_ids]


def assemble_load_discrete(mesh, field, u_nodal) -> np.ndarray:
    """Load vector F = K U making u_nodal the exact discrete solution.

    u_nodal must vanish on the boundary; only its interior values enter.
    """
    u_nodal = np.asarray(u_nodal, dtype=float)
    if u_nodal.shape != (mesh.n_nodes,):
        raise ValueError("nodal field does not match the mesh")
    return assemble_stiffness(mesh, field) @ u_nodal[mesh.interior_ids]


def solve_forward(mesh, field, load) -> np.ndarray:
    """Discrete coefficient-to-solution map: solve K u = F, zero boundary.

    Uses a sparse direct factorization; the relative residual is checked
    against 1e-12 so solver error stays far below all reported scales.
    """
    K = assemble_stiffness(mesh, field)
    load = np.asarray(load, dtype=float)
    u_int = spla.spsolve(K.tocsc(), load)
    if not np.all(np.isfinite(u_int)):
        raise SolverError("sparse solve produced non-finite values")
    scale = np.linalg.norm(load)
    if scale > 0:
        res = np.linalg.norm(K @ u_int - load) / scale
        if res > RESIDUAL_TOL:
            raise SolverError(f"relative residual {res:.3e} exceeds {RESIDUAL_TOL}")
    full = np.zeros(mesh.n_nodes)
    full[mesh.interior_ids] = u_int
    return full


def element_gradients(mesh, v_nodal) -> np.ndarray:
    """Constant gradient of the P1 function on each triangle, shape (nt, 2)."""
    v_nodal = np.asarray(v_nodal, dtype=float)
    return np.einsum("tid,ti->td", mesh.grads, v_nodal[mesh.triangles])


def nodal_norms(mesh, v_nodal):
    """(L2, H1, H1-seminorm) of a P1 nodal field, exact per-element quadrature."""
    v = np.asarray(v_nodal, dtype=float)[mesh.triangles]  # (nt, 3)
    mids = 0.5 * (v[:, [1, 2, 0]] + v[:, [2, 0, 1]])
    l2 = np.sqrt(np.sum(mesh.areas / 3.0 * np.sum(mids ** 2, axis=1)))
    g = element_gradients(mesh, v_nodal)
    semi = np.sqrt(np.sum(mesh.areas * np.sum(g ** 2, axis=1)))
    return float(l2), float(np.hypot(l2, semi)), float(semi)


# degree-5 7-point rule on the reference triangle (barycentric point pairs
# and weights summing to 1)
_QUAD_PTS = np.array([
    [1.0 / 3.0, 1.0 / 3.0],
    [0.0597158717897698, 0.4701420641051151],
    [0.4701420641051151, 0.0597158717897698],
    [0.4701420641051151, 0.4701420641051151],
    [0.7974269853530873, 0.1012865073234563],
    [0.1012865073234563, 0.7974269853530873],
    [0.1012865073234563, 0.1012865073234563],
])
_QUAD_WTS = np.array([0.225,
                      0.1323941527885062, 0.1323941527885062, 0.1323941527885062,
                      0.1259391805448271, 0.1259391805448271, 0.1259391805448271])


def errors_vs_exact(mesh, v_nodal, u_exact, grad_exact):
    """(L2, H1, H1-seminorm) distance between a P1 nodal field and a smooth
    exact function, via a degree-5 quadrature rule on each triangle.

    u_exact(x1, x2) is scalar-valued, grad_exact(x1, x2) returns (..., 2).
    """
    v = np.asarray(v_nodal, dtype=float)[mesh.triangles]          # (nt, 3)
    tri = mesh.triangles
    v0 = mesh.nodes[tri[:, 0]]
    e1 = mesh.nodes[tri[:, 1]] - v0
    e2 = mesh.nodes[tri[:, 2]] - v0
    gv = element_gradients(mesh, v_nodal)                         # (nt, 2)
    l2_sq = 0.0
    semi_sq = 0.0
    for (a, b), w in zip(_QUAD_PTS, _QUAD_WTS):
        x = v0 + a * e1 + b * e2
        vh = v[:, 0] * (1.0 - a - b) + v[:, 1] * a + v[:, 2] * b
        du = vh - u_exact(x[:, 0], x[:, 1])
        dg = gv - np.asarray(grad_exact(x[:, 0], x[:, 1]), dtype=float)
        l2_sq += np.sum(w * mesh.areas * du ** 2)
        semi_sq += np.sum(w * mesh.areas * np.sum(dg ** 2, axis=-1))
    l2 = np.sqrt(l2_sq)
    semi = np.sqrt(semi_sq)
    return float(l2), float(np.hypot(l2, semi)), float(semi)


def h1_error_vs_exact(mesh, v_nodal, u_exact, grad_exact) -> float:
    """H1 distance between a P1 nodal field and a smooth exact function."""
    return errors_vs_exact(mesh, v_nodal, u_exact, grad_exact)[1]
