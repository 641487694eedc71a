"""Symmetric 2x2 matrix algebra, the spectral box constraint set and its
orthogonal projection, and piecewise-constant matrix fields with their norms.

A symmetric matrix is stored as a length-3 array (m11, m12, m22); all
functions broadcast over leading axes, so a matrix field over a mesh is a
plain (n_tris, 3) array and a nodal matrix table an (n_nodes, 3) array.
"""

from dataclasses import dataclass

import numpy as np

# below this, the traceless part of a matrix is treated as zero (the matrix
# is a multiple of the identity, so any eigenbasis works)
DEGENERATE_TOL = 1e-15


@dataclass(frozen=True)
class BoxK:
    """Constraint set of symmetric matrices with eigenvalues in [q_lo, q_hi]."""

    q_lo: float
    q_hi: float

    def __post_init__(self):
        if not (0.0 < self.q_lo <= self.q_hi):
            raise ValueError(f"need 0 < q_lo <= q_hi, got ({self.q_lo}, {self.q_hi})")


def sym_outer(xi, eta):
    """Symmetrized outer product of two 2-vectors, broadcasting over (..., 2)."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    return np.stack([
        xi[..., 0] * eta[..., 0],
        0.5 * (xi[..., 0] * eta[..., 1] + xi[..., 1] * eta[..., 0]),
        xi[..., 1] * eta[..., 1],
    ], axis=-1)


def eigvals2(m):
    """Eigenvalues (smaller, larger) of symmetric matrices, shape (..., 2)."""
    m = np.asarray(m, dtype=float)
    mean = 0.5 * (m[..., 0] + m[..., 2])
    r = np.hypot(0.5 * (m[..., 0] - m[..., 2]), m[..., 1])
    return np.stack([mean - r, mean + r], axis=-1)


def frob_norm(m):
    """Frobenius norm, accounting for the doubled off-diagonal entry."""
    m = np.asarray(m, dtype=float)
    return np.sqrt(m[..., 0] ** 2 + 2.0 * m[..., 1] ** 2 + m[..., 2] ** 2)


def ddot(m, n):
    """Frobenius inner product trace(M N) of symmetric matrices."""
    m = np.asarray(m, dtype=float)
    n = np.asarray(n, dtype=float)
    return m[..., 0] * n[..., 0] + 2.0 * m[..., 1] * n[..., 1] + m[..., 2] * n[..., 2]


def to_full(m):
    """Expand (..., 3) symmetric storage into full (..., 2, 2) matrices."""
    m = np.asarray(m, dtype=float)
    out = np.empty(m.shape[:-1] + (2, 2))
    out[..., 0, 0] = m[..., 0]
    out[..., 0, 1] = m[..., 1]
    out[..., 1, 0] = m[..., 1]
    out[..., 1, 1] = m[..., 2]
    return out


def project_k(m, K: BoxK):
    """Frobenius-orthogonal projection onto the box constraint set.

    Closed-form 2x2 eigendecomposition: clip both eigenvalues to
    [q_lo, q_hi] and recompose in the same eigenbasis.  Broadcasts over
    leading axes, so it doubles as the per-element field projection.
    """
    m = np.asarray(m, dtype=float)
    mean = 0.5 * (m[..., 0] + m[..., 2])
    d = 0.5 * (m[..., 0] - m[..., 2])
    r = np.hypot(d, m[..., 1])
    lam_lo = np.clip(mean - r, K.q_lo, K.q_hi)
    lam_hi = np.clip(mean + r, K.q_lo, K.q_hi)
    new_mean = 0.5 * (lam_hi + lam_lo)
    # scale of the traceless part; zero when the matrix is (numerically) a
    # multiple of the identity
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.where(r > DEGENERATE_TOL, 0.5 * (lam_hi - lam_lo) / r, 0.0)
    out = np.empty_like(m)
    out[..., 0] = new_mean + scale * d
    out[..., 1] = scale * m[..., 1]
    out[..., 2] = new_mean - scale * d
    return out


def is_admissible(field, K: BoxK, tol: float = 1e-12) -> bool:
    """Whether every matrix has both eigenvalues in [q_lo - tol, q_hi + tol]."""
    lam = eigvals2(field)
    return bool((lam[..., 0] >= K.q_lo - tol).all() and (lam[..., 1] <= K.q_hi + tol).all())


def constant_field(mesh, m) -> np.ndarray:
    """Matrix field carrying the same symmetric matrix on every triangle."""
    return np.tile(np.asarray(m, dtype=float), (mesh.n_tris, 1))


def field_l2_norm(mesh, field) -> float:
    """L2(Omega) norm of a piecewise-constant matrix field (exact)."""
    return float(np.sqrt(np.sum(mesh.areas * frob_norm(field) ** 2)))


def field_linf_norm(field) -> float:
    """Max over triangles of the largest absolute entry."""
    return float(np.abs(field).max())


def field_diff_norms(mesh, field, ref_field):
    """L2 and Linf distance between two piecewise-constant matrix fields.

    Both norms are exact: the difference is constant on each triangle, and
    Linf takes the largest per-triangle Frobenius norm.  Returns (l2, linf).
    """
    field = np.asarray(field, dtype=float)
    ref_field = np.asarray(ref_field, dtype=float)
    if field.shape != (mesh.n_tris, 3) or ref_field.shape != (mesh.n_tris, 3):
        raise ValueError("field shapes do not match the mesh")
    diff = field - ref_field
    return field_l2_norm(mesh, diff), float(frob_norm(diff).max())
