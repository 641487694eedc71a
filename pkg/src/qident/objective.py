"""The convex energy misfit J, the Tikhonov objective Upsilon = J + rho |Q|^2,
and their gradient with respect to piecewise-constant matrix fields.

The misfit J(Q) = int Q grad(u(Q) - z) . grad(u(Q) - z) is convex in Q and
its derivative needs no adjoint state: the L2-representer on each triangle is
grad z (x) grad z - grad u (x) grad u + 2 rho Q.
"""

from dataclasses import dataclass

import numpy as np

from .fem import element_gradients, solve_forward
from .fields import BoxK, ddot, field_l2_norm, sym_outer


@dataclass(frozen=True)
class ObjectiveContext:
    """Everything fixed during a minimization: mesh, observation, rho, load.

    The closed-form gradient representer is the exact derivative of the
    discrete functional whenever the observation has zero boundary trace;
    for observations carrying boundary noise the same representer is used
    as the descent direction and defines the discrete method.
    """

    mesh: object
    z: np.ndarray          # (n_nodes,) nodal observation
    z_grads: np.ndarray    # (n_tris, 2) cached element gradients of z
    rho: float
    K: BoxK
    load: np.ndarray       # (n_interior,) right-hand side of the state system


def make_context(mesh, z_obs, rho, K: BoxK, load) -> ObjectiveContext:
    if rho <= 0:
        raise ValueError(f"regularization parameter must be positive, got {rho}")
    z = np.array(z_obs, dtype=float)
    if z.shape != (mesh.n_nodes,):
        raise ValueError("observation does not match the mesh")
    return ObjectiveContext(mesh=mesh, z=z, z_grads=element_gradients(mesh, z),
                            rho=float(rho), K=K, load=np.asarray(load, dtype=float))


def eval_state(ctx: ObjectiveContext, Q) -> np.ndarray:
    """Forward solve u(Q) for the context's load."""
    return solve_forward(ctx.mesh, Q, ctx.load)


def eval_J(ctx: ObjectiveContext, Q, u=None) -> float:
    """Energy misfit J(Q) >= 0; solves the state unless u is supplied."""
    if u is None:
        u = eval_state(ctx, Q)
    e = element_gradients(ctx.mesh, u) - ctx.z_grads
    return float(np.sum(ctx.mesh.areas * ddot(Q, sym_outer(e, e))))


def eval_upsilon(ctx: ObjectiveContext, Q, u=None) -> float:
    """Tikhonov objective J(Q) + rho * |Q|_{L2}^2."""
    return eval_J(ctx, Q, u=u) + ctx.rho * field_l2_norm(ctx.mesh, Q) ** 2


def eval_gradient(ctx: ObjectiveContext, Q, return_state=False):
    """L2-representer of the objective's derivative, one matrix per triangle.

    G_T = grad z (x) grad z - grad u (x) grad u + 2 rho Q_T, so that the
    directional derivative along H is sum_T area(T) G_T . H_T.
    """
    u = eval_state(ctx, Q)
    gu = element_gradients(ctx.mesh, u)
    grad = sym_outer(ctx.z_grads, ctx.z_grads) - sym_outer(gu, gu) + 2.0 * ctx.rho * np.asarray(Q)
    return (grad, u) if return_state else grad


def directional_derivative(ctx: ObjectiveContext, grad_field, H) -> float:
    """Pair a gradient field with a direction H in the L2 inner product."""
    return float(np.sum(ctx.mesh.areas * ddot(grad_field, H)))
