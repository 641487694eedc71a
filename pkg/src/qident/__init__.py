"""Identification of a symmetric matrix diffusion coefficient in
-div(Q grad u) = f from noisy H1 observations of the state, via projected
gradient descent on a convex energy functional with Tikhonov regularization.
"""

from .fields import BoxK, project_k, sym_outer
from .mesh import TriMesh, build_uniform_mesh
from .objective import ObjectiveContext, make_context
from .optimizer import RunConfig, RunRecord, default_schedule, run

__all__ = [
    "BoxK", "ObjectiveContext", "RunConfig", "RunRecord", "TriMesh",
    "build_uniform_mesh", "default_schedule", "make_context", "project_k",
    "run", "sym_outer",
]

__version__ = "0.1.0"
