"""Benchmark problems and measurement pipeline: the two coefficient
identification examples on (-1,1)^2, the deterministic noise model, error
norms, experimental orders of convergence, and the level-refinement study."""

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import fem, mesh as meshmod
from .fields import BoxK, field_diff_norms, sym_outer
from .objective import make_context
from .optimizer import (RunConfig, RunRecord, lipschitz_bound, run,
                        validate_schedule)

DEFAULT_K = BoxK(0.05, 10.0)
DEFAULT_RHO_SCALE = 1e-3


def exact_state(x1, x2):
    """Target state (1 - x1^2)(1 - x2^2); vanishes on the boundary."""
    return (1.0 - np.asarray(x1) ** 2) * (1.0 - np.asarray(x2) ** 2)


def exact_state_grad(x1, x2):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return np.stack([-2.0 * x1 * (1.0 - x2 ** 2),
                     -2.0 * x2 * (1.0 - x1 ** 2)], axis=-1)


def example1_q(x1, x2, K: BoxK = DEFAULT_K):
    """Smooth-but-clipped truth: the projection of grad u (x) grad u onto K.

    With eta = |grad u|^2 this equals q_lo*I + ((clip(eta) - q_lo)/eta)
    grad u (x) grad u wherever eta > 0, and q_lo*I on the critical set.
    """
    g = exact_state_grad(x1, x2)
    eta = np.sum(g ** 2, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.where(eta > 0.0,
                         (np.clip(eta, K.q_lo, K.q_hi) - K.q_lo) / np.where(eta > 0, eta, 1.0),
                         0.0)
    out = scale[..., None] * sym_outer(g, g)
    out[..., 0] += K.q_lo
    out[..., 2] += K.q_lo
    return out


def example2_q(x1, x2):
    """Discontinuous truth with square / diamond / disc subdomains."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    in_square = (np.abs(x1) <= 0.5) & (np.abs(x2) <= 0.5)
    in_diamond = np.abs(x1) + np.abs(x2) <= 0.5
    in_disc = x1 ** 2 + x2 ** 2 <= 0.25
    return np.stack([np.where(in_square, 3.0, 1.0),
                     np.where(in_diamond, 1.0, 0.0),
                     np.where(in_disc, 4.0, 2.0)], axis=-1)


def truth_function(example: int):
    if example == 1:
        return lambda x1, x2: example1_q(x1, x2)
    if example == 2:
        return example2_q
    raise ValueError(f"unknown example {example}, expected 1 or 2")


def noisy_observation(mesh):
    """Nodal interpolant of the noisy observation and its noise level.

    z = u_exact + x1/ell + x2/ell; the affine perturbation has H1 norm
    sqrt(32/3)/ell = (2/sqrt 3) h exactly.
    """
    ell = mesh.ell
    z = meshmod.nodal_interpolate_scalar(
        mesh, lambda x1, x2: exact_state(x1, x2) + x1 / ell + x2 / ell)
    return z, 2.0 / np.sqrt(3.0) * mesh.h


def centroid_field(mesh, q_fun) -> np.ndarray:
    """Piecewise-constant field from evaluating a matrix function at centroids."""
    c = mesh.centroids()
    return np.asarray(q_fun(c[:, 0], c[:, 1]), dtype=float)


def build_problem(example: int, mesh, K: BoxK = DEFAULT_K):
    """Element-interpolated truth field and the discrete load F = K(Q) U.

    The load is generated from the truth coefficient and the nodal values of
    the exact state, so the interpolated exact state is the exact discrete
    solution (a deliberate inverse crime for both examples).  The same
    centroid field serves as the prior anchor Q* and as the reference in the
    coefficient error norms.
    """
    q_fun = truth_function(example)
    q_field = centroid_field(mesh, q_fun)
    u_bar = meshmod.nodal_interpolate_scalar(mesh, exact_state)
    load = fem.assemble_load_discrete(mesh, q_field, u_bar)
    return q_field, load


def discrete_source_l2(mesh, load) -> float:
    """L2 norm of the lumped-mass Riesz representative of a load vector.

    Only used to evaluate the Lipschitz stability constant; the step
    schedules themselves depend on rho alone.
    """
    lumped = np.zeros(mesh.n_nodes)
    np.add.at(lumped, mesh.triangles.ravel(),
              np.repeat(mesh.areas / 3.0, 3))
    m_int = lumped[mesh.interior_ids]
    f_h = np.asarray(load, dtype=float) / m_int
    return float(np.sqrt(np.sum(m_int * f_h ** 2)))


def error_metrics(mesh, Q, q_ref, u_h) -> dict:
    """Coefficient errors (L2, Linf vs the interpolated truth field) and
    state errors (L2, H1, H1-semi vs the exact state, degree-5 quadrature)."""
    gamma, delta = field_diff_norms(mesh, Q, q_ref)
    sigma, xi, lam = fem.errors_vs_exact(mesh, u_h, exact_state, exact_state_grad)
    return {"Gamma": gamma, "Delta": delta, "Sigma": sigma, "Xi": xi, "Lambda": lam}


def eoc(h_values, errors):
    """Experimental orders of convergence between consecutive levels.

    Returns (orders, mean); orders[i] compares level i against level i+1.
    """
    h = np.asarray(h_values, dtype=float)
    e = np.asarray(errors, dtype=float)
    if np.any(e <= 0):
        raise ValueError("error values must be positive for EOC")
    if np.any(np.diff(h) >= 0):
        raise ValueError("mesh sizes must be strictly decreasing")
    orders = np.diff(np.log(e)) / np.diff(np.log(h))
    return orders, float(orders.mean())


@dataclass
class ExperimentSpec:
    example: int
    levels: list
    rho_scale: float = DEFAULT_RHO_SCALE
    K: BoxK = DEFAULT_K
    max_iters: int = 500
    tol: float = 1e-6
    milestone_every: int = 0  # 0 disables milestone metric logging

    def __post_init__(self):
        if self.example not in (1, 2):
            raise ValueError(f"unknown example {self.example}, expected 1 or 2")
        if list(self.levels) != sorted(set(int(l) for l in self.levels)) or \
                any(l < 1 for l in self.levels):
            raise ValueError("levels must be strictly increasing positive integers")


@dataclass
class LevelResult:
    ell: int
    rho: float
    h: float
    delta: float
    record: RunRecord
    metrics: dict
    milestones: list = dc_field(default_factory=list)


def run_level(spec: ExperimentSpec, ell: int) -> LevelResult:
    """Full pipeline at one refinement level: mesh, data, minimization, errors."""
    mesh = meshmod.build_uniform_mesh(ell)
    rho = spec.rho_scale * mesh.h
    q_field, load = build_problem(spec.example, mesh, spec.K)
    z, delta = noisy_observation(mesh)
    ctx = make_context(mesh, z, rho, spec.K, load)

    config = RunConfig(ell=ell, rho=rho, K=spec.K,
                       max_iters=spec.max_iters, tol=spec.tol)
    L_h = lipschitz_bound(ell, rho, discrete_source_l2(mesh, load), spec.K)
    validate_schedule(config.schedule, config.max_iters, L_h)

    from .fields import constant_field
    Q0 = constant_field(mesh, [2.0, 0.0, 2.0])
    Q_star = q_field

    milestones = []
    callback = None
    if spec.milestone_every > 0:
        def callback(m, Q, u, tol_val):
            if m % spec.milestone_every == 0:
                row = {"iteration": m, "tolerance": tol_val}
                row.update(error_metrics(mesh, Q, q_field, u))
                milestones.append(row)

    record = run(ctx, config, Q0, Q_star, callback=callback)
    metrics = error_metrics(mesh, record.final_Q, q_field, record.final_state)
    return LevelResult(ell=ell, rho=rho, h=mesh.h, delta=delta,
                       record=record, metrics=metrics, milestones=milestones)


def run_convergence_study(spec: ExperimentSpec):
    """Run every level and tabulate errors and their convergence orders.

    Returns (level_results, eoc_table) where eoc_table maps each metric name
    to (orders_per_level, mean).
    """
    results = [run_level(spec, ell) for ell in spec.levels]
    eoc_table = {}
    if len(results) >= 2:
        hs = [r.h for r in results]
        for name in ("Gamma", "Delta", "Sigma", "Xi", "Lambda"):
            vals = [r.metrics[name] for r in results]
            if all(v > 0 for v in vals):
                eoc_table[name] = eoc(hs, vals)
    return results, eoc_table
