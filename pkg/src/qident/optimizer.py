"""Relaxed gradient-projection iteration over admissible piecewise-constant
matrix fields, with the step schedules, stability constants, fixed-point
stopping tolerance and full run bookkeeping."""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .fields import BoxK, field_l2_norm, project_k
from .objective import ObjectiveContext, eval_gradient


def kappa(K: BoxK, d: int = 2, domain_measure: float = 4.0) -> float:
    """Coercivity constant of the admissible bilinear forms in the H1 norm."""
    return K.q_lo / (1.0 + np.sqrt(1.5) ** ((d + 2) / 2) * domain_measure ** (1.0 / d))


def inverse_estimate_constant(ell: int) -> float:
    """Upper constant relating Linf and L2 norms of piecewise-constant
    fields on the uniform level-ell mesh: |H|_inf <= (ell/sqrt 2) |H|_L2."""
    return ell / np.sqrt(2.0)


def lipschitz_bound(ell: int, rho: float, f_l2_norm: float, K: BoxK,
                    d: int = 2, domain_measure: float = 4.0) -> float:
    """Lipschitz constant L_h of the objective's gradient on the admissible set."""
    c_bar = inverse_estimate_constant(ell)
    kap = kappa(K, d=d, domain_measure=domain_measure)
    return 2.0 * c_bar * d * (c_bar * d / kap ** 3 * f_l2_norm ** 2
                              + rho * np.sqrt(domain_measure))


@dataclass(frozen=True)
class StepSchedule:
    """Sequences m -> (alpha_m, beta_m, gamma_m) driving the iteration.

    Stability needs alpha_m, beta_m in (0,1) and gamma_m in (0, L_h/2).
    The default keeps alpha_m bounded away from zero, so the iteration
    settles at the anchored fixed point alpha (Q* - Q) = beta (Q - P(Q -
    gamma grad)) rather than drifting toward the unanchored minimizer; the
    residual bias alpha/beta then vanishes with rho.
    """

    alpha: Callable[[int], float]
    beta: Callable[[int], float]
    gamma: Callable[[int], float]


def default_schedule(rho: float) -> StepSchedule:
    """alpha_m = m/(3m+1), beta_m = 100 m rho/(3m+1), gamma_m = 100 m rho/(2m+1)."""
    if rho <= 0:
        raise ValueError(f"rho must be positive, got {rho}")
    return StepSchedule(
        alpha=lambda m: m / (3.0 * m + 1.0),
        beta=lambda m: 100.0 * m * rho / (3.0 * m + 1.0),
        gamma=lambda m: 100.0 * m * rho / (2.0 * m + 1.0),
    )


def validate_schedule(schedule: StepSchedule, max_iters: int, lipschitz: float) -> None:
    """Raise if any step up to max_iters leaves the admissible window."""
    for m in range(1, max_iters + 1):
        a, b, g = schedule.alpha(m), schedule.beta(m), schedule.gamma(m)
        if not 0.0 < a < 1.0:
            raise ValueError(f"alpha_{m} = {a} outside (0, 1)")
        if not 0.0 < b < 1.0:
            raise ValueError(f"beta_{m} = {b} outside (0, 1)")
        if not 0.0 < g < lipschitz / 2.0:
            raise ValueError(f"gamma_{m} = {g} outside (0, L/2) with L = {lipschitz}")


@dataclass
class RunConfig:
    ell: int
    rho: float
    K: BoxK = BoxK(0.05, 10.0)
    max_iters: int = 500
    tol: float = 1e-6
    schedule: Optional[StepSchedule] = None

    def __post_init__(self):
        if self.rho <= 0 or self.tol <= 0:
            raise ValueError("rho and tol must be positive")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.schedule is None:
            self.schedule = default_schedule(self.rho)


@dataclass
class RunRecord:
    """Iteration history of one gradient-projection run."""

    m: list = field(default_factory=list)
    alpha: list = field(default_factory=list)
    beta: list = field(default_factory=list)
    gamma: list = field(default_factory=list)
    tolerance: list = field(default_factory=list)
    final_Q: Optional[np.ndarray] = None
    final_state: Optional[np.ndarray] = None
    stop_reason: str = ""

    @property
    def iterations(self) -> int:
        return len(self.m)


def gp_step(ctx: ObjectiveContext, Q_prev, Q_star, alpha, beta, gamma, grad=None):
    """One relaxed projected-gradient step.

    Q_next = (1-beta) Q_prev + alpha (Q_star - Q_prev)
             + beta P_K(Q_prev - gamma grad Upsilon(Q_prev)).
    Pass grad to reuse an already computed gradient at Q_prev.
    """
    if grad is None:
        grad = eval_gradient(ctx, Q_prev)
    proj = project_k(Q_prev - gamma * grad, ctx.K)
    return (1.0 - beta) * Q_prev + alpha * (Q_star - Q_prev) + beta * proj


def fixed_point_tolerance(ctx: ObjectiveContext, Q, gamma, grad=None) -> float:
    """L2 distance |Q - P_K(Q - gamma grad Upsilon(Q))|; zero exactly at the
    constrained minimizer, for any gamma > 0."""
    if grad is None:
        grad = eval_gradient(ctx, Q)
    return field_l2_norm(ctx.mesh, Q - project_k(Q - gamma * grad, ctx.K))


def run(ctx: ObjectiveContext, config: RunConfig, Q0, Q_star,
        callback=None) -> RunRecord:
    """Iterate gp_step from Q0 until the fixed-point tolerance drops below
    config.tol or max_iters is reached.

    The gradient at each iterate is computed once and shared between the
    stopping tolerance and the next step (one forward solve per iteration).
    callback(m, Q, u, tol) is invoked after every iteration.
    """
    sched = config.schedule
    record = RunRecord()
    Q = np.array(Q0, dtype=float)
    Q_star = np.asarray(Q_star, dtype=float)
    grad, u = eval_gradient(ctx, Q, return_state=True)
    try:
        for m in range(1, config.max_iters + 1):
            a, b, g = sched.alpha(m), sched.beta(m), sched.gamma(m)
            Q = gp_step(ctx, Q, Q_star, a, b, g, grad=grad)
            grad, u = eval_gradient(ctx, Q, return_state=True)
            tol_val = fixed_point_tolerance(ctx, Q, g, grad=grad)
            record.m.append(m)
            record.alpha.append(a)
            record.beta.append(b)
            record.gamma.append(g)
            record.tolerance.append(tol_val)
            if callback is not None:
                callback(m, Q, u, tol_val)
            if tol_val < config.tol:
                record.stop_reason = "tol"
                break
        else:
            record.stop_reason = "max_iters"
    finally:
        record.final_Q = Q
        record.final_state = u
    return record
