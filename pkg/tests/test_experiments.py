import numpy as np
import pytest

from qident.fem import nodal_norms, solve_forward
from qident.fields import eigvals2, is_admissible
from qident.mesh import build_uniform_mesh, nodal_interpolate_scalar
from qident.experiments import (DEFAULT_K, ExperimentSpec, build_problem,
                                centroid_field, eoc, error_metrics,
                                example1_q, example2_q, exact_state,
                                exact_state_grad, noisy_observation,
                                run_convergence_study, run_level,
                                truth_function)


def test_exact_state_boundary_and_gradient():
    x = np.linspace(-1, 1, 11)
    assert np.allclose(exact_state(x, np.ones_like(x)), 0.0)
    assert np.allclose(exact_state(np.ones_like(x), x), 0.0)
    # gradient by finite differences
    eps = 1e-6
    g = exact_state_grad(0.3, -0.4)
    fd1 = (exact_state(0.3 + eps, -0.4) - exact_state(0.3 - eps, -0.4)) / (2 * eps)
    fd2 = (exact_state(0.3, -0.4 + eps) - exact_state(0.3, -0.4 - eps)) / (2 * eps)
    assert np.allclose(g, [fd1, fd2], atol=1e-9)


def test_example1_admissible_and_clipped():
    rng = np.random.default_rng(9)
    pts = rng.uniform(-1, 1, size=(500, 2))
    Q = example1_q(pts[:, 0], pts[:, 1])
    assert is_admissible(Q, DEFAULT_K, tol=1e-12)
    # at the center the gradient vanishes: Q = q_lo * I
    assert np.allclose(example1_q(0.0, 0.0), [0.05, 0.0, 0.05], atol=1e-14)
    # where |grad u|^2 lies inside the box, the eigenvalues are (q_lo, |grad u|^2)
    g = exact_state_grad(0.5, 0.2)
    eta = float(np.sum(g ** 2))
    assert 0.05 < eta < 10.0
    lam = eigvals2(example1_q(0.5, 0.2))
    assert lam[0] == pytest.approx(0.05, rel=1e-12)
    assert lam[1] == pytest.approx(eta, rel=1e-12)


def test_example2_subdomain_values():
    # center: inside square, diamond and disc
    assert np.allclose(example2_q(0.0, 0.0), [3.0, 1.0, 4.0])
    # inside square only
    assert np.allclose(example2_q(0.45, 0.45), [3.0, 0.0, 2.0])
    # outside everything
    assert np.allclose(example2_q(0.9, 0.9), [1.0, 0.0, 2.0])
    # on the disc but outside the diamond
    assert np.allclose(example2_q(0.35, 0.35), [3.0, 0.0, 4.0])
    assert is_admissible(example2_q(*np.random.default_rng(0).uniform(-1, 1, (2, 300))), DEFAULT_K)


def test_truth_function_dispatch():
    assert truth_function(1)(0.0, 0.0) is not None
    assert truth_function(2) is example2_q
    with pytest.raises(ValueError):
        truth_function(3)


def test_noise_level_formula():
    for ell in (6, 12):
        mesh = build_uniform_mesh(ell)
        z, delta = noisy_observation(mesh)
        assert delta == pytest.approx(2.0 / np.sqrt(3.0) * mesh.h, rel=1e-14)
        # the perturbation is the interpolated affine noise
        u_bar = nodal_interpolate_scalar(mesh, exact_state)
        noise = z - u_bar
        _, h1, _ = nodal_norms(mesh, noise)
        assert h1 == pytest.approx(delta, rel=1e-12)


def test_centroid_field_shape():
    mesh = build_uniform_mesh(4)
    Q = centroid_field(mesh, example2_q)
    assert Q.shape == (mesh.n_tris, 3)


@pytest.mark.parametrize("example", [1, 2])
def test_inverse_crime_consistency(example):
    mesh = build_uniform_mesh(6)
    q_field, load = build_problem(example, mesh)
    u = solve_forward(mesh, q_field, load)
    u_bar = nodal_interpolate_scalar(mesh, exact_state)
    _, h1, _ = nodal_norms(mesh, u - u_bar)
    assert h1 <= 1e-9


def test_error_metrics_zero_coefficient_error():
    mesh = build_uniform_mesh(6)
    q_field, load = build_problem(1, mesh)
    u_bar = nodal_interpolate_scalar(mesh, exact_state)
    m = error_metrics(mesh, q_field, q_field, u_bar)
    assert m["Gamma"] == 0.0 and m["Delta"] == 0.0
    # state errors against the continuous exact state are interpolation errors
    assert 0 < m["Sigma"] < m["Xi"]
    assert m["Xi"] == pytest.approx(np.hypot(m["Sigma"], m["Lambda"]), rel=1e-12)


def test_eoc_synthetic():
    orders, mean = eoc([1.0, 0.5, 0.25], [8.0, 1.0, 0.125])
    assert np.allclose(orders, 3.0, atol=1e-12)
    assert mean == pytest.approx(3.0)
    with pytest.raises(ValueError):
        eoc([1.0, 0.5], [1.0, 0.0])
    with pytest.raises(ValueError):
        eoc([0.5, 1.0], [1.0, 0.5])


def test_experiment_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec(example=5, levels=[6])
    with pytest.raises(ValueError):
        ExperimentSpec(example=1, levels=[12, 6])


def test_run_level_smoke():
    spec = ExperimentSpec(example=1, levels=[6], max_iters=50)
    res = run_level(spec, 6)
    assert res.record.iterations == 50
    assert res.rho == pytest.approx(1e-3 * res.h)
    assert set(res.metrics) == {"Gamma", "Delta", "Sigma", "Xi", "Lambda"}
    assert res.metrics["Gamma"] > 0


def test_run_level_milestones():
    spec = ExperimentSpec(example=1, levels=[6], max_iters=30, milestone_every=10)
    res = run_level(spec, 6)
    assert [row["iteration"] for row in res.milestones] == [10, 20, 30]
    assert all("Gamma" in row and "tolerance" in row for row in res.milestones)


def test_convergence_study_two_levels():
    spec = ExperimentSpec(example=2, levels=[6, 12])
    results, eoc_table = run_convergence_study(spec)
    assert [r.ell for r in results] == [6, 12]
    assert "Gamma" in eoc_table
    orders, mean = eoc_table["Gamma"]
    assert len(orders) == 1 and mean == pytest.approx(orders[0])
