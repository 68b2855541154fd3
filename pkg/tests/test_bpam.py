import numpy as np
import pytest

from bregprox import bpam
from bregprox.analytic import PowerProxSpec, make_power_prox_solver
from bregprox.errors import ConfigError
from bregprox.kernels import make_kernel
from bregprox.objectives import power_lp, quadratic_lsq
from bregprox.proxcore import ProxQuery, SearchConfig, left_envelope


def small_problem(seed=7, n=6, lam=0.5, M=10.0):
    return bpam.make_sparse_recovery_problem(n=n, p_exp=0.5, alpha=2,
                                             lam=lam, mu=1.0, M=M, seed=seed)


def test_problem_shapes():
    problem, u0, x0 = small_problem()
    assert problem.A.shape == (6, 6)
    assert u0.shape == (6,) and x0.shape == (6,)
    assert problem.phi.dim == 6


def test_joint_objective_decreases_with_slack():
    problem, u0, x0 = small_problem()
    x_update = bpam.make_power_x_update(0.5, 2)
    trace = bpam.bpam_run(problem, (u0, x0), x_update, max_iters=400,
                          res_tol=0.0)
    F = np.array(trace.F_vals)
    assert np.all(np.diff(F) <= 1e-9 * (1.0 + np.abs(F[:-1])))
    # the recorded slack is the sufficient-decrease surplus; never negative
    # beyond roundoff
    assert min(trace.slack) >= -1e-9 * (1.0 + max(abs(F.min()), abs(F.max())))


def test_run_converges_to_stationarity():
    problem, u0, x0 = small_problem()
    x_update = bpam.make_power_x_update(0.5, 2)
    trace = bpam.bpam_run(problem, (u0, x0), x_update, max_iters=5000,
                          res_tol=1e-7)
    assert trace.converged
    assert trace.rho_x[-1] <= 1e-7 and trace.rho_u[-1] <= 1e-7


def test_power_x_update_matches_oracle():
    problem, u0, x0 = small_problem(n=2)
    x_an = bpam.make_power_x_update(0.5, 2)(problem, u0, x0)
    x_or = bpam.make_oracle_x_update(
        SearchConfig(box=[(-6.0, 6.0)] * 2, resolution=2e-3))(problem, u0, x0)
    assert np.allclose(x_an, x_or, atol=1e-5)


def test_palm_u_update_is_exact_partial_minimizer():
    # the quadratic model solved by the u-step equals the true partial
    # objective up to a constant, so no candidate u can do better
    problem, u0, x0 = small_problem()
    x_update = bpam.make_power_x_update(0.5, 2)
    x1 = x_update(problem, u0, x0)
    u1 = bpam.bpam_palm_u_update(problem, u0, x1)
    base = bpam.F_lambda(problem, u1, x1) + bpam.d_omega(problem, u1, u0)
    rng = np.random.default_rng(0)
    for _ in range(40):
        cand = u1 + rng.normal(scale=0.05, size=u1.size)
        val = bpam.F_lambda(problem, cand, x1) + bpam.d_omega(problem, cand, u0)
        assert val >= base - 1e-9 * (1.0 + abs(base))


def test_residuals_vanish_only_at_stationary_pairs():
    problem, u0, x0 = small_problem()
    rho_x, rho_u = bpam.stationarity_residuals(problem, u0, x0)
    assert rho_x > 1e-3 or rho_u > 1e-3
    x_update = bpam.make_power_x_update(0.5, 2)
    trace = bpam.bpam_run(problem, (u0, x0), x_update, max_iters=5000,
                          res_tol=1e-8)
    rho_x, rho_u = bpam.stationarity_residuals(problem, trace.u, trace.x)
    assert rho_x <= 1e-8 and rho_u <= 1e-8


def test_translated_stationarity_at_limit():
    problem, u0, x0 = small_problem()
    x_update = bpam.make_power_x_update(0.5, 2)
    trace = bpam.bpam_run(problem, (u0, x0), x_update, max_iters=5000,
                          res_tol=1e-8)
    rep = bpam.translated_stationarity_check(problem, trace.u, trace.x,
                                             tol=1e-6,
                                             solver=make_power_prox_solver(0.5, 2))
    assert rep["ok"]
    assert rep["residual"] <= 1e-6


def test_bpg_equivalence_on_identity_coupling():
    spec = PowerProxSpec(0.5, 2, 1.0)
    problem = bpam.BpamProblem(
        f=power_lp(0.5), g=quadratic_lsq(np.array([[1.0]]), np.array([2.0])),
        A=np.eye(1), phi=spec.kernel(), lam=1.0, sigma=None, M=4.0)
    rep = bpam.bpg_equivalence_demo(problem, np.array([3.0]), 40,
                                    make_power_prox_solver(0.5, 2))
    assert rep["max_gap"] <= 1e-8


def test_bpg_demo_requires_identity_coupling():
    spec = PowerProxSpec(0.5, 2, 1.0)
    problem = bpam.BpamProblem(
        f=power_lp(0.5), g=quadratic_lsq(np.array([[1.0]]), np.array([2.0])),
        A=2.0 * np.eye(1), phi=spec.kernel(), lam=1.0, sigma=None, M=4.0)
    with pytest.raises(AssertionError):
        bpam.bpg_equivalence_demo(problem, np.array([3.0]), 5,
                                  make_power_prox_solver(0.5, 2))


def test_u_update_requires_classical_prox():
    problem, u0, x0 = small_problem()
    from dataclasses import replace
    g_no_prox = replace(problem.g, prox_classical=None)
    bad = bpam.BpamProblem(f=problem.f, g=g_no_prox, A=problem.A,
                           phi=problem.phi, lam=problem.lam,
                           sigma=problem.sigma, M=problem.M)
    with pytest.raises(ConfigError):
        bpam.bpam_palm_u_update(bad, u0, x0)


def test_x_update_with_extra_quadratic_kernel_term():
    # folding sigma = tau * phi into the step must still minimize the
    # x-subproblem: compare against a direct oracle solve on a 1-D instance
    tau = 0.7
    spec = PowerProxSpec(0.5, 2, 0.8)
    phi = spec.kernel()
    from bregprox.kernels import scale_kernel
    problem = bpam.BpamProblem(
        f=power_lp(0.5), g=quadratic_lsq(np.array([[1.0]]), np.array([1.0])),
        A=np.eye(1), phi=phi, lam=0.8, sigma=scale_kernel(phi, tau), M=4.0)
    u, x_old = np.array([1.3]), np.array([0.9])
    x_new = bpam.make_power_x_update(0.5, 2, tau=tau)(problem, u, x_old)

    def direct(x):
        from bregprox.divergence import bregman
        return (problem.f.value(x)
                + bregman(phi, x, bpam.coupling_point(problem, u)) / 0.8
                + tau * bregman(phi, x, x_old))

    grid = np.linspace(-3.0, 3.0, 6001).reshape(-1, 1)
    vals = [direct(g) for g in grid]
    assert direct(x_new) <= min(vals) + 1e-6
