import numpy as np
import pytest
from pydantic import ValidationError
from scipy.stats import norm

from core import density
from core.config import get_settings
from core.errors import BracketExpansionError
from core.solver import (
    alternating_solve,
    ccp_solve,
    ccp_step,
    kappa_shift_step,
    lagrangian_gradient,
    lagrangian_tilde,
    multi_start_solve,
    objective,
    solve_lambda,
    subgradient,
    transmit_prob,
)
from models.mixture import Ball, GaussianMixture
from models.policy import Policy, SolverConfig, UpdateRule

MEDIAN_RADIUS_SQ = norm.ppf(0.75) ** 2


def _random_case(rng, random_mixture):
    model = random_mixture(rng)
    kappa_bar = float(rng.uniform(0.2, 0.8))
    delta = float(rng.uniform(0.0, 0.5 * kappa_bar))
    return model, SolverConfig(kappa_bar=kappa_bar, delta=delta)


def test_transmit_prob_limits(standard_normal):
    assert transmit_prob(standard_normal, Policy(theta=[0.0], lambda_=0.0)) == 1.0
    assert transmit_prob(standard_normal, Policy(theta=[0.0], lambda_=1e6)) == pytest.approx(0.0, abs=1e-15)
    median = Policy(theta=[0.0], lambda_=MEDIAN_RADIUS_SQ)
    assert transmit_prob(standard_normal, median) == pytest.approx(0.5, abs=1e-12)


def test_solve_lambda_quantile(standard_normal):
    lam = solve_lambda(standard_normal, [0.0], 0.5)
    assert lam == pytest.approx(0.454936, abs=1e-6)
    assert lam == pytest.approx(MEDIAN_RADIUS_SQ, rel=1e-9)


def test_solve_lambda_reference_mixture(reference_mixture):
    lam = solve_lambda(reference_mixture, [0.0592], 0.5)
    assert lam == pytest.approx(1.5063, abs=2e-3)


def test_solve_lambda_near_full_transmission(standard_normal):
    assert solve_lambda(standard_normal, [0.0], 1 - 1e-6) < 1e-10


def test_solve_lambda_rejects_bad_target(standard_normal):
    for target in (0.0, 1.0, 1.5):
        with pytest.raises(ValueError):
            solve_lambda(standard_normal, [0.0], target)


def test_solve_lambda_bracket_cap(monkeypatch):
    far = GaussianMixture(weights=[1.0], means=[1e6], stddevs=[1.0])
    monkeypatch.setattr(get_settings(), 'LAMBDA_BRACKET_MAX_DOUBLINGS', 5)
    with pytest.raises(BracketExpansionError):
        solve_lambda(far, [0.0], 0.5)


def test_subgradient_examples(standard_normal, reference_mixture):
    assert subgradient(standard_normal, Policy(theta=[0.0], lambda_=0.7))[0] == pytest.approx(0.0, abs=1e-15)

    g = subgradient(standard_normal, Policy(theta=[1.0], lambda_=1.0))[0]
    outside = 1.0 - (norm.cdf(2.0) - norm.cdf(0.0))
    inside_mean = norm.pdf(0.0) - norm.pdf(2.0)
    assert g == pytest.approx(-2 * (-inside_mean - outside), rel=1e-12)
    assert g == pytest.approx(1.73542, abs=1e-4)

    g0 = subgradient(reference_mixture, Policy(theta=[0.7], lambda_=0.0))[0]
    assert g0 == pytest.approx(-2 * (0.1 - 0.7), abs=1e-14)


def test_ccp_step_examples(standard_normal, reference_mixture):
    step = ccp_step(standard_normal, [1.0], 1.0)[0]
    assert step == pytest.approx(0.86766, abs=1e-4)
    assert ccp_step(standard_normal, [0.0], 0.9)[0] == pytest.approx(0.0, abs=1e-15)
    assert ccp_step(reference_mixture, [1.3], 1e6)[0] == pytest.approx(0.1, abs=1e-12)


def test_ccp_step_equals_mean_plus_half_subgradient(random_mixture):
    rng = np.random.default_rng(17)
    for _ in range(50):
        model = random_mixture(rng)
        theta = float(rng.uniform(-3, 3))
        lam = float(rng.uniform(0.05, 6.0))
        g = subgradient(model, Policy(theta=[theta], lambda_=lam))
        expected = density.mean(model) + g / 2
        assert ccp_step(model, [theta], lam) == pytest.approx(expected, abs=1e-12)


def test_kappa_shift_step(reference_mixture):
    ball = Ball(center=[0.3], radius_sq=1.2)
    expected = density.partial_mean(reference_mixture, ball)[0] - 0.4 * 0.3
    assert kappa_shift_step(reference_mixture, [0.3], 1.2, 0.4)[0] == pytest.approx(expected, abs=1e-15)


def test_ccp_solve_symmetric_fixed_point(standard_normal):
    config = SolverConfig(kappa_bar=0.5)
    theta, trace = ccp_solve(standard_normal, [1.0], MEDIAN_RADIUS_SQ, config)
    assert trace.converged
    assert theta[0] == pytest.approx(0.0, abs=1e-7)
    assert trace.thetas[0] == (1.0,)
    assert len(trace.lagrangian) == trace.iterations + 1


def test_ccp_solve_from_mean_with_huge_threshold(reference_mixture):
    config = SolverConfig(kappa_bar=0.5)
    theta, trace = ccp_solve(reference_mixture, density.mean(reference_mixture), 1e6, config)
    assert trace.converged
    assert trace.iterations == 1
    assert theta[0] == pytest.approx(0.1, abs=1e-12)


def test_ccp_solve_fixed_point_residual(random_mixture):
    rng = np.random.default_rng(23)
    config = SolverConfig(kappa_bar=0.5)
    for _ in range(20):
        model = random_mixture(rng)
        lam = float(rng.uniform(0.1, 4.0))
        theta, trace = ccp_solve(model, rng.uniform(-2, 2, size=1), lam, config)
        moments = density.moments_at(model, theta, lam)
        assert trace.converged
        assert np.linalg.norm(theta - moments.first / moments.mass) * moments.mass <= 10 * config.theta_tol


def test_ccp_solve_flags_iteration_cap(reference_mixture):
    config = SolverConfig(kappa_bar=0.5, max_inner_iters=2)
    _, trace = ccp_solve(reference_mixture, [2.5], 1.5, config)
    assert not trace.converged
    assert trace.iterations == 2


def test_objective_examples(standard_normal, reference_mixture):
    z = norm.ppf(0.75)
    median = Policy(theta=[0.0], lambda_=MEDIAN_RADIUS_SQ)
    value = objective(standard_normal, median, 0.5)
    assert value == pytest.approx(0.5 - 2 * z * norm.pdf(z), abs=1e-12)
    assert value == pytest.approx(0.0712, abs=2e-4)

    always = Policy(theta=[0.0], lambda_=0.0)
    assert objective(reference_mixture, always, 0.5) == pytest.approx(density.variance_total(reference_mixture))


def test_lagrangian_tilde_examples(standard_normal):
    assert lagrangian_tilde(standard_normal, [0.4], 0.0, 0.5) == 0.0
    median = Policy(theta=[0.0], lambda_=MEDIAN_RADIUS_SQ)
    assert lagrangian_tilde(standard_normal, [0.0], MEDIAN_RADIUS_SQ, 0.5) == pytest.approx(
        objective(standard_normal, median, 0.5), abs=1e-12)

    values = [lagrangian_tilde(standard_normal, [0.0], lam, 0.5) for lam in (1.0, 10.0, 100.0)]
    assert values[0] > values[1] > values[2]


def test_lagrangian_gradient_matches_finite_differences(random_mixture):
    rng = np.random.default_rng(31)
    step = 1e-4
    for _ in range(50):
        model = random_mixture(rng)
        theta = float(rng.uniform(-3, 3))
        lam = float(rng.uniform(0.05, 6.0))
        kappa_bar = float(rng.uniform(0.1, 0.9))
        forward = lagrangian_tilde(model, [theta + step], lam, kappa_bar)
        backward = lagrangian_tilde(model, [theta - step], lam, kappa_bar)
        numeric = (forward - backward) / (2 * step)
        assert lagrangian_gradient(model, [theta], lam)[0] == pytest.approx(numeric, abs=1e-5)


def test_alternating_solve_standard_normal(standard_normal):
    policy, trace = alternating_solve(standard_normal, SolverConfig(kappa_bar=0.5))
    assert trace.converged
    assert policy.theta[0] == pytest.approx(0.0, abs=1e-8)
    assert policy.lambda_ == pytest.approx(0.454936, abs=1e-6)
    assert trace.theta_init == (0.0,)
    assert trace.records[0].iteration == 0


def test_alternating_solve_hits_backed_off_capacity(reference_mixture):
    config = SolverConfig(kappa_bar=0.5, delta=0.1)
    policy, trace = alternating_solve(reference_mixture, config)
    assert trace.converged
    assert transmit_prob(reference_mixture, policy) == pytest.approx(0.4, abs=config.lambda_tol)


def test_reference_mixture_with_kappa_shift_rule(reference_mixture):
    config = SolverConfig(kappa_bar=0.5, update_rule=UpdateRule.KAPPA_SHIFT)
    policy, trace = alternating_solve(reference_mixture, config)
    assert trace.converged
    assert policy.theta[0] == pytest.approx(0.0592, abs=1e-3)
    assert policy.lambda_ == pytest.approx(1.5063, abs=2e-3)
    assert objective(reference_mixture, policy, 0.5) == pytest.approx(0.3411, abs=1e-3)


def test_reference_mixture_with_ccp_rule(reference_mixture):
    config = SolverConfig(kappa_bar=0.5)
    policy, trace = alternating_solve(reference_mixture, config)
    assert trace.converged
    moments = density.moments_at(reference_mixture, policy.theta_array, policy.lambda_)
    assert 1 - moments.mass == pytest.approx(0.5, abs=1e-8)
    assert abs(policy.theta[0] - moments.first[0] / 0.5) <= 1e-7
    assert objective(reference_mixture, policy, 0.5) <= 0.3411 + 1e-3


def test_saddle_conditions_and_descent_on_random_mixtures(random_mixture):
    rng = np.random.default_rng(2024)
    for _ in range(100):
        model, config = _random_case(rng, random_mixture)
        policy, trace = alternating_solve(model, config)
        assert trace.converged

        target = config.design_kappa
        moments = density.moments_at(model, policy.theta_array, policy.lambda_)
        assert abs((1 - moments.mass) - target) <= 1e-8
        assert np.linalg.norm(policy.theta_array - moments.first / (1 - target)) <= 1e-7

        for inner in trace.inner:
            steps = np.diff(inner.lagrangian)
            assert np.all(steps <= 1e-10)


def _cycling_case(random_mixture):
    # full inner solves on this mixture alternate between two thresholds forever
    rng = np.random.default_rng(77)
    for _ in range(20):
        model = random_mixture(rng)
        kappa_bar = float(rng.uniform(0.2, 0.8))
        if model.n_components == 2 and abs(kappa_bar - 0.2726) < 1e-4:
            return model, kappa_bar
    raise AssertionError("cycling mixture not found")


def test_outer_cycle_falls_back_to_interleaved_updates(random_mixture):
    model, kappa_bar = _cycling_case(random_mixture)
    assert sorted(model.weights) == pytest.approx([0.388, 0.612], abs=1e-3)

    policy, trace = alternating_solve(model, SolverConfig(kappa_bar=kappa_bar))
    assert trace.converged
    assert trace.interleaved_from is not None
    assert trace.outer_iterations < 1_000

    moments = density.moments_at(model, policy.theta_array, policy.lambda_)
    assert abs((1 - moments.mass) - kappa_bar) <= 1e-8
    assert np.linalg.norm(policy.theta_array - moments.first / (1 - kappa_bar)) <= 1e-7


def test_symmetric_solve_keeps_full_inner_loops(standard_normal):
    _, trace = alternating_solve(standard_normal, SolverConfig(kappa_bar=0.5))
    assert trace.converged
    assert trace.interleaved_from is None


def _oracle_profile(model, grid, kappa):
    """Objective along the feasible curve, using scipy.stats.norm and bisection only"""
    w = model.weights[None, :]
    mu = model.means[:, 0][None, :]
    sigma = model.stddevs[:, 0][None, :]
    theta = grid[:, None]

    def mass(r):
        return np.sum(w * (norm.cdf((theta + r - mu) / sigma) - norm.cdf((theta - r - mu) / sigma)), axis=1)

    span = np.max(np.abs(theta - mu)) + 12 * sigma.max()
    lo, hi = np.zeros(len(grid)), np.full(len(grid), span)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        below = mass(mid[:, None]) < 1 - kappa
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    r = (0.5 * (lo + hi))[:, None]

    a, b = (theta - r - mu) / sigma, (theta + r - mu) / sigma
    p = norm.cdf(b) - norm.cdf(a)
    c = mu - theta
    second = c * c * p + 2 * c * sigma * (norm.pdf(a) - norm.pdf(b)) + sigma ** 2 * (p + a * norm.pdf(a) - b * norm.pdf(b))
    return np.sum(w * second, axis=1)


def test_solution_is_a_grid_local_minimum(random_mixture):
    rng = np.random.default_rng(77)
    for _ in range(20):
        model = random_mixture(rng)
        kappa_bar = float(rng.uniform(0.2, 0.8))
        policy, trace = alternating_solve(model, SolverConfig(kappa_bar=kappa_bar))
        assert trace.converged

        means = model.means[:, 0]
        grid = np.linspace(means.min() - 1.0, means.max() + 1.0, 10_000)
        cell = grid[1] - grid[0]
        profile = _oracle_profile(model, grid, kappa_bar)
        interior = np.arange(1, len(grid) - 1)
        minima = interior[(profile[interior] <= profile[interior - 1]) & (profile[interior] <= profile[interior + 1])]

        value = objective(model, policy, kappa_bar)
        near = minima[np.abs(grid[minima] - policy.theta[0]) <= 2 * cell]
        assert near.size > 0
        assert np.min(np.abs(profile[near] - value)) <= 1e-4


def test_multi_start_keeps_best(reference_mixture):
    config = SolverConfig(kappa_bar=0.5, record_inner=False)
    best, trace = multi_start_solve(reference_mixture, config, [[-1.5], [0.1], [1.5]])
    for start in ([-1.5], [0.1], [1.5]):
        _, other = alternating_solve(reference_mixture, config, theta_init=start)
        assert trace.records[-1].objective <= other.records[-1].objective
    assert best.dim == 1


def test_solver_config_validation():
    with pytest.raises(ValidationError):
        SolverConfig(kappa_bar=0.5, delta=0.5)
    with pytest.raises(ValidationError):
        SolverConfig(kappa_bar=1.0)
    with pytest.raises(ValidationError):
        Policy(theta=[0.0], lambda_=-1.0)
    assert SolverConfig(kappa_bar=0.5, delta=0.1).design_kappa == pytest.approx(0.4)
