"""Saddle-point threshold policies for remote estimation over a collision channel.

The inner loop is the convex-concave procedure on E[min(||X - theta||^2, lambda)]
at a fixed threshold; the outer loop re-solves the threshold so that the
transmit probability sits at the design capacity.
"""
import logging
from typing import Iterable, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from core.config import get_settings
from core.density import BallMoments, Vector, mean, moments_at, variance_total
from core.errors import BracketExpansionError, DimensionMismatchError
from models.mixture import GaussianMixture
from models.policy import InnerTrace, OuterRecord, Policy, SolveTrace, SolverConfig, UpdateRule

logger = logging.getLogger(__name__)

# a theta step of at least STALL_RATIO times the previous one counts as a stall
STALL_RATIO = 0.999
STALL_PATIENCE = 2
MIN_DAMPING = 1.0 / 64


def _as_theta(model: GaussianMixture, theta: Vector) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(theta, dtype=float))
    if arr.shape != (model.dim,):
        raise DimensionMismatchError(f"theta has shape {arr.shape}, model has dimension {model.dim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("theta must be finite")
    return arr


def transmit_prob(model: GaussianMixture, policy: Policy) -> float:
    """P(U=1) = P(||X - theta||^2 > lambda)"""
    return 1.0 - moments_at(model, policy.theta_array, policy.lambda_, second=False).mass


def solve_lambda(
    model: GaussianMixture,
    theta: Vector,
    target_kappa: float,
    lambda_tol: Optional[float] = None,
) -> float:
    """Threshold lambda at which the transmit probability equals target_kappa"""
    if not 0.0 < target_kappa < 1.0:
        raise ValueError(f"target_kappa must lie in (0, 1), got {target_kappa}")
    settings = get_settings()
    lambda_tol = lambda_tol or settings.LAMBDA_TOL
    center = _as_theta(model, theta)
    target_mass = 1.0 - target_kappa

    def residual(lam: float) -> float:
        return moments_at(model, center, lam, second=False).mass - target_mass

    lo, hi = 0.0, settings.LAMBDA_BRACKET_START
    doublings = 0
    while residual(hi) < 0:
        if doublings >= settings.LAMBDA_BRACKET_MAX_DOUBLINGS:
            raise BracketExpansionError(
                f"no threshold reaches ball mass {target_mass} after {doublings} doublings (lambda_hi={hi})"
            )
        lo, hi = hi, 2.0 * hi
        doublings += 1

    lam = float(brentq(residual, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500))

    final = moments_at(model, center, lam, second=False)
    miss = abs(final.mass - target_mass)
    if miss > lambda_tol + final.error_bound:
        logger.warning(f"Threshold residual {miss:.3e} exceeds tolerance {lambda_tol:.1e} at theta={center.tolist()}")
    return lam


def subgradient(model: GaussianMixture, policy: Policy) -> np.ndarray:
    """g = -2 E[(X - theta) 1(||X - theta||^2 > lambda)]"""
    theta = policy.theta_array
    mom = moments_at(model, theta, policy.lambda_, second=False)
    return -2.0 * ((mean(model) - mom.first) - theta * (1.0 - mom.mass))


def _next_theta(theta: np.ndarray, mom: BallMoments, rule: UpdateRule, kappa: float) -> np.ndarray:
    if rule == UpdateRule.KAPPA_SHIFT:
        return mom.first - kappa * theta
    return mom.first + theta * (1.0 - mom.mass)


def ccp_step(model: GaussianMixture, theta_k: Vector, lambda_: float) -> np.ndarray:
    """theta_{k+1} = E[X 1(ball)] + theta_k P(outside ball)"""
    theta = _as_theta(model, theta_k)
    return _next_theta(theta, moments_at(model, theta, lambda_, second=False), UpdateRule.CCP, 0.0)


def kappa_shift_step(model: GaussianMixture, theta_k: Vector, lambda_: float, kappa: float) -> np.ndarray:
    """theta_{k+1} = E[X 1(ball)] - kappa theta_k"""
    theta = _as_theta(model, theta_k)
    return _next_theta(theta, moments_at(model, theta, lambda_, second=False), UpdateRule.KAPPA_SHIFT, kappa)


def _lagrangian_from(mom: BallMoments, lambda_: float, kappa_bar: float) -> float:
    return mom.second + lambda_ * (1.0 - mom.mass) - lambda_ * kappa_bar


def ccp_solve(
    model: GaussianMixture,
    theta_init: Vector,
    lambda_: float,
    config: SolverConfig,
) -> Tuple[np.ndarray, InnerTrace]:
    """Iterate the configured update at fixed lambda until the step falls below theta_tol"""
    theta = _as_theta(model, theta_init)
    record = config.record_inner
    kappa = config.design_kappa
    thetas, values = [], []

    converged = False
    iterations = 0
    while iterations < config.max_inner_iters:
        mom = moments_at(model, theta, lambda_, second=record)
        if record:
            thetas.append(tuple(theta))
            values.append(_lagrangian_from(mom, lambda_, kappa))
        new_theta = _next_theta(theta, mom, config.update_rule, kappa)
        iterations += 1
        step = float(np.linalg.norm(new_theta - theta))
        theta = new_theta
        if step <= config.theta_tol:
            converged = True
            break

    if record:
        thetas.append(tuple(theta))
        values.append(_lagrangian_from(moments_at(model, theta, lambda_), lambda_, kappa))
    if not converged:
        logger.warning(f"Inner loop hit {config.max_inner_iters} iterations at lambda={lambda_:.6g}")

    trace = InnerTrace(lambda_=lambda_, thetas=thetas, lagrangian=values, converged=converged, iterations=iterations)
    return theta, trace


def objective(model: GaussianMixture, policy: Policy, kappa_bar: float) -> float:
    """Asymptotic NMSE: partial second moment when collision-free, total variance otherwise"""
    mom = moments_at(model, policy.theta_array, policy.lambda_)
    if 1.0 - mom.mass <= kappa_bar + get_settings().FEASIBILITY_TOL:
        return mom.second
    return variance_total(model)


def lagrangian_tilde(model: GaussianMixture, theta: Vector, lambda_: float, kappa_bar: float) -> float:
    """E[min(||X - theta||^2, lambda)] - lambda kappa_bar"""
    return _lagrangian_from(moments_at(model, _as_theta(model, theta), lambda_), lambda_, kappa_bar)


def lagrangian_gradient(model: GaussianMixture, theta: Vector, lambda_: float) -> np.ndarray:
    """Gradient of lagrangian_tilde in theta, 2(theta - E[X]) - g"""
    center = _as_theta(model, theta)
    g = subgradient(model, Policy(theta=center, lambda_=lambda_))
    return 2.0 * (center - mean(model)) - g


def _outer_record(
    model: GaussianMixture,
    iteration: int,
    theta: np.ndarray,
    lambda_: float,
    config: SolverConfig,
    inner_iterations: int,
) -> OuterRecord:
    policy = Policy(theta=theta, lambda_=lambda_)
    return OuterRecord(
        iteration=iteration,
        theta=theta,
        lambda_=lambda_,
        objective=objective(model, policy, config.kappa_bar),
        constraint_residual=transmit_prob(model, policy) - config.design_kappa,
        inner_iterations=inner_iterations,
    )


def _damped_step(
    model: GaussianMixture,
    theta: np.ndarray,
    lambda_: float,
    config: SolverConfig,
    damping: float,
) -> Tuple[np.ndarray, float]:
    """One update at (theta, lambda) moved by a fraction `damping`; also returns the undamped step length"""
    mom = moments_at(model, theta, lambda_, second=False)
    full = _next_theta(theta, mom, config.update_rule, config.design_kappa) - theta
    return theta + damping * full, float(np.linalg.norm(full))


def alternating_solve(
    model: GaussianMixture,
    config: SolverConfig,
    theta_init: Optional[Vector] = None,
) -> Tuple[Policy, SolveTrace]:
    """Alternate inner theta solves and threshold solves at capacity kappa_bar - delta

    Full inner solves can settle into a cycle between two thresholds. When the
    theta step stops shrinking the loop switches to one update per threshold
    solve, halving the step each time it stalls again.
    """
    kappa = config.design_kappa
    theta = mean(model) if theta_init is None else _as_theta(model, theta_init)
    start = tuple(theta)
    lam = solve_lambda(model, theta, kappa, config.lambda_tol)

    records = [_outer_record(model, 0, theta, lam, config, 0)]
    inner_traces = []
    inner_converged = True
    inner_total = 0
    converged = False
    outer = 0
    interleaved_from = None
    damping = 1.0
    previous_step = np.inf
    stalls = 0

    while outer < config.max_outer_iters:
        outer += 1
        if interleaved_from is None:
            new_theta, inner = ccp_solve(model, theta, lam, config)
            inner_total += inner.iterations
            inner_converged = inner_converged and inner.converged
            if config.record_inner:
                inner_traces.append(inner)
            inner_iterations = inner.iterations
            theta_step = float(np.linalg.norm(new_theta - theta))
        else:
            new_theta, theta_step = _damped_step(model, theta, lam, config, damping)
            inner_total += 1
            inner_iterations = 1
        new_lam = solve_lambda(model, new_theta, kappa, config.lambda_tol)
        records.append(_outer_record(model, outer, new_theta, new_lam, config, inner_iterations))

        lambda_step = abs(new_lam - lam)
        theta, lam = new_theta, new_lam
        logger.debug(f"Outer {outer}: theta={theta.tolist()} lambda={lam:.12g} dtheta={theta_step:.2e}")
        if theta_step <= config.theta_tol and lambda_step <= config.lambda_tol * max(1.0, lam):
            converged = True
            break

        stalls = stalls + 1 if theta_step >= STALL_RATIO * previous_step else 0
        previous_step = theta_step
        if stalls >= STALL_PATIENCE:
            stalls = 0
            previous_step = np.inf
            if interleaved_from is None:
                interleaved_from = outer
                logger.info(f"Outer loop stalled at iteration {outer}; switching to interleaved updates")
            elif damping > MIN_DAMPING:
                damping /= 2.0
                logger.debug(f"Interleaved updates stalled; damping now {damping:g}")

    if not converged:
        logger.warning(f"Policy solve did not converge within {config.max_outer_iters} outer iterations")

    policy = Policy(theta=theta, lambda_=lam)
    trace = SolveTrace(
        records=records,
        inner=inner_traces,
        converged=converged,
        inner_converged=inner_converged,
        outer_iterations=outer,
        inner_iterations=inner_total,
        update_rule=config.update_rule,
        theta_init=start,
        interleaved_from=interleaved_from,
    )
    logger.info(
        f"Solved policy theta={list(policy.theta)} lambda={policy.lambda_:.10g} "
        f"objective={records[-1].objective:.10g} in {outer} outer iterations"
    )
    return policy, trace


def multi_start_solve(
    model: GaussianMixture,
    config: SolverConfig,
    inits: Optional[Iterable[Vector]] = None,
) -> Tuple[Policy, SolveTrace]:
    """Run alternating_solve from each initial theta and keep the lowest objective"""
    starts = list(inits or [])
    if not starts:
        return alternating_solve(model, config)

    best = None
    for theta_init in starts:
        policy, trace = alternating_solve(model, config, theta_init=theta_init)
        value = trace.records[-1].objective
        logger.info(f"Start {list(trace.theta_init)} reached objective {value:.10g}")
        if best is None or value < best[1].records[-1].objective:
            best = (policy, trace)
    return best
