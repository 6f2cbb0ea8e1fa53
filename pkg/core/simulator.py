"""Finite-n Monte Carlo of n sensors sharing a capacity-limited collision channel."""
import logging
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from core.config import get_settings
from core.density import mean, sample
from core.errors import DimensionMismatchError
from models.mixture import GaussianMixture
from models.policy import Policy
from models.simulation import ChannelSpec, CollisionPoint, SimulationReport
from utils.parallel import ordered_map

logger = logging.getLogger(__name__)


class TrialTask(NamedTuple):
    model: GaussianMixture
    theta: np.ndarray
    lambda_: float
    n: int
    capacity: int
    seed: int
    trial: int


class TrialOutcome(NamedTuple):
    nmse: float
    collided: bool
    transmit_rate: float


def trial_generator(seed: int, n: int, trial: int) -> np.random.Generator:
    """Counter-based stream keyed by (seed, n, trial)"""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, n, trial])))


def run_trial(task: TrialTask) -> TrialOutcome:
    rng = trial_generator(task.seed, task.n, task.trial)
    x = sample(task.model, task.n, rng)
    diff = x - task.theta
    dist_sq = np.einsum('ij,ij->i', diff, diff)
    transmit = dist_sq > task.lambda_
    transmissions = int(np.count_nonzero(transmit))

    if transmissions <= task.capacity:
        error = float(np.sum(dist_sq[~transmit]))
    else:
        # every packet is lost; the receiver falls back to E[X] for all sensors
        centered = x - mean(task.model)
        error = float(np.einsum('ij,ij->', centered, centered))

    return TrialOutcome(
        nmse=error / task.n,
        collided=transmissions > task.capacity,
        transmit_rate=transmissions / task.n,
    )


def _stderr(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(np.std(values, ddof=1) / np.sqrt(values.size))


def simulate(
    model: GaussianMixture,
    policy: Policy,
    channel: ChannelSpec,
    trials: int,
    seed: int,
    workers: Optional[int] = None,
) -> SimulationReport:
    """Empirical NMSE and collision frequency of `trials` independent slots"""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if policy.dim != model.dim:
        raise DimensionMismatchError(f"policy dimension {policy.dim} does not match model dimension {model.dim}")

    tasks = [
        TrialTask(model, policy.theta_array, policy.lambda_, channel.n, channel.capacity, seed, trial)
        for trial in range(trials)
    ]
    try:
        outcomes = ordered_map(run_trial, tasks, workers)
    except Exception as e:
        logger.error(f"Simulation failed for n={channel.n}: {str(e)}")
        raise

    nmse = np.array([o.nmse for o in outcomes])
    collided = np.array([o.collided for o in outcomes], dtype=float)
    rates = np.array([o.transmit_rate for o in outcomes])

    collision_freq = float(collided.mean())
    report = SimulationReport(
        n=channel.n,
        capacity=channel.capacity,
        kappa_bar=channel.kappa_bar,
        trials=trials,
        seed=seed,
        nmse_mean=float(nmse.mean()),
        nmse_half_width=get_settings().CONFIDENCE_Z * _stderr(nmse),
        collision_freq=collision_freq,
        collision_stderr=float(np.sqrt(collision_freq * (1.0 - collision_freq) / trials)),
        empirical_transmit_rate=float(rates.mean()),
        transmit_rate_stderr=_stderr(rates),
    )
    logger.info(
        f"n={channel.n} capacity={channel.capacity}: nmse={report.nmse_mean:.6g} "
        f"+/- {report.nmse_half_width:.2g}, collision_freq={report.collision_freq:.4g}"
    )
    return report


def collision_curve(
    model: GaussianMixture,
    policy: Policy,
    kappa_bar: float,
    n_list: Sequence[int],
    trials: int,
    seed: int,
    workers: Optional[int] = None,
) -> List[CollisionPoint]:
    """Collision frequency at each n with capacity ceil(kappa_bar n)"""
    points = []
    for n in n_list:
        report = simulate(model, policy, ChannelSpec.from_kappa(n, kappa_bar), trials, seed, workers)
        points.append(
            CollisionPoint(
                n=report.n,
                capacity=report.capacity,
                collision_freq=report.collision_freq,
                collision_stderr=report.collision_stderr,
            )
        )
    return points
