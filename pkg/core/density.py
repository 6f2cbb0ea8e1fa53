"""Probability computations for axis-aligned Gaussian mixtures.

In d=1 every ball integral is closed form (standard normal cdf via scipy's
erf-based ``ndtr``). For d>1 a Euclidean ball against an axis-aligned Gaussian
has no elementary closed form; those integrals are averaged over a fixed,
scrambled Sobol point set so repeated calls agree bit-for-bit.
"""
import logging
from functools import lru_cache
from typing import NamedTuple, Sequence, Union

import numpy as np
from scipy.special import ndtr, ndtri
from scipy.stats import qmc

from core.config import get_settings
from core.errors import DimensionMismatchError
from models.mixture import Ball, GaussianMixture

logger = logging.getLogger(__name__)

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)
_LOG_2PI = np.log(2.0 * np.pi)

Vector = Union[Sequence[float], np.ndarray, float]


class BallMoments(NamedTuple):
    """Partial moments of a mixture over {||x - theta||^2 <= lambda}"""
    mass: float
    first: np.ndarray
    second: float
    error_bound: float


def _as_point(model: GaussianMixture, x: Vector, what: str = "point") -> np.ndarray:
    point = np.atleast_1d(np.asarray(x, dtype=float))
    if point.ndim != 1 or point.shape[0] != model.dim:
        raise DimensionMismatchError(
            f"{what} has dimension {point.shape[-1] if point.ndim else 0}, model has dimension {model.dim}"
        )
    return point


def _phi(z: np.ndarray) -> np.ndarray:
    return _INV_SQRT_2PI * np.exp(-0.5 * z * z)


def _z_phi(z: np.ndarray) -> np.ndarray:
    # z * phi(z) with the limit 0 at +-inf
    out = np.zeros_like(z)
    finite = np.isfinite(z)
    out[finite] = z[finite] * _phi(z[finite])
    return out


def _interval_mass(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """Phi(beta) - Phi(alpha), taken on the tail that keeps precision"""
    out = np.empty_like(alpha)
    upper = alpha > 0
    lower = ~upper
    out[upper] = ndtr(-alpha[upper]) - ndtr(-beta[upper])
    out[lower] = ndtr(beta[lower]) - ndtr(alpha[lower])
    return out


def _moments_1d(model: GaussianMixture, theta: np.ndarray, radius_sq: float, second: bool) -> BallMoments:
    w = model.weights
    mu = model.means[:, 0]
    sigma = model.stddevs[:, 0]
    t = float(theta[0])
    r = np.sqrt(radius_sq)

    alpha = (t - r - mu) / sigma
    beta = (t + r - mu) / sigma
    mass_k = _interval_mass(alpha, beta)
    dphi = _phi(alpha) - _phi(beta)

    mass = float(np.dot(w, mass_k))
    first = np.array([float(np.dot(w, mu * mass_k + sigma * dphi))])

    total_second = 0.0
    if second:
        c = mu - t
        second_k = c * c * mass_k + 2.0 * c * sigma * dphi + sigma * sigma * (mass_k + _z_phi(alpha) - _z_phi(beta))
        total_second = float(np.dot(w, second_k))
        # the integrand lies in [0, lambda] on the ball; clip cancellation noise
        total_second = min(max(total_second, 0.0), radius_sq * mass)

    return BallMoments(mass=min(max(mass, 0.0), 1.0), first=first, second=total_second, error_bound=0.0)


@lru_cache(maxsize=8)
def _normal_points(dim: int, log2_samples: int, seed: int) -> np.ndarray:
    """Scrambled Sobol points pushed through the standard normal quantile"""
    logger.debug(f"Generating 2^{log2_samples} Sobol points in dimension {dim} (seed {seed})")
    sampler = qmc.Sobol(d=dim, scramble=True, seed=seed)
    u = sampler.random_base2(m=log2_samples)
    u = np.clip(u, np.finfo(float).tiny, 1.0 - np.finfo(float).epsneg)
    z = ndtri(u)
    z.setflags(write=False)
    return z


def _moments_qmc(model: GaussianMixture, theta: np.ndarray, radius_sq: float, second: bool) -> BallMoments:
    settings = get_settings()
    z = _normal_points(model.dim, settings.QMC_LOG2_SAMPLES, settings.QMC_SEED)
    n_points, dim = z.shape
    block = max(1, settings.PDF_CHUNK_ELEMENTS // (n_points * dim))

    mass = 0.0
    first = np.zeros(dim)
    total_second = 0.0
    for start in range(0, model.n_components, block):
        sl = slice(start, start + block)
        w = model.weights[sl]
        # x - theta for every (component, point) pair
        offset = (model.means[sl] - theta)[:, None, :] + model.stddevs[sl][:, None, :] * z[None, :, :]
        dist_sq = np.einsum('bnd,bnd->bn', offset, offset)
        inside = dist_sq <= radius_sq

        mass += float(np.dot(w, inside.mean(axis=1)))
        first += w @ ((offset + theta) * inside[..., None]).mean(axis=1)
        if second:
            total_second += float(np.dot(w, np.where(inside, dist_sq, 0.0).mean(axis=1)))

    mass = min(max(mass, 0.0), 1.0)
    error_bound = float(np.sqrt(mass * (1.0 - mass) / n_points))
    return BallMoments(mass=mass, first=first, second=total_second, error_bound=error_bound)


def moments_at(model: GaussianMixture, theta: Vector, radius_sq: float, second: bool = True) -> BallMoments:
    """Mass, partial mean and partial second moment of the ball around theta in one pass"""
    center = _as_point(model, theta, "ball center")
    if radius_sq < 0:
        raise ValueError(f"radius_sq must be >= 0, got {radius_sq}")
    if radius_sq == 0:
        return BallMoments(mass=0.0, first=np.zeros(model.dim), second=0.0, error_bound=0.0)
    if model.dim == 1:
        return _moments_1d(model, center, float(radius_sq), second)
    return _moments_qmc(model, center, float(radius_sq), second)


def ball_moments(model: GaussianMixture, ball: Ball, second: bool = True) -> BallMoments:
    return moments_at(model, ball.center_array, ball.radius_sq, second=second)


def mass_in_ball(model: GaussianMixture, ball: Ball) -> float:
    """P(||X - theta||^2 <= lambda)"""
    return ball_moments(model, ball, second=False).mass


def partial_mean(model: GaussianMixture, ball: Ball) -> np.ndarray:
    """E[X 1(||X - theta||^2 <= lambda)]"""
    return ball_moments(model, ball, second=False).first


def partial_second_moment(model: GaussianMixture, ball: Ball) -> float:
    """E[||X - theta||^2 1(||X - theta||^2 <= lambda)]"""
    return ball_moments(model, ball).second


def pdf_many(model: GaussianMixture, xs: np.ndarray) -> np.ndarray:
    """Density at each row of an (N, d) array, evaluated in component blocks"""
    points = np.asarray(xs, dtype=float)
    if points.ndim == 1 and model.dim == 1:
        points = points.reshape(-1, 1)
    if points.ndim != 2 or points.shape[1] != model.dim:
        raise DimensionMismatchError(f"points of shape {points.shape} do not match model dimension {model.dim}")

    n_points, dim = points.shape
    block = max(1, get_settings().PDF_CHUNK_ELEMENTS // max(1, n_points * dim))
    log_norm = -np.sum(np.log(model.stddevs), axis=1) - 0.5 * dim * _LOG_2PI

    out = np.zeros(n_points)
    for start in range(0, model.n_components, block):
        sl = slice(start, start + block)
        z = (points[None, :, :] - model.means[sl][:, None, :]) / model.stddevs[sl][:, None, :]
        log_k = log_norm[sl][:, None] - 0.5 * np.einsum('knd,knd->kn', z, z)
        out += model.weights[sl] @ np.exp(log_k)
    return out


def pdf(model: GaussianMixture, x: Vector) -> float:
    point = _as_point(model, x)
    return float(pdf_many(model, point.reshape(1, -1))[0])


def cdf(model: GaussianMixture, x: float) -> float:
    """Mixture cdf, defined for d=1 only"""
    if model.dim != 1:
        raise DimensionMismatchError(f"cdf is defined for d=1 only, model has dimension {model.dim}")
    z = (float(x) - model.means[:, 0]) / model.stddevs[:, 0]
    return float(np.dot(model.weights, ndtr(z)))


def mean(model: GaussianMixture) -> np.ndarray:
    return model.weights @ model.means


def variance_total(model: GaussianMixture) -> float:
    """E[||X - E[X]||^2] by the law of total variance"""
    centered = model.means - mean(model)
    per_component = np.sum(model.stddevs ** 2, axis=1) + np.einsum('kd,kd->k', centered, centered)
    return float(np.dot(model.weights, per_component))


def sample(model: GaussianMixture, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw `size` iid observations, returned as an (size, d) array"""
    labels = rng.choice(model.n_components, size=size, p=model.weights)
    noise = rng.standard_normal((size, model.dim))
    return model.means[labels] + model.stddevs[labels] * noise
