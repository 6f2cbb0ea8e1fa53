"""Gaussian product-kernel density estimation with a rule-of-thumb bandwidth."""
import logging
from typing import Union

import numpy as np
from scipy.integrate import trapezoid

from core.density import pdf_many
from core.errors import DegenerateSampleError, DimensionMismatchError
from models.mixture import GaussianMixture
from models.sample import BandwidthReport, SampleBatch

logger = logging.getLogger(__name__)

SILVERMAN_FACTOR = 1.06
IQR_SCALE = 1.34

BatchLike = Union[SampleBatch, np.ndarray]


def _as_batch(batch: BatchLike) -> SampleBatch:
    if isinstance(batch, SampleBatch):
        return batch
    return SampleBatch(samples=batch)


def bandwidth(batch: BatchLike) -> BandwidthReport:
    """Per-axis h = 1.06 M^(-1/5) min(s, Q/1.34)"""
    batch = _as_batch(batch)
    x = batch.samples
    size = batch.size

    s = np.std(x, axis=0, ddof=1)
    q75, q25 = np.percentile(x, [75.0, 25.0], axis=0)
    iqr = q75 - q25

    spread = np.minimum(s, iqr / IQR_SCALE)
    for axis in range(batch.dim):
        if s[axis] <= 0 and iqr[axis] <= 0:
            raise DegenerateSampleError(axis)
        if spread[axis] <= 0:
            # heavily tied axis: fall back to whichever statistic is positive
            spread[axis] = s[axis] if s[axis] > 0 else iqr[axis] / IQR_SCALE
            logger.debug(f"Axis {axis} has a zero spread statistic; using the positive one")

    h = SILVERMAN_FACTOR * size ** (-0.2) * spread
    return BandwidthReport(per_axis_h=h, per_axis_s=s, per_axis_Q=iqr, sample_size=size)


def fit(batch: BatchLike) -> GaussianMixture:
    """Equal-weight mixture with one kernel per sample and stddev h per axis"""
    batch = _as_batch(batch)
    report = bandwidth(batch)
    size = batch.size
    model = GaussianMixture(
        weights=np.full(size, 1.0 / size),
        means=batch.samples,
        stddevs=np.tile(np.asarray(report.per_axis_h), (size, 1)),
    )
    logger.info(f"Fitted KDE on {size} samples in dimension {batch.dim}, h={list(report.per_axis_h)}")
    return model


def integrated_squared_error(
    estimate: GaussianMixture,
    truth: GaussianMixture,
    lower: float,
    upper: float,
    points: int = 20_001,
) -> float:
    """Trapezoidal approximation of the integral of (estimate - truth)^2 over [lower, upper], d=1"""
    if estimate.dim != 1 or truth.dim != 1:
        raise DimensionMismatchError("integrated squared error is computed on a d=1 grid only")
    if not upper > lower:
        raise ValueError(f"empty integration range [{lower}, {upper}]")
    grid = np.linspace(lower, upper, points)
    diff = pdf_many(estimate, grid) - pdf_many(truth, grid)
    return float(trapezoid(diff * diff, grid))
