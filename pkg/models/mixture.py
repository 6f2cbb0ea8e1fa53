from typing import List, Tuple
import numpy as np
from pydantic import Field, validator, root_validator

from core.config import get_settings
from .base import FrozenModel, as_float_tuple, frozen_array

class GaussianComponent(FrozenModel):
    """One axis-aligned Gaussian term of a mixture"""
    weight: float = Field(..., ge=0.0, le=1.0, description="Probability mass of the component")
    mean: Tuple[float, ...] = Field(..., description="Mean vector in R^d")
    stddev: Tuple[float, ...] = Field(..., description="Per-axis standard deviation")

    _coerce = validator('mean', 'stddev', pre=True, allow_reuse=True)(as_float_tuple)

    @root_validator(skip_on_failure=True)
    def check_shape(cls, values):
        mean, stddev = values['mean'], values['stddev']
        if len(mean) < 1 or len(mean) != len(stddev):
            raise ValueError("mean and stddev must share a dimension d >= 1")
        if any(not s > 0 for s in stddev):
            raise ValueError("every stddev entry must be > 0")
        return values

    @property
    def dim(self) -> int:
        return len(self.mean)

    class Config:
        schema_extra = {
            "example": {"weight": 0.2, "mean": [-2.0], "stddev": [0.4472135954999579]}
        }


class GaussianMixture(FrozenModel):
    """Weighted sum of axis-aligned Gaussian components sharing dimension d.

    Stored column-wise so that density evaluations vectorize over components:
    weights (K,), means (K, d), stddevs (K, d).
    """
    weights: np.ndarray
    means: np.ndarray
    stddevs: np.ndarray

    @validator('weights', pre=True)
    def parse_weights(cls, v) -> np.ndarray:
        arr = np.array(v, dtype=float).ravel()
        if arr.size == 0:
            raise ValueError("a mixture needs at least one component")
        if np.any(arr < 0) or np.any(arr > 1) or not np.all(np.isfinite(arr)):
            raise ValueError("component weights must lie in [0, 1]")
        return arr

    @validator('means', 'stddevs', pre=True)
    def parse_matrix(cls, v) -> np.ndarray:
        return frozen_array(v, ndim=2)

    @root_validator(skip_on_failure=True)
    def check_components(cls, values):
        weights, means, stddevs = values['weights'], values['means'], values['stddevs']
        if means.shape != stddevs.shape or means.shape[0] != weights.shape[0]:
            raise ValueError(
                f"inconsistent shapes: weights {weights.shape}, means {means.shape}, stddevs {stddevs.shape}"
            )
        if means.shape[1] < 1:
            raise ValueError("dimension must be >= 1")
        if np.any(stddevs <= 0):
            raise ValueError("every stddev entry must be > 0")

        total = float(np.sum(weights))
        deviation = abs(total - 1.0)
        if deviation > get_settings().WEIGHT_RENORM_TOL:
            raise ValueError(f"component weights sum to {total!r}, not 1")
        if deviation > 0:
            weights = weights / total
        weights.setflags(write=False)
        values['weights'] = weights
        return values

    @classmethod
    def from_components(cls, components: List[GaussianComponent]) -> "GaussianMixture":
        """Build a mixture from a list of component records"""
        if not components:
            raise ValueError("a mixture needs at least one component")
        dims = {c.dim for c in components}
        if len(dims) != 1:
            raise ValueError(f"components disagree on dimension: {sorted(dims)}")
        return cls(
            weights=[c.weight for c in components],
            means=[c.mean for c in components],
            stddevs=[c.stddev for c in components],
        )

    @classmethod
    def standard_normal(cls, dim: int = 1) -> "GaussianMixture":
        return cls(weights=[1.0], means=np.zeros((1, dim)), stddevs=np.ones((1, dim)))

    @property
    def dim(self) -> int:
        return int(self.means.shape[1])

    @property
    def n_components(self) -> int:
        return int(self.weights.shape[0])

    @property
    def components(self) -> List[GaussianComponent]:
        return [
            GaussianComponent(weight=float(w), mean=m, stddev=s)
            for w, m, s in zip(self.weights, self.means, self.stddevs)
        ]


class Ball(FrozenModel):
    """The event {x : ||x - center||^2 <= radius_sq}"""
    center: Tuple[float, ...] = Field(..., description="Representation point theta")
    radius_sq: float = Field(..., ge=0.0, description="Squared radius lambda")

    _coerce = validator('center', pre=True, allow_reuse=True)(as_float_tuple)

    @validator('center')
    def finite_center(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if not np.all(np.isfinite(v)):
            raise ValueError("ball center must be finite")
        return v

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def center_array(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)
