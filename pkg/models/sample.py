from typing import Optional, Tuple
import numpy as np
from pydantic import Field, validator

from .base import FrozenModel, as_float_tuple, frozen_array

class SampleBatch(FrozenModel):
    """M observations in R^d plus where they came from"""
    samples: np.ndarray = Field(..., description="Array of shape (M, d)")
    seed: Optional[int] = Field(default=None, description="Seed the batch was drawn with, if any")
    source: str = Field(default="", description="Free-text provenance")

    @validator('samples', pre=True)
    def parse_samples(cls, v) -> np.ndarray:
        arr = frozen_array(v, ndim=2)
        if arr.shape[0] < 2:
            raise ValueError(f"a sample batch needs M >= 2 observations, got {arr.shape[0]}")
        if arr.shape[1] < 1:
            raise ValueError("samples must have dimension d >= 1")
        return arr

    @property
    def size(self) -> int:
        return int(self.samples.shape[0])

    @property
    def dim(self) -> int:
        return int(self.samples.shape[1])


class BandwidthReport(FrozenModel):
    """Per-axis rule-of-thumb bandwidth and the statistics behind it"""
    per_axis_h: Tuple[float, ...]
    per_axis_s: Tuple[float, ...]
    per_axis_Q: Tuple[float, ...]
    sample_size: int = Field(..., ge=2)

    _coerce = validator('per_axis_h', 'per_axis_s', 'per_axis_Q', pre=True, allow_reuse=True)(as_float_tuple)

    @validator('per_axis_h')
    def positive_bandwidth(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(not h > 0 for h in v):
            raise ValueError("every bandwidth must be > 0")
        return v

    class Config:
        schema_extra = {
            "example": {
                "per_axis_h": [0.6886],
                "per_axis_s": [1.4142],
                "per_axis_Q": [1.0],
                "sample_size": 2
            }
        }
