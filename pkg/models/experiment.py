from typing import Dict, List
from pydantic import Field, validator, root_validator

from core.config import get_settings
from .base import FrozenModel
from .mixture import GaussianMixture

class ExperimentSpec(FrozenModel):
    """Grid of (M, delta) cells for the data-driven design study"""
    true_model: GaussianMixture
    kappa_bar: float = Field(..., gt=0.0, lt=1.0)
    delta_list: List[float] = Field(..., description="Capacity back-off values")
    M_list: List[int] = Field(..., description="Batch sizes")
    batches_per_cell: int = Field(default_factory=lambda: get_settings().DEFAULT_BATCHES, ge=1)
    seed: int = Field(..., ge=0)
    theta_tol: float = Field(default_factory=lambda: get_settings().THETA_TOL, gt=0.0)
    lambda_tol: float = Field(default_factory=lambda: get_settings().LAMBDA_TOL, gt=0.0)

    @validator('delta_list', 'M_list')
    def non_empty(cls, v, field):
        if not v:
            raise ValueError(f"{field.name} must not be empty")
        return v

    @validator('M_list', each_item=True)
    def batch_size(cls, v: int) -> int:
        if v < 2:
            raise ValueError(f"batch size M={v} must be >= 2")
        return v

    @root_validator(skip_on_failure=True)
    def check_deltas(cls, values):
        kappa_bar = values['kappa_bar']
        for delta in values['delta_list']:
            if not 0.0 < delta < kappa_bar:
                raise ValueError(f"delta={delta} must lie in (0, kappa_bar={kappa_bar})")
        return values


class CellRecord(FrozenModel):
    """Aggregate over the B batches of one (M, delta) cell"""
    M: int
    delta: float
    delta_index: int
    batches: int
    completed: int
    failed: int = 0
    violation_freq: float = Field(..., ge=0.0, le=1.0)
    violation_stderr: float = Field(..., ge=0.0)
    nmse_mean: float
    nmse_std: float
    theory_rate: float
    max_design_residual: float
    nonconverged: int = 0
    true_transmit_probs: List[float] = Field(default_factory=list)
    true_nmse: List[float] = Field(default_factory=list)
    annotations: List[str] = Field(default_factory=list)


class TrendSummary(FrozenModel):
    """Monotonicity of violation_freq along each axis of the grid, up to one standard error"""
    nonincreasing_in_M: Dict[str, bool] = Field(default_factory=dict, description="delta -> bool")
    nonincreasing_in_delta: Dict[str, bool] = Field(default_factory=dict, description="M -> bool")


class ExperimentReport(FrozenModel):
    kappa_bar: float
    seed: int
    batches_per_cell: int
    dim: int
    cells: List[CellRecord]
    trends: TrendSummary

    def cell(self, M: int, delta: float) -> CellRecord:
        for record in self.cells:
            if record.M == M and record.delta == delta:
                return record
        raise KeyError((M, delta))
