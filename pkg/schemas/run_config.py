from enum import Enum
from pathlib import Path
from typing import List, Optional
from pydantic import BaseModel, Field, FilePath, validator

from models.policy import SolverConfig, UpdateRule

class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class SolverOptions(BaseModel):
    """Solver flags shared by solve and design"""
    kappa_bar: float = Field(..., gt=0.0, lt=1.0)
    delta: float = Field(default=0.0, ge=0.0)
    theta_init: List[List[float]] = Field(default_factory=list, description="Initial thetas, one solve each")
    rule: UpdateRule = UpdateRule.CCP
    theta_tol: Optional[float] = Field(default=None, gt=0.0)
    lambda_tol: Optional[float] = Field(default=None, gt=0.0)
    max_inner: Optional[int] = Field(default=None, ge=1)
    max_outer: Optional[int] = Field(default=None, ge=1)

    def solver_config(self) -> SolverConfig:
        overrides = {
            'theta_tol': self.theta_tol,
            'lambda_tol': self.lambda_tol,
            'max_inner_iters': self.max_inner,
            'max_outer_iters': self.max_outer,
        }
        return SolverConfig(
            kappa_bar=self.kappa_bar,
            delta=self.delta,
            update_rule=self.rule,
            **{k: v for k, v in overrides.items() if v is not None},
        )


class SolveRun(SolverOptions):
    model_path: FilePath
    out_dir: Path


class FitRun(BaseModel):
    samples_path: FilePath
    out_dir: Path


class DesignRun(SolverOptions):
    samples_path: FilePath
    out_dir: Path


class SimulateRun(BaseModel):
    model_path: FilePath
    policy_path: FilePath
    n_list: List[int] = Field(..., description="Sensor counts, one report row each")
    kappa_bar: Optional[float] = Field(default=None, ge=0.0, le=1.0, description="Defaults to the policy file's kappa_bar")
    trials: int = Field(..., ge=1)
    seed: int = Field(..., ge=0)
    out_dir: Path
    format: OutputFormat = OutputFormat.CSV

    @validator('n_list')
    def check_n(cls, v: List[int]) -> List[int]:
        if not v or any(n < 1 for n in v):
            raise ValueError("every --n must be >= 1")
        return v


class ExperimentRun(BaseModel):
    spec_path: FilePath
    out_dir: Path
