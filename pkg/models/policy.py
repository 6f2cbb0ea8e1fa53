from enum import Enum
from typing import List, Optional, Tuple
import numpy as np
from pydantic import Field, validator, root_validator

from core.config import get_settings
from .base import FrozenModel, as_float_tuple

class UpdateRule(str, Enum):
    """Inner-loop recursion used by the policy solver"""
    CCP = "ccp"
    KAPPA_SHIFT = "kappa_shift"


class Policy(FrozenModel):
    """Threshold transmit rule: transmit iff ||x - theta||^2 > lambda"""
    theta: Tuple[float, ...] = Field(..., description="Estimate used for silent sensors")
    lambda_: float = Field(..., alias="lambda", ge=0.0, description="Squared-distance threshold")

    _coerce = validator('theta', pre=True, allow_reuse=True)(as_float_tuple)

    @validator('theta')
    def finite_theta(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if not np.all(np.isfinite(v)):
            raise ValueError("theta must be finite")
        return v

    @property
    def dim(self) -> int:
        return len(self.theta)

    @property
    def theta_array(self) -> np.ndarray:
        return np.asarray(self.theta, dtype=float)


class SolverConfig(FrozenModel):
    """Capacity target and numerical controls for the policy solver"""
    kappa_bar: float = Field(..., gt=0.0, lt=1.0, description="Asymptotic channel capacity")
    delta: float = Field(default=0.0, ge=0.0, description="Capacity back-off")
    theta_tol: float = Field(default_factory=lambda: get_settings().THETA_TOL, gt=0.0)
    lambda_tol: float = Field(default_factory=lambda: get_settings().LAMBDA_TOL, gt=0.0)
    max_inner_iters: int = Field(default_factory=lambda: get_settings().MAX_INNER_ITERS, ge=1)
    max_outer_iters: int = Field(default_factory=lambda: get_settings().MAX_OUTER_ITERS, ge=1)
    update_rule: UpdateRule = Field(default=UpdateRule.CCP)
    record_inner: bool = Field(default=True, description="Keep per-iteration inner traces")

    @root_validator(skip_on_failure=True)
    def check_backoff(cls, values):
        if not values['delta'] < values['kappa_bar']:
            raise ValueError(f"delta={values['delta']} must be smaller than kappa_bar={values['kappa_bar']}")
        return values

    @property
    def design_kappa(self) -> float:
        """Transmit probability the policy is designed for"""
        return self.kappa_bar - self.delta


class InnerTrace(FrozenModel):
    """Iterates of one inner run at a fixed threshold"""
    lambda_: float = Field(..., alias="lambda")
    thetas: List[Tuple[float, ...]] = Field(default_factory=list)
    lagrangian: List[float] = Field(default_factory=list)
    converged: bool = False
    iterations: int = 0


class OuterRecord(FrozenModel):
    """State after one outer alternation"""
    iteration: int
    theta: Tuple[float, ...]
    lambda_: float = Field(..., alias="lambda")
    objective: float
    constraint_residual: float
    inner_iterations: int = 0

    _coerce = validator('theta', pre=True, allow_reuse=True)(as_float_tuple)


class SolveTrace(FrozenModel):
    records: List[OuterRecord] = Field(default_factory=list)
    inner: List[InnerTrace] = Field(default_factory=list)
    converged: bool = False
    inner_converged: bool = True
    outer_iterations: int = 0
    inner_iterations: int = 0
    update_rule: UpdateRule = UpdateRule.CCP
    theta_init: Optional[Tuple[float, ...]] = None
    interleaved_from: Optional[int] = Field(default=None, description="Outer iteration where single-step updates took over")

    @validator('theta_init', pre=True)
    def coerce_init(cls, v):
        return None if v is None else as_float_tuple(v)
