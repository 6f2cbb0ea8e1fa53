from typing import List, Optional
import math
from pydantic import BaseModel, Field, validator, root_validator

from models.experiment import ExperimentSpec
from models.mixture import GaussianMixture
from models.policy import Policy, SolverConfig

class ComponentEntry(BaseModel):
    """One component as written in a model file; exactly one of variance or stddev"""
    weight: float = Field(..., ge=0.0, le=1.0)
    mean: List[float]
    variance: Optional[List[float]] = None
    stddev: Optional[List[float]] = None

    @root_validator(skip_on_failure=True)
    def check_spread(cls, values):
        variance, stddev = values.get('variance'), values.get('stddev')
        if (variance is None) == (stddev is None):
            raise ValueError("give exactly one of 'variance' or 'stddev'")
        spread = variance if variance is not None else stddev
        if len(spread) != len(values['mean']):
            raise ValueError("mean and variance/stddev lengths differ")
        if any(not (s > 0 and math.isfinite(s)) for s in spread):
            raise ValueError("variance/stddev entries must be finite and > 0")
        return values

    def stddev_vector(self) -> List[float]:
        if self.stddev is not None:
            return list(self.stddev)
        return [math.sqrt(v) for v in self.variance]


class MixtureFile(BaseModel):
    dim: int = Field(..., ge=1)
    components: List[ComponentEntry]

    @validator('components')
    def check_components(cls, v, values):
        if not v:
            raise ValueError("a model file needs at least one component")
        dim = values.get('dim')
        for i, component in enumerate(v):
            if dim is not None and len(component.mean) != dim:
                raise ValueError(f"component {i} has dimension {len(component.mean)}, file declares {dim}")
        return v

    def to_model(self) -> GaussianMixture:
        return GaussianMixture(
            weights=[c.weight for c in self.components],
            means=[c.mean for c in self.components],
            stddevs=[c.stddev_vector() for c in self.components],
        )

    @classmethod
    def from_model(cls, model: GaussianMixture) -> "MixtureFile":
        return cls(
            dim=model.dim,
            components=[
                ComponentEntry(weight=float(w), mean=m.tolist(), variance=(s * s).tolist())
                for w, m, s in zip(model.weights, model.means, model.stddevs)
            ],
        )

    class Config:
        schema_extra = {
            "example": {
                "dim": 1,
                "components": [
                    {"weight": 0.5, "mean": [-1.0], "variance": [1.0]},
                    {"weight": 0.5, "mean": [1.0], "variance": [1.0]}
                ]
            }
        }


class PolicyFile(BaseModel):
    theta: List[float]
    lambda_: float = Field(..., alias="lambda", ge=0.0)
    kappa_bar: float = Field(..., gt=0.0, lt=1.0)
    delta: float = Field(default=0.0, ge=0.0)

    class Config:
        allow_population_by_field_name = True

    def to_policy(self) -> Policy:
        return Policy(theta=self.theta, lambda_=self.lambda_)

    @classmethod
    def from_policy(cls, policy: Policy, config: SolverConfig) -> "PolicyFile":
        return cls(theta=list(policy.theta), lambda_=policy.lambda_, kappa_bar=config.kappa_bar, delta=config.delta)


class ExperimentSpecFile(BaseModel):
    true_model: MixtureFile
    kappa_bar: float
    delta_list: List[float]
    M_list: List[int]
    batches_per_cell: Optional[int] = None
    seed: int
    theta_tol: Optional[float] = None
    lambda_tol: Optional[float] = None

    def to_spec(self) -> ExperimentSpec:
        # unset optional keys fall back to settings defaults
        fields = self.dict(exclude={'true_model'}, exclude_none=True)
        return ExperimentSpec(true_model=self.true_model.to_model(), **fields)
