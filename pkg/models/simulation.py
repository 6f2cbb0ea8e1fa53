import math
from pydantic import Field, root_validator

from .base import FrozenModel

def capacity_for(n: int, kappa_bar: float) -> int:
    """kappa(n) = ceil(kappa_bar * n), with kappa_bar * n rounded to 9 decimals first"""
    return int(math.ceil(round(kappa_bar * n, 9)))


class ChannelSpec(FrozenModel):
    """n sensors sharing a collision channel that carries at most `capacity` packets"""
    n: int = Field(..., ge=1, description="Number of sensors")
    kappa_bar: float = Field(..., ge=0.0, le=1.0, description="Asymptotic capacity fraction")
    capacity: int = Field(..., ge=0, description="kappa(n), transmissions per slot")

    @root_validator(pre=True)
    def derive_capacity(cls, values):
        if values.get('capacity') is None and values.get('n') is not None and values.get('kappa_bar') is not None:
            values['capacity'] = capacity_for(int(values['n']), float(values['kappa_bar']))
        return values

    @root_validator(skip_on_failure=True)
    def check_capacity(cls, values):
        if values['capacity'] > values['n']:
            raise ValueError(f"capacity {values['capacity']} exceeds n={values['n']}")
        return values

    @classmethod
    def from_kappa(cls, n: int, kappa_bar: float) -> "ChannelSpec":
        return cls(n=n, kappa_bar=kappa_bar)


class SimulationReport(FrozenModel):
    """Empirical NMSE and collision statistics of one finite-n run"""
    n: int
    capacity: int
    kappa_bar: float
    trials: int = Field(..., ge=1)
    seed: int
    nmse_mean: float
    nmse_half_width: float = Field(..., ge=0.0)
    collision_freq: float = Field(..., ge=0.0, le=1.0)
    collision_stderr: float = Field(..., ge=0.0)
    empirical_transmit_rate: float = Field(..., ge=0.0, le=1.0)
    transmit_rate_stderr: float = Field(..., ge=0.0)

    class Config:
        schema_extra = {
            "example": {
                "n": 10000,
                "capacity": 5000,
                "kappa_bar": 0.5,
                "trials": 200,
                "seed": 7,
                "nmse_mean": 0.34,
                "nmse_half_width": 0.0004,
                "collision_freq": 0.0,
                "collision_stderr": 0.0,
                "empirical_transmit_rate": 0.45,
                "transmit_rate_stderr": 0.00004
            }
        }


class CollisionPoint(FrozenModel):
    n: int
    capacity: int
    collision_freq: float = Field(..., ge=0.0, le=1.0)
    collision_stderr: float = Field(..., ge=0.0)
