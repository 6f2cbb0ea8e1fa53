from typing import Any, Tuple
import math
import numpy as np
from pydantic import BaseModel

def as_float_tuple(v: Any) -> Tuple[float, ...]:
    """Coerce scalars, sequences and numpy arrays into a flat tuple of floats"""
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.ndim != 1:
        raise ValueError(f"expected a vector, got shape {arr.shape}")
    return tuple(float(x) for x in arr)

def frozen_array(v: Any, ndim: int) -> np.ndarray:
    """Copy v into a read-only float array with the requested number of axes"""
    arr = np.array(v, dtype=float)
    if ndim == 2 and arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != ndim:
        raise ValueError(f"expected {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("array contains non-finite entries")
    arr.setflags(write=False)
    return arr

def round_trip_float(x: float) -> str:
    """Shortest decimal that parses back to the same IEEE-754 double"""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)

class FrozenModel(BaseModel):
    """Base model for immutable domain values"""
    class Config:
        allow_mutation = False
        arbitrary_types_allowed = True
        allow_population_by_field_name = True
        json_encoders = {
            np.ndarray: lambda a: a.tolist(),
            np.floating: float,
            np.integer: int,
        }
