from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.enums import DifferenceScheme


class GridSpec(BaseModel):
    """Uniform position grid times K velocity Hermite modes at temperature h"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    x_min: float
    x_max: float
    N: int = Field(..., ge=16, description="Number of uniform position nodes")
    K: int = Field(..., ge=4, description="Number of velocity Hermite modes")
    h: float = Field(..., gt=0, le=1, description="Semiclassical parameter")
    scheme: DifferenceScheme = DifferenceScheme.fourier

    @model_validator(mode="after")
    def check_interval(self) -> 'GridSpec':
        if not self.x_min < self.x_max:
            raise ValueError(f"x_min must be below x_max, got [{self.x_min}, {self.x_max}]")
        return self

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.N - 1)

    @property
    def positions(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.N)

    @property
    def size(self) -> int:
        return self.N * self.K

    def refined(self, factor: int = 2) -> 'GridSpec':
        return self.model_copy(update={'N': self.N * factor})


class CutoffSpec(BaseModel):
    """Smoothstep cutoffs around each minimum, chi = 1 on |x - m| <= r and 0 beyond r + w"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    radius_factor: float = Field(0.5, gt=0, description="r as a fraction of the distance to the nearest critical point")
    width_factor: float = Field(0.5, gt=0, description="w as a fraction of r")
    radii: Optional[List[float]] = Field(None, description="Explicit inner radii, one per minimum")
