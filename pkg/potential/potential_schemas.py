from typing import Any, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.enums import PotentialKind

DEFAULT_TILT = 0.2

# Ascending-degree coefficients of the presets (dimensionless energy units)
PRESET_COEFFICIENTS = {
    PotentialKind.harmonic: [0.0, 0.0, 0.5],
    PotentialKind.double_well: [0.25, 0.0, -0.5, 0.0, 0.25],
}


class PotentialSpec(BaseModel):
    """Confining even-degree polynomial potential V (d = 1)"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: PotentialKind = PotentialKind.polynomial
    coefficients: List[float] = Field(default_factory=list, description="Polynomial coefficients, ascending degree")
    dimension: int = Field(1, ge=1, le=1, description="Spatial dimension, only d = 1 is implemented")
    tilt: Optional[float] = Field(None, description="Linear tilt of the tilted_double_well preset")

    @model_validator(mode="before")
    @classmethod
    def fill_preset_coefficients(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        kind = PotentialKind(data.get('kind', PotentialKind.polynomial))
        if not data.get('coefficients'):
            if kind == PotentialKind.tilted_double_well:
                tilt = data.get('tilt')
                tilt = DEFAULT_TILT if tilt is None else tilt
                data['tilt'] = tilt
                data['coefficients'] = [0.25, tilt, -0.5, 0.0, 0.25]
            elif kind in PRESET_COEFFICIENTS:
                data['coefficients'] = list(PRESET_COEFFICIENTS[kind])
        coefficients = [float(c) for c in data.get('coefficients') or []]
        while coefficients and coefficients[-1] == 0.0:
            coefficients.pop()
        data['coefficients'] = coefficients
        return data

    @model_validator(mode="after")
    def check_confinement(self) -> 'PotentialSpec':
        degree = len(self.coefficients) - 1
        if degree < 2 or degree % 2 != 0:
            raise ValueError(f"polynomial degree must be even and >= 2, got {degree}")
        if self.coefficients[-1] <= 0:
            raise ValueError("leading coefficient must be positive")
        if self.tilt is not None and self.kind != PotentialKind.tilted_double_well:
            raise ValueError("tilt is only accepted for the tilted_double_well preset")
        return self

    @classmethod
    def preset(cls, kind, tilt: Optional[float] = None) -> 'PotentialSpec':
        """Build one of the named presets"""
        data = {'kind': PotentialKind(kind)}
        if tilt is not None:
            data['tilt'] = tilt
        return cls(**data)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_even(self) -> bool:
        """True when V(-x) = V(x)"""
        return all(c == 0.0 for c in self.coefficients[1::2])
