"""
Ray parameterizations and source-geometry specifications.

Parallel rays are the canonical form every computation runs on; ``BeamSpec``
is the tagged union of all supported acquisition geometries in their native
parameters. Geometry tags double as the keywords of the ray-set text format.
"""
import math
from typing import Annotated, ClassVar, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator

HALF_PI = math.pi / 2
TWO_PI = 2 * math.pi


class ParallelRay2D(BaseModel):
    """Canonical 2D ray: signed offset ``s`` and angle ``phi`` in [0, pi)."""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    s: float
    phi: float = Field(..., ge=0.0, lt=math.pi)

    dim: ClassVar[int] = 2

    @property
    def theta(self) -> Tuple[float, float]:
        return (math.cos(self.phi), math.sin(self.phi))

    @property
    def theta_perp(self) -> Tuple[float, float]:
        return (-math.sin(self.phi), math.cos(self.phi))


class ParallelRay3D(BaseModel):
    """Canonical 3D ray: detector-plane offsets and Eulerian angles."""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    s1: float
    s2: float
    phi1: float = Field(..., ge=0.0, lt=TWO_PI)
    phi2: float = Field(..., ge=0.0, le=HALF_PI)

    dim: ClassVar[int] = 3


class _Beam(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False, extra="forbid")

    dim: ClassVar[int]


class Parallel2DBeam(_Beam):
    geometry: Literal["parallel2d"] = "parallel2d"
    s: float
    phi: float

    dim: ClassVar[int] = 2


class FanEquiangularBeam(_Beam):
    geometry: Literal["fan_equiangular"] = "fan_equiangular"
    D: float = Field(..., gt=0, description="Source distance from the origin")
    alpha: float = Field(..., description="Source angle from the positive y-axis")
    gamma: float = Field(..., gt=-HALF_PI, lt=HALF_PI, description="Ray angle from the center line")
    gamma_max: Optional[float] = Field(None, gt=0, lt=HALF_PI, description="Field half-angle")

    dim: ClassVar[int] = 2

    @model_validator(mode="after")
    def _within_field(self) -> "FanEquiangularBeam":
        if self.gamma_max is not None and abs(self.gamma) > self.gamma_max:
            raise ValueError(f"gamma={self.gamma} lies outside the field half-angle {self.gamma_max}")
        return self


class FanEquispacedBeam(_Beam):
    geometry: Literal["fan_equispaced"] = "fan_equispaced"
    D: float = Field(..., gt=0)
    alpha: float
    t: float = Field(..., description="Signed detector offset")
    t_max: Optional[float] = Field(None, gt=0, description="Field half-width")

    dim: ClassVar[int] = 2

    @model_validator(mode="after")
    def _within_field(self) -> "FanEquispacedBeam":
        if self.t_max is not None and abs(self.t) > self.t_max:
            raise ValueError(f"t={self.t} lies outside the field half-width {self.t_max}")
        return self


class Parallel3DBeam(_Beam):
    geometry: Literal["parallel3d"] = "parallel3d"
    s1: float
    s2: float
    phi1: float
    phi2: float

    dim: ClassVar[int] = 3


class ConeEquiangularBeam(_Beam):
    geometry: Literal["cone_equiangular"] = "cone_equiangular"
    D: float = Field(..., gt=0)
    phi1p: float = Field(..., description="Angle of the center line from the positive x-axis")
    alpha: float = Field(..., gt=-HALF_PI, lt=HALF_PI)
    beta: float = Field(..., gt=-HALF_PI, lt=HALF_PI)

    dim: ClassVar[int] = 3


class ConeEquispacedBeam(_Beam):
    geometry: Literal["cone_equispaced"] = "cone_equispaced"
    D: float = Field(..., gt=0)
    phi1p: float
    t: float
    h: float

    dim: ClassVar[int] = 3


class HelicalEquiangularBeam(_Beam):
    geometry: Literal["helical_equiangular"] = "helical_equiangular"
    D: float = Field(..., gt=0)
    phi1p: float
    alpha: float = Field(..., gt=-HALF_PI, lt=HALF_PI)
    beta: float = Field(..., gt=-HALF_PI, lt=HALF_PI)
    H: float = Field(..., description="Signed vertical source offset")

    dim: ClassVar[int] = 3


class HelicalEquispacedBeam(_Beam):
    geometry: Literal["helical_equispaced"] = "helical_equispaced"
    D: float = Field(..., gt=0)
    phi1p: float
    t: float
    h: float
    H: float = Field(..., description="Signed vertical source offset")

    dim: ClassVar[int] = 3


BeamSpec = Annotated[
    Union[
        Parallel2DBeam,
        FanEquiangularBeam,
        FanEquispacedBeam,
        Parallel3DBeam,
        ConeEquiangularBeam,
        ConeEquispacedBeam,
        HelicalEquiangularBeam,
        HelicalEquispacedBeam,
    ],
    Field(discriminator="geometry"),
]

beam_adapter: TypeAdapter = TypeAdapter(BeamSpec)

GEOMETRY_TAGS = (
    "parallel2d",
    "fan_equiangular",
    "fan_equispaced",
    "parallel3d",
    "cone_equiangular",
    "cone_equispaced",
    "helical_equiangular",
    "helical_equispaced",
)

ANGLE_KEYS = frozenset({"phi", "phi1", "phi2", "phi1p", "alpha", "beta", "gamma", "gamma_max"})
