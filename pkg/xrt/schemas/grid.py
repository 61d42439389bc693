from typing import Any, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ImageGrid(BaseModel):
    """
    Pixel/voxel grid: unit counts per axis, a uniform physical side length
    and the physical position of the grid's geometric center.
    """
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    nx: int = Field(..., ge=1, description="Units along x")
    ny: int = Field(..., ge=1, description="Units along y")
    nz: Optional[int] = Field(None, ge=1, description="Units along z (3D grids only)")
    scale: float = Field(1.0, gt=0, description="Physical side length of one unit")
    center: Tuple[float, ...] = Field((), description="Physical coordinates of the grid center")

    @model_validator(mode="before")
    @classmethod
    def _default_center(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        center = data.get("center")
        if center is None or (hasattr(center, "__len__") and len(center) == 0):
            dim = 2 if data.get("nz") is None else 3
            data = {**data, "center": (0.0,) * dim}
        elif not isinstance(center, (tuple, str, bytes)) and hasattr(center, "__iter__"):
            # arrays and lists become plain tuples
            data = {**data, "center": tuple(center)}
        return data

    @model_validator(mode="after")
    def _check_center(self) -> "ImageGrid":
        if len(self.center) != self.dim:
            raise ValueError(f"center must have {self.dim} components, got {len(self.center)}")
        return self

    @property
    def dim(self) -> int:
        return 2 if self.nz is None else 3

    @property
    def shape(self) -> Tuple[int, ...]:
        """Array shape in flat-index order (slowest axis first)."""
        if self.nz is None:
            return (self.ny, self.nx)
        return (self.nz, self.ny, self.nx)

    @property
    def size(self) -> int:
        """Total unit count; the length of any image on this grid."""
        total = self.nx * self.ny
        return total * self.nz if self.nz is not None else total

    @property
    def is_centered(self) -> bool:
        return all(component == 0.0 for component in self.center)

    def __str__(self) -> str:
        counts = "x".join(str(n) for n in (self.nx, self.ny, self.nz) if n is not None)
        return f"ImageGrid({counts}, scale={self.scale:g})"


class UnitIndex2D(BaseModel):
    """Pixel index in (j, i) form."""
    model_config = ConfigDict(frozen=True)

    j: int
    i: int


class UnitIndex3D(BaseModel):
    """Voxel index in (k, j, i) form."""
    model_config = ConfigDict(frozen=True)

    k: int
    j: int
    i: int
