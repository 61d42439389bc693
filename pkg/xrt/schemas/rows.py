"""
Sparse rows of intersection lengths.

A ``SparseRow`` holds one row of the projection matrix: the flat indices of
the units a ray crosses, strictly increasing, and the matching lengths.
"""
from dataclasses import dataclass, field
from typing import Dict, Iterator, NamedTuple

import numpy as np

from xrt.core.exceptions import ValidationError


class IntersectionRecord(NamedTuple):
    flat_index: int
    length: float


@dataclass(frozen=True)
class SparseRow:
    """One ray's intersection records, sorted by flat index."""

    indices: np.ndarray
    lengths: np.ndarray

    def __post_init__(self):
        indices = np.ascontiguousarray(self.indices, dtype=np.int64).reshape(-1)
        lengths = np.ascontiguousarray(self.lengths, dtype=np.float64).reshape(-1)
        if indices.shape != lengths.shape:
            raise ValidationError(
                f"row has {indices.size} indices but {lengths.size} lengths",
                field="lengths",
            )
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "lengths", lengths)

    @classmethod
    def empty(cls) -> "SparseRow":
        return cls(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64))

    def __len__(self) -> int:
        return int(self.indices.size)

    def __iter__(self) -> Iterator[IntersectionRecord]:
        return self.records()

    def records(self) -> Iterator[IntersectionRecord]:
        for index, length in zip(self.indices.tolist(), self.lengths.tolist()):
            yield IntersectionRecord(index, length)

    def validate(self, n_cols: int) -> "SparseRow":
        """Check ordering, range and positivity against a column count."""
        if self.indices.size == 0:
            return self
        if self.indices[0] < 0 or self.indices[-1] >= n_cols:
            raise ValidationError(f"row index outside [0, {n_cols})", field="indices")
        if np.any(np.diff(self.indices) <= 0):
            raise ValidationError("row indices must be strictly increasing", field="indices")
        if not np.all(np.isfinite(self.lengths)) or np.any(self.lengths <= 0.0):
            raise ValidationError("row lengths must be finite and positive", field="lengths")
        return self

    def scaled(self, factor: float) -> "SparseRow":
        if factor == 1.0:
            return self
        return SparseRow(self.indices, self.lengths * factor)

    def total_length(self) -> float:
        return float(np.sum(self.lengths))

    def as_dict(self) -> Dict[int, float]:
        return dict(zip(self.indices.tolist(), self.lengths.tolist()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseRow):
            return NotImplemented
        return np.array_equal(self.indices, other.indices) and np.array_equal(self.lengths, other.lengths)

    __hash__ = None  # type: ignore[assignment]


@dataclass
class WorkCounter:
    """Counts unit candidates examined by the tracing kernel."""

    candidates: int = 0
    rows: int = 0
    per_row: list = field(default_factory=list)

    def start_row(self) -> None:
        self.rows += 1
        self.per_row.append(0)

    def add(self, count: int = 1) -> None:
        self.candidates += count
        if self.per_row:
            self.per_row[-1] += count

    @property
    def max_per_row(self) -> int:
        return max(self.per_row, default=0)

    @property
    def mean_per_row(self) -> float:
        return self.candidates / self.rows if self.rows else 0.0
