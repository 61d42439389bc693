"""
Row timing and work counting.

Candidate counts come from a ``WorkCounter`` passed through the kernel; the
timed pass runs without one.
"""
import statistics
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import psutil

from xrt.core.exceptions import ValidationError
from xrt.core.logging import get_logger, log_performance_metric
from xrt.schemas.grid import ImageGrid
from xrt.schemas.rows import WorkCounter
from xrt.services.geometry import beam_from_ray
from xrt.services.oracle import oracle_row, sample_canonical_rays
from xrt.services.projector import intersect_row, project_rows

logger = get_logger("perfbench")

CANDIDATE_FACTOR = {2: 4, 3: 8}


@dataclass
class BenchReport:
    dim: int
    n: int
    ray_count: int
    median_ns: float
    mean_candidates: float
    max_candidates: int
    oracle_median_ns: Optional[float] = None
    rows_per_sec: Dict[int, float] = field(default_factory=dict)

    @property
    def candidate_bound(self) -> int:
        return CANDIDATE_FACTOR[self.dim] * self.n

    @property
    def oracle_boxes(self) -> int:
        return self.n ** self.dim

    @property
    def within_bound(self) -> bool:
        return self.max_candidates <= self.candidate_bound


def bench_row(
    dim: int,
    n: int,
    ray_count: int,
    seed: int = 0,
    include_oracle: bool = False,
    workers: Sequence[int] = (),
) -> BenchReport:
    """
    Time canonical rows on an N^dim grid and count the units they examine.

    Args:
        dim: 2 or 3
        n: Units per axis
        ray_count: Random rays to sample
        seed: Sampling seed
        include_oracle: Also time the brute-force reference
        workers: Worker counts for the rows/sec scaling check
    """
    if dim not in CANDIDATE_FACTOR:
        raise ValidationError(f"dim must be 2 or 3, got {dim}", field="dim")
    if n < 1 or ray_count < 1:
        raise ValidationError("grid size and ray count must be at least 1", field="n")

    grid = ImageGrid(nx=n, ny=n, nz=n if dim == 3 else None)
    rays = sample_canonical_rays(dim, grid, ray_count, np.random.default_rng(seed), special_every=0)

    counter = WorkCounter()
    for ray in rays:
        intersect_row(ray, grid, counter)

    timings: List[int] = []
    for ray in rays:
        start = time.perf_counter_ns()
        intersect_row(ray, grid)
        timings.append(time.perf_counter_ns() - start)

    report = BenchReport(
        dim=dim,
        n=n,
        ray_count=ray_count,
        median_ns=float(statistics.median(timings)),
        mean_candidates=counter.mean_per_row,
        max_candidates=counter.max_per_row,
    )

    if include_oracle:
        oracle_timings = []
        for ray in rays:
            start = time.perf_counter_ns()
            oracle_row(ray, grid)
            oracle_timings.append(time.perf_counter_ns() - start)
        report.oracle_median_ns = float(statistics.median(oracle_timings))

    beams = [beam_from_ray(ray) for ray in rays]
    for count in workers:
        start = time.perf_counter()
        project_rows(beams, grid, threads=count)
        elapsed = time.perf_counter() - start
        report.rows_per_sec[count] = ray_count / elapsed if elapsed > 0 else float("inf")

    log_performance_metric(
        "row_median", report.median_ns / 1e6, "ms", dim=dim, n=n, mean_candidates=report.mean_candidates
    )
    return report


def format_report(reports: Sequence[BenchReport]) -> str:
    """Plain-text table, one line per benchmarked grid."""
    worker_counts = sorted({count for report in reports for count in report.rows_per_sec})
    header = ["dim", "N", "rays", "median_us", "mean_cand", "max_cand", "bound", "oracle_us", "boxes"]
    header += [f"rows/s@{count}" for count in worker_counts]
    lines = [f"# cpus={psutil.cpu_count(logical=True)}", "  ".join(header)]
    for report in reports:
        oracle = f"{report.oracle_median_ns / 1e3:.1f}" if report.oracle_median_ns is not None else "-"
        cells = [
            str(report.dim),
            str(report.n),
            str(report.ray_count),
            f"{report.median_ns / 1e3:.1f}",
            f"{report.mean_candidates:.1f}",
            str(report.max_candidates),
            str(report.candidate_bound),
            oracle,
            str(report.oracle_boxes) if report.oracle_median_ns is not None else "-",
        ]
        cells += [f"{report.rows_per_sec.get(count, float('nan')):.0f}" for count in worker_counts]
        lines.append("  ".join(cells))
    return "\n".join(lines)
