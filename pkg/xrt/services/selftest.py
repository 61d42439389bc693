"""
Built-in acceptance checks.

Five golden suites compare single rays against tabulated lengths (six
significant digits) and against their closed forms; a reduced oracle sweep
compares random rays against the brute-force clipping reference.
"""
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from xrt.core.config import Settings, get_settings
from xrt.core.exceptions import SelftestFailure
from xrt.core.logging import LoggingContext, get_logger
from xrt.schemas.beams import (
    BeamSpec,
    ConeEquiangularBeam,
    FanEquiangularBeam,
    HelicalEquiangularBeam,
    Parallel2DBeam,
    Parallel3DBeam,
)
from xrt.schemas.grid import ImageGrid
from xrt.schemas.rows import SparseRow
from xrt.services.geometry import beam_from_ray
from xrt.services.oracle import apply_tie_break, compare_rows, oracle_row, sample_canonical_rays
from xrt.services.projector import compute_row

logger = get_logger("selftest")

RowFunction = Callable[[BeamSpec, ImageGrid], SparseRow]

TABLE_TOLERANCE = 5e-6
CLOSED_FORM_TOLERANCE = 1e-10
ORACLE_TOLERANCE = 1e-9

ORACLE_GRIDS_2D = (1, 2, 3, 5, 8, 17, 32)
ORACLE_GRIDS_3D = (1, 2, 3, 4, 8, 16)


@dataclass(frozen=True)
class GoldenSuite:
    name: str
    grid: ImageGrid
    beam: BeamSpec
    table: Dict[int, float]
    closed_form: Dict[int, float]


def _cone_closed_forms() -> Tuple[Dict[int, float], Dict[int, float]]:
    r2, r3 = math.sqrt(2.0), math.sqrt(3.0)
    tan12, sin12, cos12 = math.tan(math.pi / 12), math.sin(math.pi / 12), math.cos(math.pi / 12)
    ratio = math.sin(5 * math.pi / 12) / math.sin(math.pi / 3)
    reach = (4 - r2) * tan12 * ratio
    face = 2 * r3 / (3 * cos12)
    corner = (0.5 - (4 * r2 - 4) * tan12) / sin12

    cone = {
        1: face,
        5: (((4 - r2) * (r2 - 2 * tan12 * ratio) + 4 * r3 / 3) * tan12 - 1) / sin12,
        20: 2 * (reach - r3 / 3) / cos12,
        21: (1 - (4 * r2 - 2) * tan12) / sin12,
        24: face,
        28: 2 * (1 - reach) / cos12,
    }
    helical = {
        1: face,
        4: 2 * (reach - r3 / 3) / cos12,
        5: (2 - (8 - 2 * r2) * tan12 * math.sin(5 * math.pi / 12)) / (math.cos(math.pi / 6) * cos12),
        8: face,
        12: 2 * (1 - reach) / cos12 - corner,
        28: corner,
    }
    return cone, helical


def golden_suites() -> Tuple[GoldenSuite, ...]:
    r2, r3 = math.sqrt(2.0), math.sqrt(3.0)
    cone, helical = _cone_closed_forms()
    cone_params = dict(D=4.0, phi1p=math.pi / 4, alpha=math.pi / 12, beta=math.pi / 12)
    return (
        GoldenSuite(
            "table 1",
            ImageGrid(nx=3, ny=3),
            Parallel2DBeam(s=1.0, phi=math.pi / 4),
            {0: 0.585787, 1: 0.828427, 3: 0.828427},
            {0: 2 - r2, 1: 2 * r2 - 2, 3: 2 * r2 - 2},
        ),
        GoldenSuite(
            "table 2",
            ImageGrid(nx=4, ny=4),
            FanEquiangularBeam(D=4.0, alpha=math.pi / 2, gamma=-math.pi / 6),
            {12: 1.1547, 13: 0.535899},
            {12: 2 * r3 / 3, 13: 4 - 2 * r3},
        ),
        GoldenSuite(
            "table 3",
            ImageGrid(nx=3, ny=3, nz=3),
            Parallel3DBeam(s1=0.0, s2=0.0, phi1=math.pi / 4, phi2=math.pi / 4),
            {2: 1.12132, 4: 0.292893, 13: 1.41421, 22: 0.292893, 24: 1.12132},
            {2: 3 * r2 / 2 - 1, 4: 1 - r2 / 2, 13: r2, 22: 1 - r2 / 2, 24: 3 * r2 / 2 - 1},
        ),
        GoldenSuite(
            "table 4",
            ImageGrid(nx=4, ny=4, nz=4),
            ConeEquiangularBeam(**cone_params),
            {1: 1.19543, 5: 0.712929, 20: 0.404656, 21: 0.0778492, 24: 1.19543, 28: 0.470462},
            cone,
        ),
        GoldenSuite(
            "table 5",
            ImageGrid(nx=4, ny=4, nz=4),
            HelicalEquiangularBeam(**cone_params, H=0.5),
            {1: 1.19543, 4: 0.404656, 5: 0.790778, 8: 1.19543, 12: 0.253912, 28: 0.21655},
            helical,
        ),
    )


@dataclass
class SelftestReport:
    suites_passed: int = 0
    suites_total: int = 0
    oracle_rays: int = 0

    @property
    def summary(self) -> str:
        return f"{self.suites_passed}/{self.suites_total} golden suites, oracle sweep OK"


def check_golden_suite(suite: GoldenSuite, row_fn: RowFunction = compute_row) -> SparseRow:
    """Raise SelftestFailure unless the suite's ray reproduces its table."""
    row = row_fn(suite.beam, suite.grid)
    found = row.as_dict()
    if set(found) != set(suite.table):
        raise SelftestFailure(
            suite.name,
            f"indices {sorted(found)} differ from expected {sorted(suite.table)}",
        )
    for index, printed in suite.table.items():
        if abs(found[index] - printed) > TABLE_TOLERANCE:
            raise SelftestFailure(suite.name, f"index {index}: {found[index]:.6g} vs tabulated {printed}")
        exact = suite.closed_form[index]
        if abs(found[index] - exact) > CLOSED_FORM_TOLERANCE:
            raise SelftestFailure(suite.name, f"index {index}: {found[index]!r} vs closed form {exact!r}")
    return row


def check_helical_degeneracy(row_fn: RowFunction = compute_row) -> None:
    cone_suite = golden_suites()[3]
    flat = HelicalEquiangularBeam(**cone_suite.beam.model_dump(exclude={"geometry"}), H=0.0)
    if row_fn(flat, cone_suite.grid) != row_fn(cone_suite.beam, cone_suite.grid):
        raise SelftestFailure("table 5", "helical row with H=0 differs from the circular cone row")


def oracle_sweep(ray_count: int, seed: int, row_fn: RowFunction = compute_row) -> int:
    """Compare ``ray_count`` random rays per dimension against the oracle; returns rays checked."""
    rng = np.random.default_rng(seed)
    checked = 0
    for dim, sizes in ((2, ORACLE_GRIDS_2D), (3, ORACLE_GRIDS_3D)):
        per_grid = max(1, ray_count // len(sizes))
        for n in sizes:
            grid = ImageGrid(nx=n, ny=n, nz=n if dim == 3 else None)
            for ray in sample_canonical_rays(dim, grid, per_grid, rng):
                row = row_fn(beam_from_ray(ray), grid)
                reference = apply_tie_break(oracle_row(ray, grid), ray, grid)
                problem = compare_rows(row, reference, ORACLE_TOLERANCE)
                if problem is not None:
                    raise SelftestFailure("oracle sweep", f"{dim}D N={n} ray {ray!r}: {problem}")
                checked += 1
    return checked


def run_selftest(
    current: Optional[Settings] = None,
    row_fn: RowFunction = compute_row,
    oracle_rays: Optional[int] = None,
    seed: Optional[int] = None,
) -> SelftestReport:
    """
    Run every golden suite and the oracle sweep.

    Raises:
        SelftestFailure: Naming the first failing suite
    """
    current = current or get_settings()
    oracle_rays = current.SELFTEST_ORACLE_RAYS if oracle_rays is None else oracle_rays
    seed = current.SELFTEST_SEED if seed is None else seed

    report = SelftestReport()
    suites = golden_suites()
    report.suites_total = len(suites)
    with LoggingContext("selftest", logger, oracle_rays=oracle_rays, seed=seed):
        for suite in suites:
            check_golden_suite(suite, row_fn)
            if suite.name == "table 5":
                check_helical_degeneracy(row_fn)
            report.suites_passed += 1
            logger.info("Golden suite passed", extra={"suite": suite.name})
        report.oracle_rays = oracle_sweep(oracle_rays, seed, row_fn)
    return report
