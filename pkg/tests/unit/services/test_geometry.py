"""
Unit tests for canonicalization and the source-geometry transforms.
"""
import math

import numpy as np
import pytest

from xrt.core.exceptions import ValidationError
from xrt.schemas.beams import (
    ConeEquispacedBeam,
    FanEquispacedBeam,
    HelicalEquiangularBeam,
    HelicalEquispacedBeam,
    Parallel2DBeam,
    ParallelRay2D,
    ParallelRay3D,
)
from xrt.schemas.grid import ImageGrid
from xrt.services.geometry import (
    beam_from_ray,
    beam_to_parallel,
    canonicalize,
    canonicalize_2d,
    canonicalize_3d,
    cone_equiangular_to_parallel,
    cone_equispaced_to_parallel,
    direction_basis_3d,
    fan_equiangular_to_parallel,
    fan_equispaced_to_parallel,
    helical_to_parallel,
    ray_line,
)
from xrt.services.projector import intersect_row

PI = math.pi


def _points(ray, ts=(-1.3, 0.7)):
    point, direction = ray_line(ray)
    return [np.asarray(point) + t * np.asarray(direction) for t in ts]


def _same_line(a, b):
    """Two rays describe the same line when each's points lie on the other."""
    point, direction = ray_line(b)
    for p in _points(a):
        offset = p - np.asarray(point)
        residual = offset - np.dot(offset, direction) * np.asarray(direction)
        if np.linalg.norm(residual) > 1e-12:
            return False
    return True


class TestCanonicalize2D:
    @pytest.mark.parametrize(
        "raw, expected",
        [
            ((1.0, PI / 4), (1.0, PI / 4)),
            ((-2.0, -PI / 6), (2.0, 5 * PI / 6)),
            ((1.0, 9 * PI / 4), (1.0, PI / 4)),
            ((0.5, PI), (-0.5, 0.0)),
        ],
    )
    def test_examples(self, raw, expected):
        ray = canonicalize_2d(*raw)

        assert ray.s == pytest.approx(expected[0], abs=1e-12)
        assert ray.phi == pytest.approx(expected[1], abs=1e-12)

    def test_same_line(self, rng):
        for _ in range(50):
            s, phi = rng.uniform(-3, 3), rng.uniform(-10, 10)
            ray = canonicalize_2d(s, phi)
            assert 0.0 <= ray.phi < PI
            assert _same_line(ray, ParallelRay2D.model_construct(s=s, phi=phi))

    @pytest.mark.property
    def test_idempotent(self, rng):
        for _ in range(1000):
            ray = canonicalize_2d(rng.uniform(-5, 5), rng.uniform(-20, 20))
            assert canonicalize_2d(ray.s, ray.phi) == ray

    @pytest.mark.property
    def test_direction_reversal_gives_same_row(self, rng):
        grid = ImageGrid(nx=7, ny=5)
        for _ in range(1000):
            s, phi = float(rng.uniform(-5, 5)), float(rng.uniform(0, 2 * PI))
            row = intersect_row(canonicalize_2d(s, phi), grid)
            reversed_row = intersect_row(canonicalize_2d(-s, phi + PI), grid)

            assert reversed_row.indices.tolist() == row.indices.tolist()
            np.testing.assert_allclose(reversed_row.lengths, row.lengths, rtol=0, atol=1e-12)

    @pytest.mark.parametrize("raw", [(math.nan, 0.0), (0.0, math.inf)])
    def test_non_finite(self, raw):
        with pytest.raises(ValidationError):
            canonicalize_2d(*raw)


class TestCanonicalize3D:
    @pytest.mark.parametrize(
        "raw, expected",
        [
            ((0.0, 0.0, PI / 4, PI / 4), (0.0, 0.0, PI / 4, PI / 4)),
            ((1.0, 1.0, 2 * PI, 0.0), (1.0, 1.0, 0.0, 0.0)),
            ((-1.0, 2.0, 4 * PI / 3, -PI / 6), (1.0, 2.0, PI / 3, PI / 6)),
        ],
    )
    def test_examples(self, raw, expected):
        ray = canonicalize_3d(*raw)

        assert (ray.s1, ray.s2, ray.phi1, ray.phi2) == pytest.approx(expected, abs=1e-12)

    def test_same_line(self, rng):
        for _ in range(50):
            raw = (rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-10, 10), rng.uniform(-10, 10))
            ray = canonicalize_3d(*raw)
            assert 0.0 <= ray.phi1 < 2 * PI
            assert 0.0 <= ray.phi2 <= PI / 2
            original = ParallelRay3D.model_construct(s1=raw[0], s2=raw[1], phi1=raw[2], phi2=raw[3])
            assert _same_line(ray, original)

    @pytest.mark.property
    def test_idempotent(self, rng):
        for _ in range(1000):
            ray = canonicalize_3d(*rng.uniform(-5, 5, 2), *rng.uniform(-20, 20, 2))
            assert canonicalize_3d(ray.s1, ray.s2, ray.phi1, ray.phi2) == ray

    def test_non_finite(self):
        with pytest.raises(ValidationError):
            canonicalize_3d(0.0, 0.0, math.nan, 0.0)


class TestDirectionBasis:
    def test_identity_angles(self):
        assert direction_basis_3d(0.0, 0.0) == ((1.0, 0.0, 0.0), (-0.0, 1.0, 0.0), (-0.0, -0.0, 1.0))

    def test_quarter_turn(self):
        theta, theta1, theta2 = direction_basis_3d(PI / 2, 0.0)

        assert theta == pytest.approx((0.0, 1.0, 0.0), abs=1e-15)
        assert theta1 == pytest.approx((-1.0, 0.0, 0.0), abs=1e-15)
        assert theta2 == pytest.approx((0.0, 0.0, 1.0), abs=1e-15)

    def test_orthonormal(self, rng):
        for _ in range(20):
            basis = np.array(direction_basis_3d(rng.uniform(0, 2 * PI), rng.uniform(0, PI / 2)))
            assert basis @ basis.T == pytest.approx(np.eye(3), abs=1e-14)

    def test_diagonal(self):
        theta, _, _ = direction_basis_3d(PI / 4, PI / 4)

        assert theta == pytest.approx((0.5, 0.5, math.sqrt(2) / 2))


class TestFanTransforms:
    @pytest.mark.parametrize(
        "args, expected",
        [
            ((4.0, PI / 2, -PI / 6), (-2.0, -PI / 6)),
            ((3.0, 1.1, 0.0), (0.0, 1.1 - PI / 2)),
            ((2.0, 0.0, PI / 6), (1.0, -PI / 3)),
        ],
    )
    def test_equiangular(self, args, expected):
        assert fan_equiangular_to_parallel(*args) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize(
        "args, expected",
        [
            ((3.0, 1.1, 0.0), (0.0, 1.1 - PI / 2)),
            ((1.0, PI / 2, 1.0), (math.sqrt(2) / 2, PI / 4)),
            ((4.0, PI / 2, 4 / math.sqrt(3)), (2.0, PI / 6)),
        ],
    )
    def test_equispaced(self, args, expected):
        assert fan_equispaced_to_parallel(*args) == pytest.approx(expected, abs=1e-12)

    def test_equispaced_offset_identity(self):
        s, _ = fan_equispaced_to_parallel(4.0, 0.3, 1.7)

        assert s == pytest.approx(4.0 * math.sin(math.atan(1.7 / 4.0)), abs=1e-14)

    @pytest.mark.property
    def test_equispaced_matches_equiangular_at_detector_angle(self, rng):
        for _ in range(1000):
            D, alpha, t = rng.uniform(0.5, 20), rng.uniform(-10, 10), rng.uniform(-30, 30)
            flat = canonicalize_2d(*fan_equispaced_to_parallel(D, alpha, t))
            curved = canonicalize_2d(*fan_equiangular_to_parallel(D, alpha, math.atan(t / D)))

            assert abs(flat.s - curved.s) < 1e-12
            assert abs(flat.phi - curved.phi) < 1e-12

    @pytest.mark.parametrize("D", [0.0, -1.0, math.nan])
    def test_invalid_distance(self, D):
        with pytest.raises(ValidationError):
            fan_equiangular_to_parallel(D, 0.0, 0.0)
        with pytest.raises(ValidationError):
            fan_equispaced_to_parallel(D, 0.0, 0.0)


class TestConeTransforms:
    def test_reference_cone(self):
        s1, s2, phi1, phi2 = cone_equiangular_to_parallel(4.0, PI / 4, PI / 12, PI / 12)

        assert phi1 == pytest.approx(PI / 3)
        assert phi2 == pytest.approx(PI / 12)
        assert s1 == pytest.approx(4 * math.sin(PI / 12))
        assert s2 == pytest.approx(4 * math.cos(PI / 12) * math.sin(PI / 12))

    def test_central_ray(self):
        assert cone_equiangular_to_parallel(3.0, 0.7, 0.0, 0.0) == (0.0, 0.0, 0.7, 0.0)
        assert cone_equispaced_to_parallel(3.0, 0.7, 0.0, 0.0) == (0.0, 0.0, 0.7, 0.0)

    def test_equiangular_substitution(self):
        expected = (1.0, math.sqrt(6) / 2, PI / 6, PI / 4)

        assert cone_equiangular_to_parallel(2.0, 0.0, PI / 6, PI / 4) == pytest.approx(expected)

    @pytest.mark.parametrize(
        "args, expected",
        [
            ((1.0, 0.0, 1.0, 0.0), (math.sqrt(2) / 2, 0.0, PI / 4, 0.0)),
            ((1.0, 0.0, 0.0, 1.0), (0.0, math.sqrt(2) / 2, 0.0, PI / 4)),
        ],
    )
    def test_equispaced(self, args, expected):
        assert cone_equispaced_to_parallel(*args) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("alpha, beta", [(PI / 2, 0.0), (0.0, -PI / 2)])
    def test_angles_outside_open_interval(self, alpha, beta):
        with pytest.raises(ValidationError):
            cone_equiangular_to_parallel(4.0, 0.0, alpha, beta)


class TestHelicalTransform:
    def test_zero_lift_matches_cone_exactly(self, cone_params):
        helical = helical_to_parallel(HelicalEquiangularBeam(**cone_params, H=0.0))

        assert helical == cone_equiangular_to_parallel(**cone_params)

    def test_zero_lift_equispaced_matches_cone_exactly(self):
        helical = helical_to_parallel(HelicalEquispacedBeam(D=3.0, phi1p=0.2, t=0.4, h=-0.3, H=0.0))

        assert helical == cone_equispaced_to_parallel(3.0, 0.2, 0.4, -0.3)

    def test_lift_only_changes_s2(self, cone_params):
        cone = cone_equiangular_to_parallel(**cone_params)
        helical = helical_to_parallel(HelicalEquiangularBeam(**cone_params, H=0.5))
        c, s = math.cos(PI / 12), math.sin(PI / 12)

        assert helical[1] == pytest.approx(4 * c * s + c / 2)
        assert (helical[0], helical[2], helical[3]) == (cone[0], cone[2], cone[3])

    def test_flat_row_adds_lift(self):
        cone = cone_equiangular_to_parallel(4.0, 0.3, 0.2, 0.0)
        helical = helical_to_parallel(HelicalEquiangularBeam(D=4.0, phi1p=0.3, alpha=0.2, beta=0.0, H=-0.75))

        assert helical[1] == pytest.approx(cone[1] - 0.75)


class TestDispatch:
    def test_beam_to_parallel_routes_each_geometry(self, fan_beam, cone_beam):
        assert beam_to_parallel(Parallel2DBeam(s=0.5, phi=0.1)) == (0.5, 0.1)
        assert beam_to_parallel(fan_beam) == fan_equiangular_to_parallel(4.0, PI / 2, -PI / 6)
        assert beam_to_parallel(FanEquispacedBeam(D=2.0, alpha=0.0, t=1.0)) == fan_equispaced_to_parallel(2.0, 0.0, 1.0)
        assert beam_to_parallel(cone_beam) == cone_equiangular_to_parallel(4.0, PI / 4, PI / 12, PI / 12)
        assert beam_to_parallel(ConeEquispacedBeam(D=2.0, phi1p=0.0, t=1.0, h=0.5)) == cone_equispaced_to_parallel(
            2.0, 0.0, 1.0, 0.5
        )

    def test_fan_canonical_ray(self, fan_beam):
        ray = canonicalize(beam_to_parallel(fan_beam))

        assert (ray.s, ray.phi) == pytest.approx((2.0, 5 * PI / 6))

    def test_beam_from_ray_roundtrip(self):
        ray = ParallelRay3D(s1=0.1, s2=-0.2, phi1=1.0, phi2=0.5)

        assert canonicalize(beam_to_parallel(beam_from_ray(ray))) == ray
