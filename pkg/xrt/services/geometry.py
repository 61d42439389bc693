"""
Ray parameterizations and source-geometry transforms.

The fan, cone and helical transforms return raw (non-canonical) parallel
parameters; ``canonicalize_2d``/``canonicalize_3d`` reduce them to the
fundamental angle ranges as a separate step.
"""
import math
from typing import Tuple, Union

import pydantic

from xrt.core.exceptions import ValidationError, from_pydantic
from xrt.core.logging import get_logger
from xrt.schemas.beams import (
    HALF_PI,
    TWO_PI,
    BeamSpec,
    ConeEquiangularBeam,
    ConeEquispacedBeam,
    FanEquiangularBeam,
    FanEquispacedBeam,
    HelicalEquiangularBeam,
    HelicalEquispacedBeam,
    Parallel2DBeam,
    Parallel3DBeam,
    ParallelRay2D,
    ParallelRay3D,
)

logger = get_logger("geometry")

Vector3 = Tuple[float, float, float]
Raw2D = Tuple[float, float]
Raw3D = Tuple[float, float, float, float]


def _require_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise ValidationError(f"{name} must be finite, got {value}", field=name)


def _require_positive_distance(D: float) -> None:
    _require_finite(D=D)
    if D <= 0:
        raise ValidationError(f"source distance D must be positive, got {D}", field="D")


def _require_open_half_pi(**values: float) -> None:
    for name, value in values.items():
        _require_finite(**{name: value})
        if not -HALF_PI < value < HALF_PI:
            raise ValidationError(f"{name}={value} must lie in (-pi/2, pi/2)", field=name)


def canonicalize_2d(s: float, phi: float) -> ParallelRay2D:
    """
    Reduce (s, phi) to the equivalent ray with phi in [0, pi).

    Inputs already in range come back unchanged. Raw angles that differ by
    a multiple of pi reduce to angles within rounding of each other, not to
    the same double, so their rows agree in index set with lengths within
    1e-12.
    """
    _require_finite(s=s, phi=phi)
    phi = phi % TWO_PI
    while phi >= math.pi:
        phi -= math.pi
        s = -s
    try:
        return ParallelRay2D(s=s, phi=phi)
    except pydantic.ValidationError as exc:
        raise from_pydantic(exc, "canonical 2D ray") from exc


def canonicalize_3d(s1: float, s2: float, phi1: float, phi2: float) -> ParallelRay3D:
    """Reduce to phi1 in [0, 2pi) and phi2 in [0, pi/2]."""
    _require_finite(s1=s1, s2=s2, phi1=phi1, phi2=phi2)
    phi2 = phi2 % TWO_PI
    if phi2 >= 3 * HALF_PI:
        phi2 -= TWO_PI
    elif phi2 > HALF_PI:
        phi2 -= math.pi
        s2 = -s2
    if phi2 < 0:
        s1, phi1, phi2 = -s1, phi1 + math.pi, -phi2
    phi1 = phi1 % TWO_PI
    if phi1 >= TWO_PI:
        phi1 = 0.0
    try:
        return ParallelRay3D(s1=s1, s2=s2, phi1=phi1, phi2=phi2)
    except pydantic.ValidationError as exc:
        raise from_pydantic(exc, "canonical 3D ray") from exc


def direction_basis_3d(phi1: float, phi2: float) -> Tuple[Vector3, Vector3, Vector3]:
    """Ray direction and the two detector-plane axes for Eulerian angles."""
    c1, s1 = math.cos(phi1), math.sin(phi1)
    c2, s2 = math.cos(phi2), math.sin(phi2)
    theta = (c2 * c1, c2 * s1, s2)
    theta1 = (-s1, c1, 0.0)
    theta2 = (-s2 * c1, -s2 * s1, c2)
    return theta, theta1, theta2


def ray_line(ray: Union[ParallelRay2D, ParallelRay3D]) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
    """Point at t = 0 and unit direction of a parallel ray."""
    if isinstance(ray, ParallelRay2D):
        perp = ray.theta_perp
        return (ray.s * perp[0], ray.s * perp[1]), ray.theta
    theta, theta1, theta2 = direction_basis_3d(ray.phi1, ray.phi2)
    point = tuple(ray.s1 * a + ray.s2 * b for a, b in zip(theta1, theta2))
    return point, theta


def fan_equiangular_to_parallel(D: float, alpha: float, gamma: float) -> Raw2D:
    _require_positive_distance(D)
    _require_finite(alpha=alpha, gamma=gamma)
    return D * math.sin(gamma), gamma + alpha - HALF_PI


def fan_equispaced_to_parallel(D: float, alpha: float, t: float) -> Raw2D:
    """Flat-detector fan ray at signed detector offset ``t``."""
    _require_positive_distance(D)
    _require_finite(alpha=alpha, t=t)
    s = D * t / math.hypot(D, t)
    return s, math.atan(t / D) + alpha - HALF_PI


def _cone_core(D: float, phi1p: float, alpha: float, beta: float, H: float) -> Raw3D:
    cos_beta = math.cos(beta)
    s1 = D * math.sin(alpha)
    s2 = D * math.cos(alpha) * math.sin(beta) + H * cos_beta
    return s1, s2, phi1p + alpha, beta


def _cone_equispaced_core(D: float, phi1p: float, t: float, h: float, H: float) -> Raw3D:
    alpha = math.atan(t / D)
    beta = math.atan(h / math.hypot(D, t))
    cos_alpha = math.cos(alpha)
    cos_beta = math.cos(beta)
    s1 = D * math.sin(alpha)
    s2 = h * cos_alpha * cos_alpha * cos_beta + H * cos_beta
    return s1, s2, phi1p + alpha, beta


def cone_equiangular_to_parallel(D: float, phi1p: float, alpha: float, beta: float) -> Raw3D:
    _require_positive_distance(D)
    _require_finite(phi1p=phi1p)
    _require_open_half_pi(alpha=alpha, beta=beta)
    return _cone_core(D, phi1p, alpha, beta, 0.0)


def cone_equispaced_to_parallel(D: float, phi1p: float, t: float, h: float) -> Raw3D:
    _require_positive_distance(D)
    _require_finite(phi1p=phi1p, t=t, h=h)
    return _cone_equispaced_core(D, phi1p, t, h, 0.0)


def helical_to_parallel(spec: Union[HelicalEquiangularBeam, HelicalEquispacedBeam]) -> Raw3D:
    """
    Cone transform with the source lifted by ``H``.

    With ``H == 0`` the result is bit-identical to the matching cone transform.
    """
    _require_positive_distance(spec.D)
    _require_finite(phi1p=spec.phi1p, H=spec.H)
    if isinstance(spec, HelicalEquiangularBeam):
        _require_open_half_pi(alpha=spec.alpha, beta=spec.beta)
        return _cone_core(spec.D, spec.phi1p, spec.alpha, spec.beta, spec.H)
    _require_finite(t=spec.t, h=spec.h)
    return _cone_equispaced_core(spec.D, spec.phi1p, spec.t, spec.h, spec.H)


def beam_to_parallel(spec: BeamSpec) -> Union[Raw2D, Raw3D]:
    """Raw parallel parameters for any supported beam geometry."""
    if isinstance(spec, Parallel2DBeam):
        return spec.s, spec.phi
    if isinstance(spec, FanEquiangularBeam):
        return fan_equiangular_to_parallel(spec.D, spec.alpha, spec.gamma)
    if isinstance(spec, FanEquispacedBeam):
        return fan_equispaced_to_parallel(spec.D, spec.alpha, spec.t)
    if isinstance(spec, Parallel3DBeam):
        return spec.s1, spec.s2, spec.phi1, spec.phi2
    if isinstance(spec, ConeEquiangularBeam):
        return cone_equiangular_to_parallel(spec.D, spec.phi1p, spec.alpha, spec.beta)
    if isinstance(spec, ConeEquispacedBeam):
        return cone_equispaced_to_parallel(spec.D, spec.phi1p, spec.t, spec.h)
    if isinstance(spec, (HelicalEquiangularBeam, HelicalEquispacedBeam)):
        return helical_to_parallel(spec)
    logger.error("Unsupported beam geometry", extra={"beam_type": type(spec).__name__})
    raise ValidationError(f"unsupported beam geometry {type(spec).__name__}", field="geometry")


def canonicalize(raw: Union[Raw2D, Raw3D]) -> Union[ParallelRay2D, ParallelRay3D]:
    if len(raw) == 2:
        return canonicalize_2d(*raw)
    return canonicalize_3d(*raw)


def beam_from_ray(ray: Union[ParallelRay2D, ParallelRay3D]) -> BeamSpec:
    """Parallel beam specification that resolves back to ``ray``."""
    if isinstance(ray, ParallelRay2D):
        return Parallel2DBeam(s=ray.s, phi=ray.phi)
    return Parallel3DBeam(s1=ray.s1, s2=ray.s2, phi1=ray.phi1, phi2=ray.phi2)
