"""Half-space and ball models of H^n and geodesic distance between points.

The kernels only ever see the geodesic distance r; this module turns pairs of
model points into that r.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

__all__ = [
    "HalfSpacePoint",
    "BallPoint",
    "geodesic_distance_half_space",
    "geodesic_distance_ball",
    "mobius_half_to_ball",
    "ball_radius",
    "geodesic_radius",
]


def _as_coords(coords: Sequence[float]) -> tuple:
    out = tuple(float(c) for c in coords)
    if any(math.isnan(c) or math.isinf(c) for c in out):
        raise ValueError("coordinates must be finite")
    return out


@dataclass(frozen=True)
class HalfSpacePoint:
    """Point of the upper half-space {x : x_n > 0}."""

    coords: tuple

    def __init__(self, coords: Sequence[float]):
        c = _as_coords(coords)
        if len(c) < 2:
            raise ValueError("dimension must be >= 2")
        if not c[-1] > 0:
            raise ValueError("last coordinate of a half-space point must be > 0")
        object.__setattr__(self, "coords", c)

    @property
    def dim(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class BallPoint:
    """Point of the open unit ball."""

    coords: tuple

    def __init__(self, coords: Sequence[float]):
        c = _as_coords(coords)
        if len(c) < 2:
            raise ValueError("dimension must be >= 2")
        if not math.fsum(x * x for x in c) < 1.0:
            raise ValueError("ball point must satisfy ||y|| < 1")
        object.__setattr__(self, "coords", c)

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def norm(self) -> float:
        return math.sqrt(math.fsum(x * x for x in self.coords))


def _sq_dist(p: tuple, q: tuple) -> float:
    return math.fsum((a - b) ** 2 for a, b in zip(p, q))


def geodesic_distance_half_space(p: HalfSpacePoint, q: HalfSpacePoint) -> float:
    """Distance with cosh r = 1 + |p - q|^2 / (2 p_n q_n).

    Evaluated as r = 2 asinh(sqrt(u / 2)) with u = |p-q|^2/(2 p_n q_n), the
    same quantity as acosh(1 + u) but free of cancellation for nearby points.
    """
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    d2 = _sq_dist(p.coords, q.coords)
    return 2.0 * math.asinh(math.sqrt(d2 / (4.0 * p.coords[-1] * q.coords[-1])))


def _one_minus_sq(norm: float) -> float:
    return (1.0 - norm) * (1.0 + norm)


def geodesic_distance_ball(p: BallPoint, q: BallPoint) -> float:
    """Ball-model distance: sinh(r/2) = |p - q| / sqrt((1-|p|^2)(1-|q|^2))."""
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    d = math.sqrt(_sq_dist(p.coords, q.coords))
    denom = math.sqrt(_one_minus_sq(p.norm) * _one_minus_sq(q.norm))
    return 2.0 * math.asinh(d / denom)


def mobius_half_to_ball(z: HalfSpacePoint) -> BallPoint:
    """Map the upper half-plane to the unit disc, w = (z - i)/(z + i)."""
    if z.dim != 2:
        raise ValueError("the Moebius map is only defined for n = 2")
    zc = complex(z.coords[0], z.coords[1])
    w = (zc - 1j) / (zc + 1j)
    return BallPoint((w.real, w.imag))


def ball_radius(r: float) -> float:
    """Euclidean radius rho = tanh(r/2) of the ball point at geodesic radius r."""
    if r < 0:
        raise ValueError("geodesic radius must be >= 0")
    return math.tanh(0.5 * r)


def geodesic_radius(rho: float) -> float:
    """Inverse of :func:`ball_radius`: r = 2 atanh(rho)."""
    if not 0 <= rho < 1:
        raise ValueError("ball radius must lie in [0, 1)")
    return 2.0 * math.atanh(rho)
