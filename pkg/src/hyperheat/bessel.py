"""Bessel process densities and exact Bessel-bridge sampling.

A Bessel(n) bridge is sampled as the Euclidean norm of an n-dimensional
Brownian bridge.  From the origin the endpoint direction is irrelevant by
rotational invariance.  From x > 0 the endpoint polar angle is drawn from its
exact conditional law, density proportional to exp((x y / T) cos xi) sin^{n-2} xi,
before the Gaussian bridge is laid down.  Both constructions are exact in law
at the grid times.

Randomness is counter based: path ``i`` of a run with seed ``s`` always comes
from a Philox stream keyed by ``s`` whose counter starts at ``(0, 0, 0, i)``,
so a path never depends on which worker produced it or in what order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np

from . import specfun

__all__ = [
    "RngStream",
    "BridgePath",
    "uniform_grid",
    "geometric_grid",
    "make_grid",
    "default_steps",
    "bessel_density_from_origin",
    "bessel_transition_density",
    "bridge_marginal_density",
    "sample_bridge_from_origin",
    "sample_bridge",
    "sample_bridge_radii",
    "endpoint_angle_table",
]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """Identifies one reproducible random stream (one path)."""

    seed: int
    stream_id: int

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if int(v) != v or not 0 <= v <= _MASK64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer")

    def generator(self) -> np.random.Generator:
        bg = np.random.Philox(key=int(self.seed))
        _reset_philox(bg, int(self.stream_id))
        return np.random.Generator(bg)


def _reset_philox(bg: np.random.Philox, stream_id: int) -> None:
    state = bg.state
    state["state"]["counter"][...] = (0, 0, 0, stream_id)
    state["buffer_pos"] = 4
    state["has_uint32"] = 0
    state["uinteger"] = 0
    bg.state = state


class _StreamFactory:
    """Re-keys a single Philox instance per stream; much cheaper than
    constructing a generator per path and bit-identical to
    ``RngStream(seed, i).generator()``."""

    def __init__(self, seed: int):
        self._bg = np.random.Philox(key=int(seed))
        self._gen = np.random.Generator(self._bg)
        self._state = self._bg.state

    def __call__(self, stream_id: int) -> np.random.Generator:
        st = self._state
        st["state"]["counter"][...] = (0, 0, 0, stream_id)
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bg.state = st
        return self._gen


@dataclass(frozen=True)
class BridgePath:
    """Radial path sampled on a time grid; ``radii[-1]`` is the pinned end."""

    times: np.ndarray
    radii: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.times.shape != self.radii.shape:
            raise ValueError("times and radii must have equal length")
        if np.any(self.radii < 0):
            raise ValueError("radii must be nonnegative")

    @property
    def T(self) -> float:
        return float(self.times[-1])


# --------------------------------------------------------------------------
# Time grids
# --------------------------------------------------------------------------

def default_steps(T: float) -> int:
    return 200 if T <= 1 else int(math.ceil(200 * T))


def uniform_grid(T: float, steps: int) -> np.ndarray:
    if not T > 0:
        raise ValueError("T must be > 0")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    t = np.linspace(0.0, T, steps + 1)
    t[-1] = T
    return t


def geometric_grid(T: float, steps: int, ratio: float = 1.05) -> np.ndarray:
    """Grid whose step sizes grow geometrically away from both endpoints."""
    if not T > 0:
        raise ValueError("T must be > 0")
    if steps < 2:
        raise ValueError("geometric grids need at least 2 steps")
    half = steps // 2
    left = ratio ** np.arange(half)
    sizes = np.concatenate([left, [left[-1] * ratio] if steps % 2 else [], left[::-1]])
    t = np.concatenate([[0.0], np.cumsum(sizes)])
    t *= T / t[-1]
    t[-1] = T
    return t


def make_grid(T: float, steps: Optional[int] = None, kind: str = "uniform") -> np.ndarray:
    steps = default_steps(T) if steps is None else steps
    if kind == "uniform":
        return uniform_grid(T, steps)
    if kind == "geometric":
        return geometric_grid(T, steps)
    raise ValueError(f"unknown grid kind {kind!r}")


def _check_grid(grid) -> np.ndarray:
    t = np.asarray(grid, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise ValueError("time grid needs at least two points")
    if t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise ValueError("time grid must start at 0 and be strictly increasing")
    return t


# --------------------------------------------------------------------------
# Densities
# --------------------------------------------------------------------------

def _check_n(n):
    if int(n) != n or n < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {n}")
    return int(n)


def bessel_density_from_origin(n: int, t: float, r):
    """p_B(t, r) = 2 r^{n-1} exp(-r^2 / 2t) / ((2t)^{n/2} Gamma(n/2))."""
    n = _check_n(n)
    if not t > 0:
        raise ValueError("t must be > 0")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be >= 0")
    with np.errstate(divide="ignore"):
        logp = (math.log(2.0) + (n - 1) * np.log(r) - r * r / (2 * t)
                - 0.5 * n * math.log(2 * t) - math.lgamma(0.5 * n))
    out = np.exp(logp)
    return out if out.ndim else float(out)


def bessel_transition_density(n: int, t: float, x, y):
    """Bessel(n) transition density from x to y in time t (broadcasts).

    For x > 0: (1/t) (y/x)^nu y exp(-(x^2+y^2)/2t) I_nu(x y / t), nu = n/2 - 1,
    evaluated with the exponentially scaled I_nu.  For x y / t < 1e-7
    (including x = 0) it is :func:`bessel_density_from_origin` times
    e^{-x^2/2t} and the leading series correction of I_nu.
    """
    n = _check_n(n)
    if not t > 0:
        raise ValueError("t must be > 0")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("y must be > 0")
    if np.any(x < 0):
        raise ValueError("x must be >= 0")
    x, y = np.broadcast_arrays(x, y)
    nu = 0.5 * n - 1.0
    z_all = x * y / t
    # below z = 1e-7 the ascending series of I_nu is exact to double after
    # two terms, which also avoids overflow in (y/x)^nu for tiny x
    pos = z_all >= 1e-7
    xs = np.where(pos, x, 1.0)
    z = xs * y / t
    scaled = specfun.bessel_i_scaled(nu, z)
    with np.errstate(divide="ignore", under="ignore"):
        main = (np.exp(nu * (np.log(y) - np.log(xs)) + np.log(y) - (xs - y) ** 2 / (2 * t)
                       - math.log(t)) * scaled)
    origin = (bessel_density_from_origin(n, t, y) * np.exp(-x * x / (2 * t))
              * (1.0 + z_all * z_all / (4.0 * (nu + 1.0))))
    out = np.where(pos, main, origin)
    return out if out.ndim else float(out)


def bridge_marginal_density(n: int, T: float, a: float, b: float, t: float, rho):
    """Density in rho of R_t for the Bessel(n) bridge from a to b over [0, T]:
    p_B(t, a, rho) p_B(T - t, rho, b) / p_B(T, a, b)."""
    if not 0 < t < T:
        raise ValueError("t must lie strictly inside (0, T)")
    rho = np.asarray(rho, dtype=float)
    denom = bessel_transition_density(n, T, a, b)
    if denom <= 0:
        raise ValueError("bridge endpoint has zero density")
    rho_pos = np.where(rho > 0, rho, 1.0)
    left = bessel_transition_density(n, t, a, rho_pos)
    right = bessel_transition_density(n, T - t, rho_pos, b)
    out = np.where(rho > 0, left * right / denom, 0.0)
    return out if out.ndim else float(out)


# --------------------------------------------------------------------------
# Endpoint angle law
# --------------------------------------------------------------------------

_ANGLE_NODES = 4097


@lru_cache(maxsize=256)
def endpoint_angle_table(n: int, kappa: float):
    """Inverse-CDF table for xi in [0, pi] with density
    proportional to exp(kappa cos xi) sin^{n-2} xi.

    Returns ``(cdf, xi)``, read-only arrays suited to ``np.interp``.
    """
    n = _check_n(n)
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    cut = float(specfun._tilted_cut(kappa))
    lo = np.linspace(0.0, cut, _ANGLE_NODES)
    edges = lo if cut >= math.pi else np.concatenate([lo, np.linspace(cut, math.pi, 257)[1:]])
    # Per-cell Gauss-Legendre mass so the table is exact up to interpolation.
    xg, wg = specfun.gauss_legendre(8)
    a, b = edges[:-1], edges[1:]
    nodes = a[:, None] + (b - a)[:, None] * xg[None, :]
    dens = np.exp(-2.0 * kappa * np.sin(0.5 * nodes) ** 2)
    if n > 2:
        dens = dens * np.sin(nodes) ** (n - 2)
    mass = (dens * wg[None, :]).sum(axis=1) * (b - a)
    cdf = np.concatenate([[0.0], np.cumsum(mass)])
    cdf /= cdf[-1]
    cdf.setflags(write=False)
    edges.setflags(write=False)
    return cdf, edges


def _sample_angle(n, kappa, u):
    cdf, xi = endpoint_angle_table(n, float(kappa))
    return np.interp(u, cdf, xi)


# --------------------------------------------------------------------------
# Sampling
# --------------------------------------------------------------------------

def sample_bridge_radii(
    n: int,
    T: float,
    x: float,
    y: float,
    grid,
    seed: int,
    stream_ids: Iterable[int],
    antithetic: bool = False,
) -> np.ndarray:
    """Radii of Bessel(n) bridges x -> y, one row per stream id.

    With ``antithetic=True`` every stream yields two rows: the path built from
    the Gaussian increments Z and the one built from -Z (same endpoint angle).
    """
    n = _check_n(n)
    t = _check_grid(grid)
    if abs(t[-1] - T) > 1e-12 * max(1.0, T):
        raise ValueError("grid must end at T")
    if x < 0 or y < 0:
        raise ValueError("bridge endpoints must be >= 0")
    ids = list(stream_ids)
    steps = t.size - 1
    dt = np.diff(t)
    frac = (t / t[-1])[:, None]
    kappa = x * y / T
    rows = 2 * len(ids) if antithetic else len(ids)
    out = np.empty((rows, t.size))
    factory = _StreamFactory(seed)
    z = np.empty((len(ids), steps, n))
    xi = np.zeros(len(ids))
    need_angle = x > 0 and y > 0
    for k, sid in enumerate(ids):
        gen = factory(int(sid))
        if need_angle:
            xi[k] = gen.random()
        z[k] = gen.standard_normal((steps, n))
    if need_angle:
        xi = _sample_angle(n, kappa, xi)
    start = np.zeros(n)
    start[0] = x
    ends = np.zeros((len(ids), n))
    ends[:, 0] = y * np.cos(xi)
    if n > 1:
        ends[:, 1] = y * np.sin(xi)
    incs = z * np.sqrt(dt)[None, :, None]
    w = np.concatenate([np.zeros((len(ids), 1, n)), np.cumsum(incs, axis=1)], axis=1)
    free = w - frac[None] * w[:, -1:, :]
    lin = start[None, None, :] + frac[None] * (ends - start)[:, None, :]
    if antithetic:
        out[0::2] = np.linalg.norm(lin + free, axis=-1)
        out[1::2] = np.linalg.norm(lin - free, axis=-1)
    else:
        out[:] = np.linalg.norm(lin + free, axis=-1)
    out[:, 0] = x
    out[:, -1] = y
    return out


def sample_bridge_from_origin(n: int, T: float, r: float, grid, rng: RngStream) -> BridgePath:
    """One exact Bessel(n) bridge from 0 to r (norm of an R^n Brownian bridge)."""
    if not r > 0:
        raise ValueError("bridge endpoint r must be > 0")
    t = _check_grid(grid)
    radii = sample_bridge_radii(n, T, 0.0, r, t, rng.seed, [rng.stream_id])[0]
    return BridgePath(t, radii)


def sample_bridge(n: int, T: float, x: float, y: float, grid, rng: RngStream) -> BridgePath:
    """One exact Bessel(n) bridge from x > 0 to y > 0."""
    if not (x > 0 and y > 0):
        raise ValueError("bridge endpoints must be > 0")
    t = _check_grid(grid)
    radii = sample_bridge_radii(n, T, x, y, t, rng.seed, [rng.stream_id])[0]
    return BridgePath(t, radii)
