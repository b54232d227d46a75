"""Bessel-bridge Monte Carlo estimators.

Every estimator here has the shape

    density = deterministic prefactor * E[exp(int_0^T f(R_t) dt)]

with R a Bessel(n) bridge and f a bounded function of the radius.  Paths are
drawn in fixed-size batches of consecutive stream ids, the time integral is
a trapezoid rule on the sampling grid, and per-path values are reduced in
stream order, so a run is bit-reproducible for a given config whatever the
number of workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import bessel, specfun
from .kernels_closed import KernelValue, Method, log_gaussian_prefactor
from .radial_profiles import RadialProfile

__all__ = [
    "McConfig",
    "McEstimate",
    "PathFunctional",
    "hyperbolic_functional",
    "radial_functional",
    "path_functional_value",
    "sample_functionals",
    "summarize",
    "bridge_expectation",
    "heat_kernel_mc",
    "hyperbolic_bessel_density_mc",
    "hyperbolic_bessel_log_factor",
    "radial_sym_kernel_mc",
]

_GRID_KINDS = ("uniform", "geometric")


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo settings.  ``steps=None`` picks 200 steps for T <= 1 and
    ceil(200 T) beyond.  With ``antithetic`` the paths come in mirrored pairs
    and ``paths`` must be even."""

    paths: int = 100_000
    steps: Optional[int] = None
    seed: int = 0
    grid_kind: str = "uniform"
    antithetic: bool = False
    workers: int = 1
    batch: int = 2048

    def __post_init__(self):
        if int(self.paths) != self.paths or self.paths < 1:
            raise ValueError("paths must be a positive integer")
        if self.steps is not None and (int(self.steps) != self.steps or self.steps < 2):
            raise ValueError("steps must be an integer >= 2")
        if self.grid_kind not in _GRID_KINDS:
            raise ValueError(f"grid_kind must be one of {_GRID_KINDS}")
        if self.antithetic and self.paths % 2:
            raise ValueError("antithetic sampling needs an even number of paths")
        if self.workers < 1 or self.batch < 1:
            raise ValueError("workers and batch must be >= 1")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def grid(self, T: float) -> np.ndarray:
        return bessel.make_grid(T, self.steps, self.grid_kind)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    paths: int

    def __post_init__(self):
        if not math.isfinite(self.mean):
            raise ValueError("Monte Carlo mean is not finite")
        if not self.stderr >= 0:
            raise ValueError("stderr must be >= 0")

    def scaled(self, factor: float) -> "McEstimate":
        return McEstimate(self.mean * factor, self.stderr * abs(factor), self.paths)


@dataclass(frozen=True)
class PathFunctional:
    """Integrand f(R) of int_0^T f(R_t) dt.  ``f`` takes an array of radii
    (zero allowed) and must return finite values.  If ``constant`` is set the
    integrand is known to equal it everywhere."""

    f: Callable[[np.ndarray], np.ndarray]
    constant: Optional[float] = None

    def __call__(self, R):
        return self.f(np.asarray(R, dtype=float))


def hyperbolic_functional(n: int) -> PathFunctional:
    """f(R) = -((n-1)(n-3)/8) phi(R), with phi(0) = -1/3."""
    c = specfun.g_coefficient(n)
    if c == 0:
        return PathFunctional(lambda R: np.zeros_like(R), constant=0.0)
    return PathFunctional(lambda R: c * specfun.phi_at(R))


def radial_functional(profile: RadialProfile, n: int) -> PathFunctional:
    """f(R) = ((n-1)(n-3)/8)(1/R^2 - (G'/G)^2) - ((n-1)/4) G''/G."""
    a = (n - 1) * (n - 3) / 8.0
    b = -(n - 1) / 4.0
    gap_c = 0.0 if a == 0 else profile.gap_const
    curv_c = 0.0 if b == 0 else profile.curvature_const
    if gap_c is not None and curv_c is not None:
        const = a * gap_c + b * curv_c
        return PathFunctional(lambda R: np.full_like(R, const), constant=const)

    def f(R):
        out = b * profile.curvature_at(R)
        if a:
            out = out + a * profile.gap_at(R)
        return out

    return PathFunctional(f)


def _trapezoid_rows(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    dt = np.diff(times)
    return (0.5 * (values[..., 1:] + values[..., :-1])) @ dt


def path_functional_value(path: bessel.BridgePath, functional: PathFunctional) -> float:
    """Trapezoid value of int_0^T f(R_t) dt along one sampled path."""
    if functional.constant is not None:
        return functional.constant * path.T
    v = np.asarray(functional(path.radii), dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("path integrand produced non-finite values")
    if np.all(v == v[0]):
        return float(v[0]) * path.T
    return float(_trapezoid_rows(v, path.times))


def sample_functionals(n, T, x, y, functional: PathFunctional, cfg: McConfig,
                       grid=None, extra: Optional[Callable] = None) -> np.ndarray:
    """Trapezoid integrals I_i = int_0^T f(R_t) dt for every sampled path, in
    path order.  With ``extra`` each batch of radii is also mapped through
    ``extra(radii, times)`` and the returned rows are stacked column-wise
    after I (shape (paths, 1 + k))."""
    t = cfg.grid(T) if grid is None else np.asarray(grid, dtype=float)
    n_streams = cfg.paths // 2 if cfg.antithetic else cfg.paths
    starts = list(range(0, n_streams, cfg.batch))

    def run(start):
        ids = range(start, min(start + cfg.batch, n_streams))
        radii = bessel.sample_bridge_radii(n, T, x, y, t, cfg.seed, ids, antithetic=cfg.antithetic)
        vals = np.asarray(functional(radii), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ValueError("path integrand produced non-finite values")
        integral = _trapezoid_rows(vals, t)
        if extra is None:
            return integral
        more = np.asarray(extra(radii, t), dtype=float).reshape(len(integral), -1)
        return np.column_stack([integral, more])

    if cfg.workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    return np.concatenate(parts, axis=0)


def summarize(values: np.ndarray, antithetic: bool = False) -> McEstimate:
    """Mean and standard error of per-path values (pair means if antithetic)."""
    v = np.asarray(values, dtype=float)
    paths = v.shape[0]
    if antithetic:
        v = 0.5 * (v[0::2] + v[1::2])
    if v.shape[0] == 1:
        return McEstimate(float(v[0]), math.inf, paths)
    if np.all(v == v[0]):
        return McEstimate(float(v[0]), 0.0, paths)
    mean = float(np.mean(v))
    stderr = float(np.std(v, ddof=1) / math.sqrt(v.shape[0]))
    return McEstimate(mean, stderr, paths)


def bridge_expectation(n: int, T: float, x: float, y: float,
                       functional: PathFunctional, cfg: McConfig) -> McEstimate:
    """E[exp(int_0^T f(R_t) dt) | R_0 = x, R_T = y] for the Bessel(n) bridge."""
    if functional.constant is not None:
        return McEstimate(math.exp(functional.constant * T), 0.0, cfg.paths)
    integrals = sample_functionals(n, T, x, y, functional, cfg)
    return summarize(np.exp(integrals), cfg.antithetic)


def _check_common(n, T):
    if int(n) != n or n < 2:
        raise ValueError("dimension must be an integer >= 2")
    if not T > 0:
        raise ValueError("T must be > 0")


def heat_kernel_mc(n: int, T: float, r: float, cfg: Optional[McConfig] = None, *,
                   limit_at_origin: bool = False) -> KernelValue:
    """Bessel-bridge estimate of the H^n heat kernel at geodesic distance r.

    r = 0 requires ``limit_at_origin=True``; the bridge is then pinned at the
    origin at both ends.
    """
    _check_common(n, T)
    if r < 0 or (r == 0 and not limit_at_origin):
        raise ValueError("r must be > 0 (pass limit_at_origin=True for r = 0)")
    cfg = cfg or McConfig()
    est = bridge_expectation(n, T, 0.0, float(r), hyperbolic_functional(n), cfg)
    pre = math.exp(log_gaussian_prefactor(n, T, r))
    return KernelValue(pre * est.mean, Method.MC_BRIDGE, pre * est.stderr)


def hyperbolic_bessel_log_factor(n: int, T: float, x: float, y: float) -> float:
    """log of e^{-(n-1)^2 T/8} ((sinh y / y)(x / sinh x))^{(n-1)/2} p_B(T, x, y),
    the deterministic part of the hyperbolic Bessel density."""
    lp = math.log(bessel.bessel_transition_density(n, T, x, y))
    ratio = float(specfun.log_sinh(y)) - math.log(y) + specfun.log_x_over_sinh(x)
    return -(n - 1) ** 2 * T / 8.0 + 0.5 * (n - 1) * ratio + lp


def hyperbolic_bessel_density_mc(n: int, T: float, x: float, y: float,
                                 cfg: Optional[McConfig] = None) -> McEstimate:
    """Bridge estimate of the order-n hyperbolic Bessel transition density x -> y."""
    _check_common(n, T)
    if x < 0 or not y > 0:
        raise ValueError("need x >= 0 and y > 0")
    cfg = cfg or McConfig()
    est = bridge_expectation(n, T, float(x), float(y), hyperbolic_functional(n), cfg)
    return est.scaled(math.exp(hyperbolic_bessel_log_factor(n, T, x, y)))


def radial_sym_kernel_mc(profile: RadialProfile, n: int, T: float, r: float,
                         cfg: Optional[McConfig] = None) -> KernelValue:
    """Heat kernel of a radially symmetric Cartan-Hadamard space at distance r."""
    _check_common(n, T)
    if not r > 0:
        raise ValueError("r must be > 0")
    cfg = cfg or McConfig()
    est = bridge_expectation(n, T, 0.0, float(r), radial_functional(profile, n), cfg)
    pre = math.exp(0.5 * (n - 1) * profile.log_ratio(r) - r * r / (2 * T)
                   - 0.5 * n * math.log(2 * math.pi * T))
    return KernelValue(pre * est.mean, Method.MC_BRIDGE, pre * est.stderr)
