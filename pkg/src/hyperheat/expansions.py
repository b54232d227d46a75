"""Deterministic-path expansions of the bridge representation.

Replacing the bridge R_t by a deterministic path r_t inside the exponent gives
a small-time approximation; the series expansion corrects it with moments of
D = int_0^T (g(R_t) - g(r_t)) dt.  Two paths are provided: the straight line,
and the "unbiased" path with g(r_t) = E[g(R_t)], which makes E[D] = 0.
"""
from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import bessel, specfun
from .errors import QuadratureError
from .kernels_closed import KernelValue, Method, log_gaussian_prefactor
from .kernels_mc import (
    McConfig,
    McEstimate,
    PathFunctional,
    _trapezoid_rows,
    hyperbolic_bessel_log_factor,
    radial_functional,
    sample_functionals,
    summarize,
)
from .radial_profiles import RadialProfile
from .specfun import QuadratureSpec

__all__ = [
    "DeterministicPath",
    "unbiased_path",
    "straight_line_path",
    "bridge_mean",
    "origin_bridge_means",
    "small_time_kernel",
    "series_kernel",
    "series_terms",
    "hyperbolic_bessel_small_time",
    "radial_sym_small_time",
]

_PATH_KINDS = ("unbiased", "straight_line")


@dataclass(frozen=True)
class DeterministicPath:
    """r_t sampled on ``times``; ``values[0]`` is the start, ``values[-1]`` = r."""

    kind: str
    times: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    n: int
    T: float
    r: float
    start: float = 0.0

    def __post_init__(self):
        if self.kind not in _PATH_KINDS:
            raise ValueError(f"path kind must be one of {_PATH_KINDS}")
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have equal length")
        if not (np.all(np.isfinite(self.values)) and np.all(self.values >= 0)):
            raise ValueError("path values must be finite and >= 0")
        if self.values[0] != self.start or self.values[-1] != self.r:
            raise ValueError("path must interpolate its endpoints exactly")


def _grid_or_default(T, grid):
    return bessel.make_grid(T) if grid is None else bessel._check_grid(grid)


def straight_line_path(T: float, r: float, grid=None, *, start: float = 0.0,
                       n: int = 0) -> DeterministicPath:
    """r_t = start + (t/T)(r - start)."""
    if not (T > 0 and r > 0) or start < 0:
        raise ValueError("need T > 0, r > 0 and start >= 0")
    t = _grid_or_default(T, grid)
    vals = start + (t / T) * (r - start)
    vals[0], vals[-1] = start, r
    return DeterministicPath("straight_line", t, vals, n, T, r, start)


_MEAN_SPEC = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-11)


def bridge_mean(fn, n: int, T: float, a: float, b: float, t: float,
                spec: QuadratureSpec = _MEAN_SPEC) -> float:
    """E[fn(R_t)] for the Bessel(n) bridge a -> b, by quadrature of fn against
    the bridge marginal on [0, max(a, b) + 10 sqrt(T)]."""
    hi = max(a, b) + 10.0 * math.sqrt(T)
    centre = a + (t / T) * (b - a)
    width = math.sqrt(t * (T - t) / T)
    pts = sorted({p for p in (centre - 3 * width, centre - width, centre, centre + width,
                              centre + 3 * width, width) if 0 < p < hi})

    def f(rho):
        return fn(rho) * bessel.bridge_marginal_density(n, T, a, b, t, rho)

    return specfun.integrate(f, 0.0, hi, spec, points=pts)


@lru_cache(maxsize=16)
def _gaussian_rule(n: int, nz: int = 64, nq: int = 96):
    z, wz = np.polynomial.hermite_e.hermegauss(nz)
    wz = wz / math.sqrt(2.0 * math.pi)
    qmax = math.sqrt(n) + 10.0
    x, w = np.polynomial.legendre.leggauss(nq)
    q = 0.5 * qmax * (x + 1.0)
    # chi density with n - 1 degrees of freedom
    logd = ((n - 2) * np.log(q) - 0.5 * q * q - 0.5 * (n - 3) * math.log(2.0)
            - math.lgamma(0.5 * (n - 1)))
    return z, wz, q, 0.5 * qmax * w * np.exp(logd)


def origin_bridge_means(fn, n: int, T: float, r: float, times) -> np.ndarray:
    """E[fn(R_t)] at interior times for the Bessel(n) bridge 0 -> r.

    R_t is the norm of a Gaussian vector with mean (t/T) r e_1 and covariance
    (t (T - t)/T) I, so the mean is a smooth two-dimensional integral over the
    component along e_1 (Gauss-Hermite) and the chi-distributed norm of the
    rest (Gauss-Legendre).  It agrees with :func:`bridge_mean` to ~1e-15 at a
    fraction of the cost.
    """
    z, wz, q, wq = _gaussian_rule(int(n))
    t = np.asarray(times, dtype=float)
    if np.any((t <= 0) | (t >= T)):
        raise ValueError("times must lie strictly inside (0, T)")
    out = np.empty_like(t)
    for lo in range(0, t.size, 64):
        tc = t[lo:lo + 64][:, None, None]
        mu = tc / T * r
        sd = np.sqrt(tc * (T - tc) / T)
        R = np.sqrt((mu + sd * z[None, :, None]) ** 2 + (sd * q[None, None, :]) ** 2)
        out[lo:lo + 64] = np.einsum("tij,i,j->t", np.asarray(fn(R), dtype=float), wz, wq)
    return out


def unbiased_path(n: int, T: float, r: float, grid=None, *, start: float = 0.0) -> DeterministicPath:
    """r_t = g^{-1}(E[g(R_t)]) for the Bessel(n) bridge start -> r.

    ``start = 0`` is the origin-start path; ``start > 0`` uses the same recipe
    with the two-sided bridge marginal.  For n = 3 (g = 0) the straight line
    is returned under the ``unbiased`` label.
    """
    specfun._check_dim(n)
    if not (T > 0 and r > 0) or start < 0:
        raise ValueError("need T > 0, r > 0 and start >= 0")
    t = _grid_or_default(T, grid)
    if n == 3:
        line = straight_line_path(T, r, t, start=start, n=n)
        return DeterministicPath("unbiased", line.times, line.values, n, T, r, start)
    c = specfun.g_coefficient(n)
    vals = np.empty_like(t)
    vals[0], vals[-1] = start, r
    if start == 0:
        means = origin_bridge_means(specfun.phi_at, n, T, r, t[1:-1])
    else:
        means = np.array([bridge_mean(specfun.phi_at, n, T, start, r, float(ti))
                          for ti in t[1:-1]])
    if not np.all(np.isfinite(means)):
        raise QuadratureError("bridge mean of phi is not finite")
    # quadrature can graze the open range of g; clip to its ends
    vals[1:-1] = specfun.g_inverse(n, c * means, clip=True)
    return DeterministicPath("unbiased", t, vals, n, T, r, start)


def _check_path(path: DeterministicPath, n, T, r, start=0.0):
    if abs(path.T - T) > 1e-12 * T or path.r != r or path.start != start:
        raise ValueError("deterministic path does not match (T, r)")
    if not (path.times[0] == 0.0 and abs(path.times[-1] - T) <= 1e-12 * T):
        raise ValueError("path grid must span [0, T]")


def _path_g_integral(n, path: DeterministicPath) -> float:
    c = specfun.g_coefficient(n)
    if c == 0:
        return 0.0
    return float(_trapezoid_rows(c * specfun.phi_at(path.values), path.times))


def small_time_kernel(n: int, T: float, r: float, path: DeterministicPath) -> KernelValue:
    """prefactor * exp(int_0^T g(r_t) dt), no sampling."""
    specfun._check_dim(n)
    _check_path(path, n, T, r)
    logv = log_gaussian_prefactor(n, T, r) + _path_g_integral(n, path)
    return KernelValue(math.exp(logv), Method.SMALL_TIME)


def series_terms(n: int, T: float, r: float, K: int, path: DeterministicPath,
                 cfg: Optional[McConfig] = None) -> List[McEstimate]:
    """Estimates of E[D^k] / k! for k = 0..K over one shared set of bridges,
    D = int_0^T (g(R_t) - g(r_t)) dt on the path's grid."""
    if int(K) != K or K < 0:
        raise ValueError("K must be an integer >= 0")
    specfun._check_dim(n)
    _check_path(path, n, T, r)
    cfg = cfg or McConfig()
    terms = [McEstimate(1.0, 0.0, cfg.paths)]
    if K == 0:
        return terms
    c = specfun.g_coefficient(n)
    if c == 0:
        return terms + [McEstimate(0.0, 0.0, cfg.paths) for _ in range(K)]
    func = PathFunctional(lambda R: c * specfun.phi_at(R))
    D = sample_functionals(n, T, 0.0, r, func, cfg, grid=path.times) - _path_g_integral(n, path)
    powk = np.ones_like(D)
    for k in range(1, K + 1):
        powk = powk * D / k
        terms.append(summarize(powk, cfg.antithetic))
    return terms


def series_kernel(n: int, T: float, r: float, K: int, path: DeterministicPath,
                  cfg: Optional[McConfig] = None) -> KernelValue:
    """Partial sum to order K of the series expansion around ``path``.

    The per-path partial sums sum_k D^k / k! are averaged, so the standard
    error accounts for the correlation between the moment estimates.
    """
    if int(K) != K or K < 0:
        raise ValueError("K must be an integer >= 0")
    specfun._check_dim(n)
    _check_path(path, n, T, r)
    cfg = cfg or McConfig()
    base = math.exp(log_gaussian_prefactor(n, T, r) + _path_g_integral(n, path))
    c = specfun.g_coefficient(n)
    if K == 0 or c == 0:
        return KernelValue(base, Method.SERIES, 0.0)
    func = PathFunctional(lambda R: c * specfun.phi_at(R))
    D = sample_functionals(n, T, 0.0, r, func, cfg, grid=path.times) - _path_g_integral(n, path)
    total = np.ones_like(D)
    powk = np.ones_like(D)
    for k in range(1, K + 1):
        powk = powk * D / k
        total = total + powk
    est = summarize(total, cfg.antithetic)
    return KernelValue(base * est.mean, Method.SERIES, base * est.stderr)


def hyperbolic_bessel_small_time(n: int, T: float, x: float, y: float,
                                 path: Optional[DeterministicPath] = None) -> float:
    """Small-time approximation of the hyperbolic Bessel density x -> y with
    the bridge replaced by ``path`` (default: the unbiased x -> y path)."""
    specfun._check_dim(n)
    if x < 0 or not y > 0:
        raise ValueError("need x >= 0 and y > 0")
    if path is None:
        path = unbiased_path(n, T, y, start=x)
    _check_path(path, n, T, y, start=x)
    return math.exp(hyperbolic_bessel_log_factor(n, T, x, y) + _path_g_integral(n, path))


def radial_sym_small_time(profile: RadialProfile, n: int, T: float, r: float, grid=None,
                          *, exponentiate: bool = False) -> KernelValue:
    """First-order small-time expansion on a radially symmetric space:
    leading factor * (1 + int_0^T E[f(R_t)] dt), f the bridge integrand.

    ``exponentiate=True`` returns leading factor * exp(int_0^T E[f(R_t)] dt)
    instead, which agrees to the same order in T and is exact whenever f is
    constant.
    """
    specfun._check_dim(n)
    if not (T > 0 and r > 0):
        raise ValueError("need T > 0 and r > 0")
    lead = (0.5 * (n - 1) * profile.log_ratio(r) - r * r / (2 * T)
            - 0.5 * n * math.log(2 * math.pi * T))
    func = radial_functional(profile, n)
    if func.constant is not None:
        corr = func.constant * T
    else:
        t = _grid_or_default(T, grid)
        means = np.empty_like(t)
        means[0] = float(func(np.array([0.0]))[0])
        means[-1] = float(func(np.array([r]))[0])
        means[1:-1] = origin_bridge_means(func, n, T, r, t[1:-1])
        corr = float(_trapezoid_rows(means, t))
    factor = math.exp(corr) if exponentiate else 1.0 + corr
    if not factor >= 0:
        raise ValueError("first-order correction drives the kernel negative; T too large")
    return KernelValue(math.exp(lead) * factor, Method.SMALL_TIME)
