"""Reference heat kernels: exact n = 3, McKean (n = 2), Gruet (all n), and the
closed-form transition density of the order-3 hyperbolic Bessel process.

All kernels are densities with respect to the Riemannian volume form and are
parametrised by (T, r) with r the geodesic distance.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import specfun
from .errors import QuadratureError
from .specfun import QuadratureSpec

__all__ = [
    "Method",
    "KernelValue",
    "heat_kernel_h3",
    "heat_kernel_mckean",
    "gruet",
    "hyperbolic_bessel_density_exact3",
    "sphere_volume",
    "log_gaussian_prefactor",
]


class Method(str, enum.Enum):
    MCKEAN = "mckean"
    EXACT3 = "exact3"
    GRUET = "gruet"
    MC_BRIDGE = "mc_bridge"
    SERIES = "series"
    SMALL_TIME = "small_time"

    def __str__(self):
        return self.value


_STOCHASTIC = {Method.MC_BRIDGE, Method.SERIES}


@dataclass(frozen=True)
class KernelValue:
    """A kernel evaluation; ``stderr`` is set exactly for Monte Carlo methods."""

    value: float
    method: Method
    stderr: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not self.value >= 0:
            raise ValueError(f"kernel value must be >= 0, got {self.value}")
        if (self.stderr is not None) != (self.method in _STOCHASTIC):
            raise ValueError(f"stderr must be given iff the method is stochastic ({self.method})")
        if self.stderr is not None and not self.stderr >= 0:
            raise ValueError("stderr must be >= 0")

    def __float__(self):
        return float(self.value)


def _check_T_r(T, r):
    if not T > 0:
        raise ValueError(f"T must be > 0, got {T}")
    if not r >= 0:
        raise ValueError(f"r must be >= 0, got {r}")


def sphere_volume(n: int) -> float:
    """Vol(S^{n-1}) = 2 pi^{n/2} / Gamma(n/2)."""
    return 2.0 * math.pi ** (0.5 * n) / math.gamma(0.5 * n)


def log_gaussian_prefactor(n: int, T: float, r: float) -> float:
    """log of e^{-(n-1)^2 T/8} (r/sinh r)^{(n-1)/2} e^{-r^2/2T} / (2 pi T)^{n/2}."""
    return (-(n - 1) ** 2 * T / 8.0
            + 0.5 * (n - 1) * specfun.log_x_over_sinh(r)
            - r * r / (2.0 * T)
            - 0.5 * n * math.log(2.0 * math.pi * T))


def heat_kernel_h3(T: float, r: float) -> KernelValue:
    """Exact H^3 heat kernel e^{-r^2/2T} e^{-T/2} (r / sinh r) / (2 pi T)^{3/2}."""
    _check_T_r(T, r)
    return KernelValue(math.exp(log_gaussian_prefactor(3, T, r)), Method.EXACT3)


# --------------------------------------------------------------------------
# McKean
# --------------------------------------------------------------------------

def _mckean_integral_scaled(T, r, spec):
    """e^{r^2/2T} * int_r^inf xi e^{-xi^2/2T} / sqrt(cosh xi - cosh r) dxi.

    Substituting xi = r + u^2 removes the inverse square-root singularity;
    cosh(r + u^2) - cosh r = 2 sinh(r + u^2/2) sinh(u^2/2).
    """

    def f(u):
        u2 = u * u
        xi = r + u2
        with np.errstate(divide="ignore", invalid="ignore"):
            log_den = 0.5 * (math.log(2.0) + specfun.log_sinh(r + 0.5 * u2)
                             + specfun.log_sinh(np.maximum(0.5 * u2, 1e-300)))
            val = 2.0 * u * xi * np.exp(-u2 * (2.0 * r + u2) / (2.0 * T) - log_den)
        return np.where(u > 0, val, 0.0)

    # exponent u^2 (2r + u^2) / 2T reaches 92 (factor 1e-40) at u_max
    u_max = math.sqrt(-r + math.sqrt(r * r + 184.0 * T)) * 1.05 + 1e-3
    # breakpoint at the Gaussian width keeps early panels well resolved
    width = min(math.sqrt(T / max(r, 1e-3)), (2 * T) ** 0.25)
    pts = [p for p in (0.5 * width, width, 2 * width, 4 * width) if p < u_max]
    return specfun.integrate(f, 0.0, u_max, spec, points=pts)


def heat_kernel_mckean(T: float, r: float, spec: Optional[QuadratureSpec] = None) -> KernelValue:
    """H^2 heat kernel sqrt(2) e^{-T/8} / (2 pi T)^{3/2} int_r^inf
    xi e^{-xi^2/2T} / sqrt(cosh xi - cosh r) dxi, by quadrature."""
    _check_T_r(T, r)
    spec = spec or QuadratureSpec(abs_tol=1e-15, rel_tol=1e-12)
    integral = _mckean_integral_scaled(T, r, spec)
    logv = (0.5 * math.log(2.0) - T / 8.0 - 1.5 * math.log(2.0 * math.pi * T)
            - r * r / (2.0 * T))
    return KernelValue(math.exp(logv) * integral, Method.MCKEAN)


# --------------------------------------------------------------------------
# Gruet
# --------------------------------------------------------------------------

def _log_cosh_sum(b, r):
    """log(cosh b + cosh r), overflow free."""
    b = np.asarray(b, dtype=float)
    stack = np.stack(np.broadcast_arrays(b, -b, np.full_like(b, r), np.full_like(b, -r)))
    return np.logaddexp.reduce(stack, axis=0) - math.log(2.0)


def _gruet_log_prefactor(n, T):
    return (-(n - 1) ** 2 * T / 8.0 - math.log(math.pi) - 0.5 * n * math.log(2 * math.pi)
            - 0.5 * math.log(T) + math.lgamma(0.5 * (n + 1)))


def _gruet_real_axis(n, T, r, spec):
    """Integrate along b in [0, inf) on panels [kT, (k+1)T] aligned with the zeros
    of sin(pi b / T).  Returns (J, condition) where J excludes the constant
    factor e^{pi^2/2T} and condition = sum|panel| / |sum|."""
    m = 0.5 * (n + 1)
    panel_spec = QuadratureSpec(abs_tol=spec.abs_tol, rel_tol=spec.rel_tol * 1e-2,
                                max_panels=spec.max_panels)
    total = []
    l1 = 0.0
    k = 0
    while True:
        sign = -1.0 if k % 2 else 1.0

        def f(v, k=k, sign=sign):
            b = T * (k + v)
            with np.errstate(divide="ignore"):
                logmag = (-b * b / (2 * T) + specfun.log_sinh(np.maximum(b, 1e-300))
                          - m * _log_cosh_sum(b, r))
            return np.where(b > 0, sign * T * np.sin(math.pi * v) * np.exp(logmag), 0.0)

        part = specfun.integrate(f, 0.0, 1.0, panel_spec, points=[0.25, 0.5, 0.75])
        total.append(part)
        l1 += abs(part)
        k += 1
        b0 = T * k
        log_env = (-b0 * b0 / (2 * T) + float(specfun.log_sinh(b0))
                   - m * float(_log_cosh_sum(b0, r)))
        # sign-alternating panels: the tail is bounded by the next envelope value
        if b0 > math.sqrt(T) and b0 > 1.0 and math.exp(log_env) * T < 1e-22 * l1:
            break
        if k > 100000:
            raise QuadratureError("Gruet panel sum did not terminate")
    J = math.fsum(total)
    l1 = math.fsum(abs(p) for p in total)
    cond = l1 / abs(J) if J != 0 else math.inf
    return J, cond


def _gruet_contour(n, T, r, spec):
    """Same integral with the path pushed up to Im b = pi.

    F(b) = e^{-(b - i pi)^2 / 2T} sinh b / (cosh b + cosh r)^m is analytic on
    0 <= Im b < pi, and the Gruet integral is Im(int_R F)/2.  On Im b = pi,
    F is real between the branch points -r, r (no contribution), the rays
    |s| > r contribute a real integral with the phase sin(pi m), and small
    arcs below +-r + i pi (or one semicircle around both when r is small) are
    integrated numerically.  Returns (J, condition, log_shift); J e^{log_shift}
    is on the scale of :func:`_gruet_real_axis`.
    """
    m = 0.5 * (n + 1)
    merged = r <= 0.5 * min(math.sqrt(2.0 * m * T), 2.5)
    arc_spec = QuadratureSpec(abs_tol=1e-17, rel_tol=spec.rel_tol * 1e-2, max_panels=spec.max_panels)
    log_scale = r * r / (2.0 * T)  # parts are O(e^{-r^2/2T}); work relative to that

    parts = []
    if merged:
        # branch points close together: one lower semicircle around both
        rho = min(math.sqrt(2.0 * m * T), 2.5)

        def circle(theta):
            w = rho * np.exp(1j * theta)
            diff = -2.0 * np.sinh(0.5 * (w + r)) * np.sinh(0.5 * (w - r))
            val = (-np.exp(-w * w / (2 * T) + log_scale) * np.sinh(w)
                   / diff ** m * (1j * w))
            return val.imag

        parts.append(specfun.integrate(circle, math.pi, 2 * math.pi, arc_spec))
    else:
        rho = min(0.75 * r, max(2.0, m) * T / r, 1.5)
        for c in (r, -r):
            def arc(theta, c=c):
                e = np.exp(1j * theta)
                w = c + rho * e
                # cosh r - cosh w in product form; w - c = rho e is exact
                if c > 0:
                    diff = -2.0 * np.sinh(r + 0.5 * rho * e) * np.sinh(0.5 * rho * e)
                else:
                    diff = -2.0 * np.sinh(0.5 * rho * e) * np.sinh(0.5 * rho * e - r)
                # -(w^2 - r^2)/2T without subtracting two large numbers
                expo = -(2.0 * c * rho * e + (rho * e) ** 2) / (2 * T)
                val = -np.exp(expo) * np.sinh(w) / diff ** m * (1j * rho * e)
                return val.imag

            parts.append(specfun.integrate(arc, math.pi, 2 * math.pi, arc_spec))

    sm = math.sin(math.pi * m)
    if abs(sm) > 1e-12:
        def ray(u):
            d = u - r
            log_diff = (math.log(2.0) + specfun.log_sinh(0.5 * (u + r))
                        + specfun.log_sinh(np.maximum(0.5 * d, 1e-300)))
            return np.exp(-d * (u + r) / (2 * T) + specfun.log_sinh(u) - m * log_diff)

        lo = rho if merged else r + rho
        hi = lo + math.sqrt(2.0 * T * 80.0) + 1.0
        ray_val = specfun.integrate(ray, lo, hi, arc_spec, points=[lo + 0.5 * rho, lo + 2 * rho])
        parts.append(2.0 * sm * ray_val)
    J = 0.5 * math.fsum(parts)
    l1 = 0.5 * math.fsum(abs(p) for p in parts)
    cond = l1 / abs(J) if J != 0 else math.inf
    # bring onto the same scale as the real-axis route: multiply by e^{-r^2/2T - pi^2/2T}
    return J, cond, -log_scale - math.pi ** 2 / (2 * T)


def gruet(n: int, T: float, r: float, spec: Optional[QuadratureSpec] = None) -> KernelValue:
    """H^n heat kernel from Gruet's single-integral formula.

    The integral is first taken along the real axis on zero-aligned panels.
    When that sum cancels too heavily for the requested tolerance (small T,
    large r), the integration path is deformed to Im b = pi, where the
    Gaussian factor no longer hides the result under cancellation.  If neither
    route can certify the tolerance a :class:`QuadratureError` is raised.
    """
    if int(n) != n or n < 2:
        raise ValueError("dimension must be an integer >= 2")
    _check_T_r(T, r)
    spec = spec or QuadratureSpec(abs_tol=1e-300, rel_tol=1e-12)
    eps = np.finfo(float).eps
    budget = 100.0 * eps  # rounding error per unit of condition number
    target = max(spec.rel_tol, 1e-14)
    logpre = _gruet_log_prefactor(n, T)

    J, cond = _gruet_real_axis(n, T, r, spec)
    if cond * budget <= target and J > 0:
        return KernelValue(math.exp(logpre + math.pi ** 2 / (2 * T) + math.log(J)), Method.GRUET)
    Jc, cond_c, shift = _gruet_contour(n, T, r, spec)
    if cond_c * budget <= target and Jc > 0:
        return KernelValue(
            math.exp(logpre + math.pi ** 2 / (2 * T) + shift + math.log(Jc)), Method.GRUET)
    raise QuadratureError(
        f"Gruet integral too ill-conditioned at n={n}, T={T}, r={r} "
        f"(cancellation factors {cond:.3g}, {cond_c:.3g})"
    )


# --------------------------------------------------------------------------
# Hyperbolic Bessel process of order 3
# --------------------------------------------------------------------------

def hyperbolic_bessel_density_exact3(t: float, x: float, y):
    """Closed-form transition density of the order-3 hyperbolic Bessel process:
    e^{-t/2} / sqrt(2 pi t) * sinh y / sinh x * (e^{-(x-y)^2/2t} - e^{-(x+y)^2/2t}).

    At x = 0 the 0/0 quotient is replaced by its limit
    e^{-t/2} / sqrt(2 pi t) * sinh y * (2 y / t) e^{-y^2/2t}.
    """
    if not t > 0:
        raise ValueError("t must be > 0")
    if x < 0:
        raise ValueError("x must be >= 0")
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("y must be > 0")
    base = -t / 2.0 - 0.5 * math.log(2 * math.pi * t) + specfun.log_sinh(y)
    if x == 0:
        out = np.exp(base + np.log(2.0 * y / t) - y * y / (2 * t))
    else:
        # e^{-(x-y)^2/2t}(1 - e^{-2xy/t}) / sinh x, stable for small x and large y
        out = np.exp(base - (x - y) ** 2 / (2 * t) - specfun.log_sinh(x)
                     + np.log(-np.expm1(-2.0 * x * y / t)))
    return out if out.ndim else float(out)
