"""Special functions and quadrature used by every kernel evaluator.

Only what the heat-kernel code needs lives here: the Gamma function, the
modified Bessel function I_nu (through its integral over [0, pi]), the bounded
potential ``phi(x) = 1/sinh(x)^2 - 1/x^2`` with its scaled companion ``g``, and
a small adaptive quadrature engine (composite Gauss-Legendre panels, with
tanh-sinh for endpoint singularities).
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import QuadratureError

__all__ = [
    "QuadratureSpec",
    "gamma_fn",
    "log_gamma",
    "bessel_i",
    "bessel_i_scaled",
    "bessel_i_series",
    "tilted_sine_integral",
    "phi",
    "phi_at",
    "g_fn",
    "g_coefficient",
    "g_inverse",
    "integrate",
    "gauss_legendre",
    "composite_nodes",
    "log_sinh",
    "x_over_sinh",
    "log_x_over_sinh",
]

GL_ORDER = 32


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and scheme for :func:`integrate`."""

    abs_tol: float = 1e-13
    rel_tol: float = 1e-11
    max_panels: int = 4000
    scheme: str = "gauss_legendre_panels"

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_panels < 1:
            raise ValueError("max_panels must be >= 1")
        if self.scheme not in ("gauss_legendre_panels", "tanh_sinh"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")


DEFAULT_SPEC = QuadratureSpec()


# --------------------------------------------------------------------------
# Gamma
# --------------------------------------------------------------------------

def gamma_fn(x: float) -> float:
    if not x > 0:
        raise ValueError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


def log_gamma(x: float) -> float:
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


# --------------------------------------------------------------------------
# Gauss-Legendre machinery
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def gauss_legendre(order: int = GL_ORDER):
    """Nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_nodes(a, b, panels: int, order: int = GL_ORDER):
    """Composite Gauss-Legendre nodes/weights on [a, b].

    ``a`` and ``b`` may be arrays of equal shape ``S``; the result then has
    shape ``S + (panels * order,)`` so that many intervals can be integrated
    in one vectorised pass.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    x, w = gauss_legendre(order)
    u = (np.arange(panels)[:, None] + x[None, :]).ravel() / panels
    wu = np.tile(w, panels) / panels
    h = (b - a)[..., None]
    return a[..., None] + h * u, h * wu


# --------------------------------------------------------------------------
# Adaptive integration
# --------------------------------------------------------------------------

def _checked(f, x):
    y = np.asarray(f(x), dtype=float)
    if y.shape != np.shape(x):
        y = np.broadcast_to(y, np.shape(x))
    if np.isnan(y).any():
        raise QuadratureError("integrand returned NaN")
    return y


def _find_cutoff(f, a, abs_tol, envelope):
    """Right end for a semi-infinite range: first point where the envelope
    (or |f| itself, when no envelope is given) drops below abs_tol/10."""
    thresh = abs_tol / 10.0
    step = 1.0
    x = a + step
    for _ in range(200):
        if envelope is not None:
            small = envelope(x) < thresh
        else:
            probe = x + np.array([0.0, 0.25, 0.5, 1.0]) * step
            small = bool(np.all(np.abs(_checked(f, probe)) < thresh))
        if small:
            return x
        step *= 2.0
        x = a + step
        if not math.isfinite(x):
            break
    raise QuadratureError("could not truncate the semi-infinite range")


def _gl_panel(f, a, b):
    x, w = gauss_legendre(GL_ORDER)
    h = b - a
    m = 0.5 * (a + b)
    nodes = np.concatenate([a + h * x, a + 0.5 * h * x, m + 0.5 * h * x])
    vals = _checked(f, nodes)
    n = len(x)
    whole = h * np.dot(w, vals[:n])
    halves = 0.5 * h * (np.dot(w, vals[n:2 * n]) + np.dot(w, vals[2 * n:]))
    return halves, abs(halves - whole)


def _integrate_gl(f, a, b, spec, points):
    cuts = [a] + sorted(p for p in (points or ()) if a < p < b) + [b]
    heap = []
    total = 0.0
    err = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        est, e = _gl_panel(f, lo, hi)
        heapq.heappush(heap, (-e, lo, hi, est))
        total += est
        err += e
    panels = len(heap)
    while err > max(spec.abs_tol, spec.rel_tol * abs(total)):
        if panels >= spec.max_panels:
            raise QuadratureError(
                f"tolerance not met within {spec.max_panels} panels "
                f"(estimate {total:.6g}, error {err:.3g})"
            )
        neg_e, lo, hi, est = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise QuadratureError("panel width underflow")
        total -= est
        err += neg_e
        for l2, h2 in ((lo, mid), (mid, hi)):
            e2_est, e2 = _gl_panel(f, l2, h2)
            heapq.heappush(heap, (-e2, l2, h2, e2_est))
            total += e2_est
            err += e2
        panels += 1
    # Re-sum to shed accumulated rounding from the running updates.
    return math.fsum(item[3] for item in heap)


def _integrate_tanh_sinh(f, a, b, spec):
    half = 0.5 * (b - a)
    tmax = 4.5
    prev = None
    h = 0.5
    for _level in range(min(spec.max_panels, 14)):
        t = np.arange(-tmax, tmax + 0.5 * h, h)
        s = 0.5 * math.pi * np.sinh(t)
        # distance from the nearer endpoint, computed without cancellation
        dist = (b - a) / (1.0 + np.exp(np.abs(2 * s)))
        x = np.where(t < 0, a + dist, b - dist)
        w = h * half * 0.5 * math.pi * np.cosh(t) / np.cosh(s) ** 2
        keep = (dist > 0) & (w > 0)
        val = float(np.dot(w[keep], _checked(f, x[keep])))
        if prev is not None and abs(val - prev) <= max(spec.abs_tol, spec.rel_tol * abs(val)):
            return val
        prev = val
        h *= 0.5
    raise QuadratureError("tanh-sinh did not converge")


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    spec: Optional[QuadratureSpec] = None,
    *,
    envelope: Optional[Callable[[float], float]] = None,
    points: Optional[Sequence[float]] = None,
) -> float:
    """Integrate a vectorised ``f`` over ``[a, b]``.

    ``b`` may be ``math.inf``; the range is then cut where ``envelope`` (a
    monotone bound on |f|) falls below ``spec.abs_tol / 10``.  ``points`` are
    interior breakpoints for the panel scheme.

    Raises :class:`QuadratureError` if the tolerance cannot be met or ``f``
    produces NaN.
    """
    spec = spec or DEFAULT_SPEC
    a = float(a)
    b = float(b)
    if math.isnan(a) or math.isnan(b) or a == math.inf:
        raise ValueError("bad integration limits")
    if b < a:
        return -integrate(f, b, a, spec, envelope=envelope, points=points)
    if a == b:
        return 0.0
    if b == math.inf:
        b = _find_cutoff(f, a, spec.abs_tol, envelope)
    if spec.scheme == "tanh_sinh":
        return _integrate_tanh_sinh(f, a, b, spec)
    return _integrate_gl(f, a, b, spec, points)


# --------------------------------------------------------------------------
# Elementary helpers
# --------------------------------------------------------------------------

def log_sinh(x):
    """log(sinh x) for x > 0 without overflow."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        big = x + np.log1p(-np.exp(-2.0 * np.maximum(x, 1e-300))) - math.log(2.0)
        small = np.log(np.sinh(np.minimum(x, 1.0)))
    out = np.where(x > 1.0, big, small)
    return out if out.ndim else float(out)


def x_over_sinh(x):
    """x / sinh(x), with the value 1 at x = 0 and no overflow for large x."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        mid = ax / np.sinh(ax)
        big = 2.0 * ax * np.exp(-ax) / (-np.expm1(-2.0 * ax))
    out = np.where(ax < 1e-8, 1.0 - ax * ax / 6.0, np.where(ax > 20.0, big, mid))
    return out if out.ndim else float(out)



def log_x_over_sinh(x):
    """log(x / sinh x) for x >= 0, finite for every finite x."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        far = np.log(np.maximum(x, 1.0)) - log_sinh(np.maximum(x, 1.0))
        near = np.log(x_over_sinh(np.minimum(x, 1.0)))
    out = np.where(x > 1.0, far, near)
    return out if out.ndim else float(out)

# --------------------------------------------------------------------------
# phi and g
# --------------------------------------------------------------------------

# Laurent tail of 1/sinh^2 x - 1/x^2 = sum_k c_k x^(2k)
_PHI_SERIES = (
    -1.0 / 3.0,
    1.0 / 15.0,
    -2.0 / 189.0,
    1.0 / 675.0,
    -2.0 / 10395.0,
    1382.0 / 58046625.0,
)


def _sinh_minus_x(x):
    # series for x <= 1, terms up to x^19 keep full double precision
    x2 = x * x
    term = x * x2 / 6.0
    acc = term.copy()
    for k in range(2, 10):
        term = term * x2 / ((2 * k) * (2 * k + 1))
        acc = acc + term
    return acc


def phi_at(x):
    """phi(x) = 1/sinh(x)^2 - 1/x^2 for x >= 0 (vectorised).

    x = 0 returns the limit -1/3.  Abs. error stays near 1e-16 on (0, inf).
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.isnan(x).any():
        raise ValueError("phi requires x >= 0")
    out = np.empty_like(x)
    tiny = x < 1e-2
    mid = (~tiny) & (x <= 1.0)
    big = x > 1.0

    xt = x[tiny]
    x2 = xt * xt
    acc = np.zeros_like(xt)
    for c in reversed(_PHI_SERIES):
        acc = acc * x2 + c
    out[tiny] = acc

    xm = x[mid]
    sm = np.sinh(xm)
    out[mid] = -_sinh_minus_x(xm) * (sm + xm) / (xm * xm * sm * sm)

    xb = x[big]
    e = np.exp(-2.0 * xb)
    out[big] = 4.0 * e / (1.0 - e) ** 2 - 1.0 / (xb * xb)
    return out if out.ndim else float(out)


def phi(x):
    """phi(x) = 1/sinh(x)^2 - 1/x^2, defined for x > 0.

    Increasing on (0, inf) and confined to [-1/3, 0).
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError("phi requires x > 0")
    return phi_at(arr)


def g_coefficient(n: int) -> float:
    """-(n-1)(n-3)/8, the factor multiplying phi in g."""
    return -(n - 1) * (n - 3) / 8.0


def g_fn(n: int, r):
    """g(r) = -((n-1)(n-3)/8) * phi(r).

    Monotone in r (decreasing for n >= 4, increasing for n = 2), with
    |g| <= |(n-1)(n-3)|/24.
    """
    _check_dim(n)
    return g_coefficient(n) * phi(r)


def _check_dim(n):
    if int(n) != n or n < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {n}")


def g_inverse(n: int, y, *, clip: bool = False):
    """Solve g(r) = y for r > 0 by bisection (vectorised over ``y``).

    ``y`` must lie strictly between g(inf) = 0 and g(0+) = -(n-1)(n-3)/8 * (-1/3).
    With ``clip=True`` values at or beyond the limits are mapped to the
    corresponding end (0 or a large radius) instead of raising; this is for
    callers whose ``y`` comes from quadrature and can graze the limits.
    """
    _check_dim(n)
    if n == 3:
        raise ValueError("g vanishes identically for n = 3 and has no inverse")
    c = g_coefficient(n)
    y = np.asarray(y, dtype=float)
    target = y / c  # phi(r) = target, target in (-1/3, 0)
    inside = (target > -1.0 / 3.0) & (target < 0.0)
    if not clip and not np.all(inside):
        raise ValueError("y outside the open range of g")
    tgt = np.clip(target, -1.0 / 3.0, -1e-300)
    # phi(r) ~ -1/r^2 for large r gives a safe upper bracket
    hi = np.maximum(2.0, 2.0 / np.sqrt(-tgt))
    lo = np.zeros_like(tgt)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        above = phi_at(mid) > tgt
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        if np.all(hi - lo <= 4e-16 * hi):
            break
    r = 0.5 * (lo + hi)
    r = np.where(target <= -1.0 / 3.0, 0.0, r)
    r = np.where(target >= 0.0, np.inf, r)
    return r if r.ndim else float(r)


# --------------------------------------------------------------------------
# Modified Bessel I_nu
# --------------------------------------------------------------------------

def _tilted_cut(kappa):
    # beyond this angle e^{kappa (cos xi - 1)} < e^{-80}
    with np.errstate(divide="ignore"):
        return np.minimum(math.pi, 20.0 / np.sqrt(np.maximum(kappa, 1e-300)))


def tilted_sine_integral(kappa, power: int, panels: int = 8):
    """S(kappa) = int_0^pi exp(kappa (cos xi - 1)) sin(xi)^power dxi.

    Vectorised over ``kappa >= 0`` for integer ``power >= 0``.  The exponential
    is pre-scaled by e^{-kappa}, so the result stays O(kappa^{-(power+1)/2})
    instead of overflowing.
    """
    if int(power) != power or power < 0:
        raise ValueError("tilted_sine_integral needs an integer power >= 0")
    kappa = np.asarray(kappa, dtype=float)
    if np.any(kappa < 0):
        raise ValueError("kappa must be >= 0")
    cut = _tilted_cut(kappa)
    xi, w = composite_nodes(np.zeros_like(kappa), cut, panels)
    vals = np.exp(-2.0 * kappa[..., None] * np.sin(0.5 * xi) ** 2)
    if power:
        vals = vals * np.sin(xi) ** int(power)
    out = np.sum(vals * w, axis=-1)
    return out if out.ndim else float(out)


def _bessel_prefactor_log(nu, z):
    # log z - log 2 rather than log(z/2): z/2 underflows for subnormal z
    return nu * (np.log(z) - math.log(2.0)) - math.lgamma(nu + 0.5) - 0.5 * math.log(math.pi)


def bessel_i_scaled(nu: float, z):
    """e^{-z} I_nu(z) for z >= 0, vectorised over z.

    Uses the integral representation
    I_nu(z) = (z/2)^nu / (sqrt(pi) Gamma(nu + 1/2)) int_0^pi e^{z cos xi} sin^{2 nu} xi dxi.
    Requires 2*nu to be a non-negative integer (all orders arising from integer
    dimensions); use :func:`bessel_i` for general orders.
    """
    if nu < 0:
        raise ValueError("nu must be >= 0")
    two_nu = 2.0 * nu
    if two_nu != int(two_nu):
        z_arr = np.asarray(z, dtype=float)
        vals = np.vectorize(lambda zz: _bessel_i_scaled_adaptive(nu, zz, DEFAULT_SPEC))(z_arr)
        return vals if vals.ndim else float(vals)
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("bessel_i is only implemented for z >= 0")
    s = tilted_sine_integral(z, int(two_nu))
    with np.errstate(divide="ignore"):
        logpre = _bessel_prefactor_log(nu, np.where(z > 0, z, 1.0))
    out = np.exp(logpre) * s
    if nu == 0:
        out = np.where(z > 0, out, 1.0)
    else:
        out = np.where(z > 0, out, 0.0)
    return out if out.ndim else float(out)


def _bessel_i_scaled_adaptive(nu, z, spec):
    if z < 0:
        raise ValueError("bessel_i is only implemented for z >= 0")
    if z == 0:
        return 1.0 if nu == 0 else 0.0

    def f(xi):
        return np.exp(-2.0 * z * np.sin(0.5 * xi) ** 2) * np.sin(xi) ** (2 * nu)

    cut = float(_tilted_cut(z))
    two_nu = 2 * nu
    if two_nu == int(two_nu) and spec.scheme == "gauss_legendre_panels":
        s = integrate(f, 0.0, cut, spec)
    else:
        ts = QuadratureSpec(spec.abs_tol, spec.rel_tol, spec.max_panels, "tanh_sinh")
        s = integrate(f, 0.0, cut, ts)
        if cut < math.pi:
            s += integrate(f, cut, math.pi, ts)
    return math.exp(_bessel_prefactor_log(nu, z)) * s


def bessel_i(nu: float, z: float, spec: Optional[QuadratureSpec] = None) -> float:
    """Modified Bessel function I_nu(z), nu >= 0, z >= 0, by adaptive quadrature
    of its integral representation.  Returns ``inf`` past double range."""
    if nu < 0:
        raise ValueError("nu must be >= 0")
    z = float(z)
    scaled = _bessel_i_scaled_adaptive(nu, z, spec or DEFAULT_SPEC)
    if z > 700:
        with np.errstate(over="ignore"):
            return float(np.exp(math.log(scaled) + z)) if scaled > 0 else 0.0
    return scaled * math.exp(z)


def bessel_i_series(nu: float, z: float, tol: float = 1e-17) -> float:
    """Ascending series sum_k (z/2)^{2k+nu} / (k! Gamma(k+nu+1)); a cross-check
    for moderate z."""
    if z < 0 or nu < 0:
        raise ValueError("bessel_i_series requires nu, z >= 0")
    if z == 0:
        return 1.0 if nu == 0 else 0.0
    half = 0.5 * z
    term = math.exp(nu * (math.log(z) - math.log(2.0)) - math.lgamma(nu + 1.0))
    total = term
    k = 0
    while True:
        k += 1
        term *= half * half / (k * (k + nu))
        total += term
        if term <= tol * total:
            return total
        if k > 10000:
            raise QuadratureError("Bessel series did not converge")
