"""Invariant suites shared by ``hyperheat validate`` and the test-suite."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from . import bessel, expansions, kernels_closed as kc, kernels_mc as mc, specfun
from .specfun import QuadratureSpec

__all__ = ["Check", "SUITES", "run_suite", "normalization_integral", "order_ratios"]


@dataclass(frozen=True)
class Check:
    name: str
    observed: float
    bound: str
    passed: bool

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name}: observed {self.observed:.6g}, bound {self.bound}"


def _within(name, observed, tol) -> Check:
    return Check(name, observed, f"<= {tol:g}", bool(observed <= tol))


def normalization_integral(n: int, T: float, density: Callable[[float], float],
                           rel_tol: float = 1e-10) -> float:
    """Vol(S^{n-1}) int_0^inf p(T, r) sinh^{n-1} r dr for a radial density."""
    r_max = (n - 1) * T + 14.0 * math.sqrt(T) + 2.0

    def f(r):
        r = np.atleast_1d(r)
        vals = np.array([density(float(x)) for x in r])
        return vals * np.exp((n - 1) * specfun.log_sinh(np.maximum(r, 1e-300)))

    spec = QuadratureSpec(abs_tol=1e-14, rel_tol=rel_tol)
    return kc.sphere_volume(n) * specfun.integrate(f, 0.0, r_max, spec)


def order_ratios(n: int = 2, r: float = 1.0, Ts=(0.5, 0.25)) -> Dict[str, float]:
    """error(T0)/error(T1) of the small-time expansion against McKean, for
    the unbiased and straight-line paths."""
    out = {}
    for kind in ("unbiased", "straight_line"):
        errs = []
        for T in Ts:
            truth = kc.heat_kernel_mckean(T, r).value
            path = (expansions.unbiased_path(n, T, r) if kind == "unbiased"
                    else expansions.straight_line_path(T, r, n=n))
            errs.append(abs(expansions.small_time_kernel(n, T, r, path).value / truth - 1.0))
        out[kind] = errs[0] / errs[1]
    return out


def _normalization() -> List[Check]:
    checks = []
    for T in (0.25, 1.0, 4.0):
        v2 = normalization_integral(2, T, lambda r: kc.heat_kernel_mckean(T, r).value)
        checks.append(_within(f"n=2 mckean mass T={T:g}", abs(v2 - 1), 1e-5))
        v3 = normalization_integral(3, T, lambda r: kc.heat_kernel_h3(T, r).value)
        checks.append(_within(f"n=3 exact3 mass T={T:g}", abs(v3 - 1), 1e-5))
    return checks


def _consistency() -> List[Check]:
    checks = []
    for T, r in ((1.0, 1.0), (2.0, 0.5), (0.25, 3.0)):
        d = abs(kc.gruet(3, T, r).value / kc.heat_kernel_h3(T, r).value - 1)
        checks.append(_within(f"gruet vs exact3 T={T:g} r={r:g}", d, 1e-8))
    worst = 0.0
    for T in (0.5, 1.0, 2.0):
        for r in (0.5, 1.0, 2.0):
            worst = max(worst, abs(kc.gruet(2, T, r).value / kc.heat_kernel_mckean(T, r).value - 1))
    checks.append(_within("gruet vs mckean n=2 grid", worst, 1e-6))
    v = kc.heat_kernel_h3(1.0, 1.0).value
    m3 = mc.heat_kernel_mc(3, 1.0, 1.0, mc.McConfig(paths=1000))
    checks.append(_within("mc n=3 vs exact3", abs(m3.value / v - 1), 1e-12))
    m2 = mc.heat_kernel_mc(2, 1.0, 1.0, mc.McConfig(paths=20_000, seed=1))
    z = abs(m2.value - kc.heat_kernel_mckean(1.0, 1.0).value) / m2.stderr
    checks.append(_within("mc n=2 vs mckean (stderr units)", z, 3.0))
    return checks


def _order() -> List[Check]:
    ratios = order_ratios()
    u, s = ratios["unbiased"], ratios["straight_line"]
    return [
        Check("unbiased path error ratio T=0.5/0.25", u, "in [3, 5]", 3 <= u <= 5),
        Check("straight-line error ratio T=0.5/0.25", s, "in [1.6, 2.6]", 1.6 <= s <= 2.6),
    ]


def _bessel() -> List[Check]:
    checks = []
    spec = QuadratureSpec(abs_tol=1e-15, rel_tol=1e-12)
    for n, t, x in ((2, 1.0, 0.0), (3, 0.5, 1.0), (5, 0.3, 2.0)):
        mass = specfun.integrate(lambda y: bessel.bessel_transition_density(n, t, x, np.maximum(y, 1e-300)),
                                 0.0, x + 12 * math.sqrt(t) + 2, spec)
        checks.append(_within(f"p_B mass n={n} t={t:g} x={x:g}", abs(mass - 1), 1e-10))
    for n in (2, 3, 4, 5):
        s, u, x, y = 0.4, 0.7, 1.2, 0.8
        ck = specfun.integrate(
            lambda p: bessel.bessel_transition_density(n, s, x, np.maximum(p, 1e-300))
            * bessel.bessel_transition_density(n, u, np.maximum(p, 1e-300), y),
            0.0, 12.0, spec)
        d = abs(ck / bessel.bessel_transition_density(n, s + u, x, y) - 1)
        checks.append(_within(f"p_B Chapman-Kolmogorov n={n}", d, 1e-6))
    worst = 0.0
    for z in np.geomspace(1e-3, 30, 40):
        closed = math.sqrt(2 / (math.pi * z)) * math.sinh(z)
        worst = max(worst, abs(specfun.bessel_i(0.5, z) / closed - 1))
    checks.append(_within("I_1/2 closed form", worst, 1e-10))
    return checks


SUITES: Dict[str, Callable[[], List[Check]]] = {
    "normalization": _normalization,
    "consistency": _consistency,
    "order": _order,
    "bessel": _bessel,
}


def run_suite(name: str) -> List[Check]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name]()
