"""Command-line interface: ``hyperheat {eval,sweep,compare,validate}``.

Exit codes: 0 success, 1 validation failure, 2 usage, 3 numerical failure,
4 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import expansions, kernels_closed as kc, kernels_mc as mc, radial_profiles, svg, validation
from .errors import NumericalError

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3, 4

METHODS = ("mckean", "exact3", "gruet", "mc_bridge", "series", "small_time")
COMPARE_DIMS = (2, 4, 5, 6)
_CONFIG_KEYS = {"paths": int, "steps": int, "seed": int, "grid": str, "antithetic": None,
                "workers": int, "K": int, "path": str}


class UsageError(Exception):
    pass


def fmt(x: Optional[float]) -> str:
    """12 significant digits, '.' decimal; empty for None."""
    return "" if x is None else format(float(x), ".12g")


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

def read_config(path: str) -> Dict[str, object]:
    """``key=value`` lines, '#' comments, keys as in :data:`_CONFIG_KEYS`."""
    out: Dict[str, object] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        conv = _CONFIG_KEYS[key]
        try:
            if conv is None:
                if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(value)
                out[key] = value.lower() in ("true", "1", "yes")
            else:
                out[key] = conv(value)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return out


def _resolve(args, key, default):
    v = getattr(args, key, None)
    if v is not None:
        return v
    return args._config.get(key, default)


def mc_config(args) -> mc.McConfig:
    seed = _resolve(args, "seed", None)
    if seed is None:
        env = os.environ.get("HYPERHEAT_SEED")
        try:
            seed = int(env) if env else 0
        except ValueError:
            raise UsageError(f"HYPERHEAT_SEED must be an integer, got {env!r}") from None
    try:
        return mc.McConfig(
            paths=_resolve(args, "paths", 100_000),
            steps=_resolve(args, "steps", None),
            seed=seed,
            grid_kind=_resolve(args, "grid", "uniform"),
            antithetic=bool(_resolve(args, "antithetic", False)),
            workers=_resolve(args, "workers", 1),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------

def evaluate(method: str, n: int, T: float, r: float, args) -> kc.KernelValue:
    """Dispatch one (method, n, T, r) evaluation."""
    profile = getattr(args, "profile", None)
    if method == "exact3":
        if n != 3:
            raise UsageError("method exact3 requires --n 3")
        return kc.heat_kernel_h3(T, r)
    if method == "mckean":
        if n != 2:
            raise UsageError("method mckean requires --n 2")
        return kc.heat_kernel_mckean(T, r)
    if method == "gruet":
        return kc.gruet(n, T, r)
    cfg = mc_config(args)
    if method == "mc_bridge":
        if profile is not None:
            if r == 0:
                raise UsageError("--profile needs r > 0")
            return mc.radial_sym_kernel_mc(radial_profiles.parse_profile(profile), n, T, r, cfg)
        return mc.heat_kernel_mc(n, T, r, cfg, limit_at_origin=(r == 0))
    if r == 0:
        raise UsageError(f"method {method} needs r > 0")
    kind = _resolve(args, "path", "unbiased")
    grid = cfg.grid(T)
    if kind == "unbiased":
        path = expansions.unbiased_path(n, T, r, grid)
    elif kind == "straight_line":
        path = expansions.straight_line_path(T, r, grid, n=n)
    else:
        raise UsageError(f"unknown path kind {kind!r}")
    if method == "small_time":
        return expansions.small_time_kernel(n, T, r, path)
    if method == "series":
        return expansions.series_kernel(n, T, r, _resolve(args, "K", 4), path, cfg)
    raise UsageError(f"unknown method {method!r}")


def _r_grid(args) -> np.ndarray:
    if not 0 <= args.r_min < args.r_max:
        raise UsageError("need 0 <= --r-min < --r-max")
    if args.points < 2:
        raise UsageError("--points must be >= 2")
    return np.linspace(args.r_min, args.r_max, args.points)


def _write_text(path: Optional[str], text: str, stdout) -> None:
    if path is None or path == "-":
        stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc}") from exc


def _csv_text(header: Sequence[str], rows: List[Sequence[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_eval(args, stdout) -> int:
    _check_nT(args.n, args.T)
    if not args.r >= 0:
        raise UsageError("--r must be >= 0")
    kv = evaluate(args.method, args.n, args.T, args.r, args)
    _check_finite(kv)
    stdout.write(",".join([args.method, str(args.n), fmt(args.T), fmt(args.r),
                           fmt(kv.value), fmt(kv.stderr)]) + "\n")
    return EXIT_OK


def cmd_sweep(args, stdout) -> int:
    _check_nT(args.n, args.T)
    methods = _method_list(args.methods)
    rows = []
    for r in _r_grid(args):
        for m in methods:
            kv = evaluate(m, args.n, args.T, float(r), args)
            _check_finite(kv)
            rows.append([fmt(r), m, fmt(kv.value), fmt(kv.stderr)])
    _write_text(args.out, _csv_text(["r", "method", "value", "stderr"], rows), stdout)
    return EXIT_OK


def compare_table(n: int, T: float, rs: np.ndarray, grid=None) -> np.ndarray:
    """Rows (r, gruet, small_time_straight, small_time_unbiased)."""
    out = np.empty((rs.size, 4))
    for i, r in enumerate(rs):
        r = float(r)
        out[i, 0] = r
        out[i, 1] = kc.gruet(n, T, r).value
        out[i, 2] = expansions.small_time_kernel(
            n, T, r, expansions.straight_line_path(T, r, grid, n=n)).value
        out[i, 3] = expansions.small_time_kernel(
            n, T, r, expansions.unbiased_path(n, T, r, grid)).value
    return out


def cmd_compare(args, stdout) -> int:
    dims = COMPARE_DIMS if args.n is None else tuple(args.n)
    for n in dims:
        _check_nT(n, args.T)
    rs = _r_grid(args)
    if rs[0] <= 0:
        raise UsageError("compare needs --r-min > 0")
    grid = None if args.steps is None else mc.bessel.make_grid(args.T, args.steps)
    tables = {n: compare_table(n, args.T, rs, grid) for n in dims}
    cols = ["r", "gruet", "small_time_straight", "small_time_unbiased"]
    multi = len(dims) > 1
    rows = []
    for n, tab in tables.items():
        for row in tab:
            rows.append(([str(n)] if multi else []) + [fmt(v) for v in row])
    _write_text(args.out, _csv_text((["n"] if multi else []) + cols, rows), stdout)
    if args.svg:
        panels = [svg.Panel(
            title=f"n = {n}, T = {fmt(args.T)}",
            x=tab[:, 0],
            series={"Gruet": tab[:, 1], "straight line": tab[:, 2], "unbiased path": tab[:, 3]})
            for n, tab in tables.items()]
        _write_text(args.svg, svg.render(panels, x_label="r", y_label="p(T, r)"), stdout)
    return EXIT_OK


def cmd_validate(args, stdout) -> int:
    checks = validation.run_suite(args.suite)
    for c in checks:
        stdout.write(c.line() + "\n")
    ok = all(c.passed for c in checks)
    stdout.write(f"{args.suite}: {'all checks passed' if ok else 'FAILED'}\n")
    return EXIT_OK if ok else EXIT_VALIDATION


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------

def _check_nT(n, T):
    if n < 2:
        raise UsageError("--n must be >= 2")
    if not T > 0:
        raise UsageError("--T must be > 0")


def _check_finite(kv):
    if not math.isfinite(kv.value) or (kv.stderr is not None and not math.isfinite(kv.stderr)):
        raise NumericalError("non-finite kernel value")


def _method_list(text: str) -> List[str]:
    methods = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise UsageError(f"unknown method(s) {bad}; choose from {', '.join(METHODS)}")
    return methods


def _dims(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension list {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hyperheat", description="Heat kernels on hyperbolic space.")
    p.add_argument("--config", help="key=value file with defaults for MC flags")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def mc_flags(sp):
        sp.add_argument("--paths", type=int)
        sp.add_argument("--steps", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--grid", choices=("uniform", "geometric"))
        sp.add_argument("--antithetic", action="store_const", const=True, default=None)
        sp.add_argument("--workers", type=int)
        sp.add_argument("--K", type=int, help="series order (method series)")
        sp.add_argument("--path", choices=("unbiased", "straight_line"),
                        help="deterministic path for small_time/series")
        sp.add_argument("--profile", help="euclidean, hyperbolic or scaled:k (mc_bridge only)")
        sp.add_argument("--config", default=argparse.SUPPRESS,
                        help="key=value file with defaults for MC flags")

    e = sub.add_parser("eval", help="evaluate one kernel value")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--T", type=float, required=True)
    e.add_argument("--r", type=float, required=True)
    e.add_argument("--method", choices=METHODS, required=True)
    mc_flags(e)

    s = sub.add_parser("sweep", help="CSV over an r grid")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--T", type=float, required=True)
    s.add_argument("--r-min", type=float, default=0.1)
    s.add_argument("--r-max", type=float, default=5.0)
    s.add_argument("--points", type=int, default=101)
    s.add_argument("--methods", default="gruet")
    s.add_argument("--out")
    mc_flags(s)

    c = sub.add_parser("compare", help="Gruet vs small-time expansions")
    c.add_argument("--n", type=_dims, help="dimension or comma list (default 2,4,5,6)")
    c.add_argument("--T", type=float, default=1.0)
    c.add_argument("--r-min", type=float, default=0.1)
    c.add_argument("--r-max", type=float, default=5.0)
    c.add_argument("--points", type=int, default=100)
    c.add_argument("--steps", type=int)
    c.add_argument("--out")
    c.add_argument("--svg")

    v = sub.add_parser("validate", help="run an invariant suite")
    v.add_argument("--suite", choices=sorted(validation.SUITES), required=True)
    return p


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        args._config = read_config(args.config) if args.config else {}
        handler = {"eval": cmd_eval, "sweep": cmd_sweep,
                   "compare": cmd_compare, "validate": cmd_validate}[args.command]
        return handler(args, stdout)
    except UsageError as exc:
        stderr.write(f"hyperheat: error: {exc}\n")
        return EXIT_USAGE
    except (NumericalError, FloatingPointError, OverflowError) as exc:
        stderr.write(f"hyperheat: numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except (IOError, OSError) as exc:
        stderr.write(f"hyperheat: I/O error: {exc}\n")
        return EXIT_IO
    except ValueError as exc:
        stderr.write(f"hyperheat: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
