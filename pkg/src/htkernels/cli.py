"""Command-line front end: ``htk eval``, ``htk verify`` and ``htk profile``.

Options fall back to HTK_* environment variables, then to built-in defaults.
Exit status: 0 success, 1 check failure, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import fundsol, kernels, verify
from .group import GroupPoint, HTypeGroup, group_from_json, heisenberg, quaternionic
from .quadrature import QuadratureConfig

KERNELS = (
    "heat",
    "modified",
    "thick",
    "bg",
    "composite",
    "poisson_par",
    "poisson_ell",
    "fundsol_conf",
    "fundsol_nonconf",
    "thick_fund",
    "folland",
    "riesz_neg",
)


class UsageError(Exception):
    pass


def parse_group(text: str) -> HTypeGroup:
    """``h<n>`` (Heisenberg group of dimension 2n+1), ``quat``, or a JSON file {m, k, J}."""
    text = text.strip()
    low = text.lower()
    if low in ("quat", "quaternionic"):
        return quaternionic()
    if low.startswith("h") and low[1:].isdigit():
        return heisenberg(int(low[1:]))
    path = Path(text)
    if path.is_file():
        return group_from_json(path.read_text())
    raise UsageError(f"unknown group {text!r}; use h1, h2, quat or a JSON descriptor path")


def _vector(text: str | None, size: int, name: str) -> np.ndarray:
    if text is None:
        return np.zeros(size)
    try:
        vals = np.array([float(v) for v in text.split(",")], dtype=float)
    except ValueError:
        raise UsageError(f"--{name} must be a comma-separated list of numbers") from None
    if vals.size != size:
        raise UsageError(f"--{name} needs {size} components, got {vals.size}")
    return vals


def _require(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required for kernel {args.kernel}")


def _evaluate(args, G: HTypeGroup, cfg: QuadratureConfig) -> tuple:
    """Return (value, error_estimate or None)."""
    z = _vector(args.z, G.m, "z")
    sg = _vector(args.sigma, G.k, "sigma")
    g = GroupPoint(z, sg)
    k = args.kernel

    def with_err(res):
        return res.value, res.error

    if k == "heat":
        _require(args, "t")
        return with_err(kernels.heat_kernel(G, g, args.t, cfg, full_output=True))
    if k == "modified":
        _require(args, "s", "t")
        return with_err(kernels.modified_kernel(G, args.s, g, args.t, cfg, full_output=True))
    if k == "thick":
        _require(args, "s", "t", "y")
        return with_err(kernels.thick_kernel(G, args.s, g, args.t, args.y, cfg, full_output=True))
    if k == "bg":
        _require(args, "t", "w")
        w = np.array([float(v) for v in args.w.split(",")])
        w2 = np.array([float(v) for v in args.w2.split(",")]) if args.w2 else np.zeros_like(w)
        s2 = _vector(args.sigma2, G.k, "sigma2")
        n = args.n if args.n is not None else float(w.size)
        if not args.w2 and n != w.size:
            # fractional dimension: only |w| enters when the pole sits at the origin
            return with_err(kernels.bg_kernel_scalars(n, G.k, float(w @ w), 0.0, 0.0,
                                                      float(np.linalg.norm(sg - s2)), args.t, cfg))
        return with_err(kernels.bg_kernel(n, G.k, w, sg, w2, s2, args.t, cfg, full_output=True))
    if k == "composite":
        _require(args, "s", "tau", "t")
        return with_err(kernels.composite_kernel(G, args.s, g, args.tau, args.t, cfg, full_output=True))
    if k == "poisson_par":
        _require(args, "s", "t", "y")
        return kernels.poisson_kernel_parabolic(G, args.s, g, args.t, args.y, args.variant, cfg), None
    if k == "poisson_ell":
        _require(args, "s", "y")
        return kernels.poisson_kernel_elliptic(G, args.s, g, args.y, args.variant, cfg), None
    if k == "fundsol_conf":
        _require(args, "s")
        return fundsol.fundamental_conformal(G, args.s, g, args.method or "closed_form", cfg), None
    if k == "fundsol_nonconf":
        _require(args, "s")
        return fundsol.fundamental_nonconformal(G, args.s, g, args.method or "direct_integral", cfg), None
    if k == "thick_fund":
        _require(args, "s", "y")
        return fundsol.thick_fundamental(G, args.s, g, args.y, args.method or "closed_form", cfg), None
    if k == "folland":
        return fundsol.folland_kaplan(G, g), None
    if k == "riesz_neg":
        _require(args, "s")
        return fundsol.riesz_kernel_negative(G, args.s, g, args.method or "direct_integral", cfg), None
    raise UsageError(f"unknown kernel {k!r}")


def _emit(records: list, fmt: str, out) -> None:
    if fmt == "json":
        for r in records:
            out.write(json.dumps(r, sort_keys=True) + "\n")
        return
    buf = io.StringIO()
    fields = list(records[0].keys()) if records else []
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\r\n")
    writer.writeheader()
    for r in records:
        writer.writerow({k: (json.dumps(v) if isinstance(v, (dict, list)) else v) for k, v in r.items()})
    out.write(buf.getvalue())


def cmd_eval(args, out) -> int:
    G = parse_group(args.group)
    cfg = QuadratureConfig()
    value, err = _evaluate(args, G, cfg)
    record = {
        "kernel": args.kernel,
        "group": args.group,
        "z": args.z,
        "sigma": args.sigma,
        "s": args.s,
        "t": args.t,
        "tau": args.tau,
        "y": args.y,
        "method": args.method,
        "variant": args.variant if args.kernel.startswith("poisson") else None,
        "value": value,
        "error_estimate": err,
    }
    _emit([record], args.format, out)
    return 0


def cmd_verify(args, out) -> int:
    suites = []
    for item in args.suite or ["all"]:
        suites.extend(x.strip() for x in item.split(",") if x.strip())
    names = "all" if "all" in suites else suites
    if names != "all":
        unknown = [n for n in names if n not in verify.REGISTRY]
        if unknown:
            raise UsageError(f"unknown suite(s): {', '.join(unknown)}")
    groups = [parse_group(g) for g in (args.group or [args.default_group])]
    reports = verify.run_suite(
        names, groups, QuadratureConfig(), tolerance_scale=args.tolerance_scale, threads=args.threads or (os.cpu_count() or 1), seed=args.seed
    )
    if not args.timing:
        for r in reports:
            r.wall_time = 0.0
    if args.format == "json":
        for r in reports:
            out.write(r.to_json() + "\n")
    else:
        rows = [json.loads(r.to_json()) for r in reports]
        _emit(rows, "csv", out)
    return 0 if verify.suite_passed(reports) else 1


def gauge_sphere_points(radius: float, samples: int) -> list:
    """(u, |z|, |sigma|) with |z|^4 = N^4 (1 - u^2) and 16 |sigma|^2 = N^4 u^2."""
    us = np.linspace(0.0, 1.0, samples)
    return [(float(u), radius * (1.0 - u * u) ** 0.25, radius * radius * u / 4.0) for u in us]


def cmd_profile(args, out) -> int:
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    if not args.gauge_radius > 0:
        raise UsageError("--gauge-radius must be positive")
    s = args.s
    if not 0 < s <= 1:
        raise UsageError("--s must lie in (0, 1]")
    G = parse_group(args.group)
    cfg = QuadratureConfig()
    rows = []
    for u, zn, sn in gauge_sphere_points(args.gauge_radius, args.samples):
        g = GroupPoint(np.r_[zn, np.zeros(G.m - 1)], np.r_[sn, np.zeros(G.k - 1)])
        if s == 1.0:
            nonconf = fundsol.heat_time_integral(G, g, cfg)
        else:
            nonconf = fundsol.fundamental_nonconformal(G, s, g, "auto", cfg)
        conf = fundsol.fundamental_conformal(G, s, g, "closed_form", cfg)
        rows.append({"u": u, "z_norm": zn, "sigma_norm": sn, "nonconformal": nonconf, "conformal": conf})
    _emit(rows, args.format, out)
    if args.plot:
        _plot_profile(rows, s, args.plot)
    return 0


def _plot_profile(rows: list, s: float, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    u = [r["u"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(u, [r["nonconformal"] for r in rows], "o-", label="non-conformal")
    ax.plot(u, [r["conformal"] for r in rows], "s--", label="conformal")
    ax.set_xlabel("u  (|z|^4 = N^4 (1-u^2), 16|sigma|^2 = N^4 u^2)")
    ax.set_ylabel("fundamental solution")
    ax.set_title(f"gauge sphere profile, s = {s:g}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _env(name: str, default):
    return os.environ.get(f"HTK_{name}", default)


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError("must be a positive number")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="htk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    fmt_default = _env("FORMAT", "json")

    pe = sub.add_parser("eval", help="evaluate a kernel or fundamental solution at a point")
    pe.add_argument("--kernel", required=True, choices=KERNELS)
    pe.add_argument("--group", default=_env("GROUP", "h1"))
    pe.add_argument("--z")
    pe.add_argument("--sigma")
    pe.add_argument("--s", type=float)
    pe.add_argument("--t", type=float)
    pe.add_argument("--tau", type=float)
    pe.add_argument("--y", type=float)
    pe.add_argument("--n", type=float, help="dimension for the bg kernel")
    pe.add_argument("--w", help="first variable of the bg kernel")
    pe.add_argument("--w2", help="pole in the first variable of the bg kernel")
    pe.add_argument("--sigma2", help="pole in the centre variable of the bg kernel")
    pe.add_argument("--method")
    pe.add_argument("--variant", default="nonconformal", choices=("nonconformal", "conformal"))
    pe.add_argument("--format", default=fmt_default, choices=("json", "csv"))
    pe.set_defaults(func=cmd_eval)

    pv = sub.add_parser("verify", help="run verification checks")
    pv.add_argument("--suite", action="append", help="check name, comma list, or 'all' (repeatable)")
    pv.add_argument("--group", action="append", help="group name or JSON descriptor path (repeatable)")
    pv.add_argument("--tolerance-scale", type=_positive_float, default=_positive_float(_env("TOLERANCE_SCALE", "1.0")))
    pv.add_argument("--threads", type=int, default=int(_env("THREADS", "1")), help="worker threads (0 = auto)")
    pv.add_argument("--seed", type=int, default=int(_env("SEED", "0")) if _env("SEED", None) else None)
    pv.add_argument("--format", default=fmt_default, choices=("json", "csv"))
    pv.add_argument("--timing", action="store_true",
                    help="report measured wall times (otherwise 0, so output is reproducible)")
    pv.set_defaults(func=cmd_verify, default_group=_env("GROUP", "h1"))

    pp = sub.add_parser("profile", help="fundamental solutions around a gauge sphere (CSV)")
    pp.add_argument("--s", type=float, required=True)
    pp.add_argument("--gauge-radius", type=float, default=1.0)
    pp.add_argument("--samples", type=int, default=9)
    pp.add_argument("--group", default=_env("GROUP", "h1"))
    pp.add_argument("--format", default=_env("FORMAT", "csv"), choices=("json", "csv"))
    pp.add_argument("--plot", metavar="FILE", help="also render the profile to an image file")
    pp.set_defaults(func=cmd_profile)
    return parser


def main(argv: list | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args, sys.stdout)
    except verify.UnknownCheckError as exc:
        print(f"error: unknown suite {exc.args[0]!r}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

if __name__ == "__main__":
    sys.exit(main())
