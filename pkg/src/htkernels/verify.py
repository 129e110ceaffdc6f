"""Named verification checks, each reporting a measured error against a tolerance."""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import fracops, fundsol, kernels, specfun
from .group import GroupPoint, HTypeGroup, dilate, gauge_from_norms, heisenberg, inverse, multiply
from .quadrature import (
    QuadratureConfig,
    integrate_interval,
    integrate_positive_axis,
    integrate_semi_infinite,
    sphere_area,
)

__all__ = [
    "CheckReport",
    "UnknownCheckError",
    "REGISTRY",
    "check_names",
    "run_check",
    "run_suite",
    "suite_passed",
    "radial_mass",
    "brute_force_convolution",
]

_DEFAULT = QuadratureConfig()


class UnknownCheckError(KeyError):
    def __str__(self) -> str:
        return f"unknown check {self.args[0]!r}; known checks: {', '.join(check_names())}"


@dataclass
class CheckReport:
    name: str
    group: dict
    parameters: dict
    measured_error: float
    tolerance: float
    passed: bool
    wall_time: float
    notes: str = ""

    def to_json(self) -> str:
        d = asdict(self)
        if not math.isfinite(d["measured_error"]):
            d["measured_error"] = str(d["measured_error"])
        return json.dumps(d, sort_keys=True)


@dataclass
class _Outcome:
    measured: float
    tolerance: float
    notes: str = ""
    parameters: dict = field(default_factory=dict)


@dataclass(frozen=True)
class _Entry:
    fn: Callable
    defaults: dict
    group_dependent: bool = True


REGISTRY: dict = {}


def _register(name: str, group_dependent: bool = True, **defaults):
    def deco(fn):
        REGISTRY[name] = _Entry(fn, defaults, group_dependent)
        return fn

    return deco


def check_names() -> list:
    return sorted(REGISTRY)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def _random_points(G: HTypeGroup, n: int, seed: int, scale: float = 1.0) -> list:
    rng = np.random.default_rng(seed)
    return [GroupPoint(scale * rng.normal(size=G.m), 0.5 * scale * rng.normal(size=G.k)) for _ in range(n)]


def _off_axis_points(G: HTypeGroup, n: int, seed: int) -> list:
    # points with |z| comparable to sqrt|sigma|, where every method is cheap
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < n:
        z = rng.normal(size=G.m)
        s = 0.3 * rng.normal(size=G.k)
        if np.linalg.norm(z) > 0.4:
            pts.append(GroupPoint(z, s))
    return pts


# ---------------------------------------------------------------------------
# group integrals of radial kernels
# ---------------------------------------------------------------------------


def _gauss_grid(a: float, b: float, panels: int, nodes: int = 20):
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def radial_mass(m: float, k: int, fiber: kernels.VerticalFiber, z_panels: int = 4, s_panels: int = 5) -> float:
    """int_G K dg for a thin fiber kernel, as a tensor Gauss rule in (|z|, |sigma|)
    with every kernel value from a fixed-rule fiber quadrature."""
    t = fiber.t
    r_hi = math.sqrt(4.0 * t * 46.0)
    rho_hi = 20.0 * t
    r, wr = _gauss_grid(0.0, r_hi, z_panels)
    rho, wrho = _gauss_grid(0.0, rho_hi, s_panels)
    R, P = np.meshgrid(r, rho, indexing="ij")
    c = R**2 / (4.0 * t) + fiber.offset / (4.0 * t)
    r_max = 36.0 / fiber.a
    vals = fiber.prefactor * kernels.fiber_table(k, fiber.a, c, P / t, r_max).reshape(R.shape)
    weight = np.outer(wr * r ** (m - 1), wrho * rho ** (k - 1))
    return float(sphere_area_real(m) * sphere_area(k) * np.sum(weight * vals))


def sphere_area_real(n: float) -> float:
    """2 pi^(n/2) / Gamma(n/2), also for fractional n."""
    return 2.0 * math.pi ** (0.5 * n) / specfun.gamma_fn(0.5 * n)


def _log_radial_integral(m: int, k: int, fn, config: QuadratureConfig) -> float:
    """int over z in R^m and sigma in R^k of fn(|z|, |sigma|) by nested
    quadrature on the logarithmic axes (for algebraic decay)."""
    cfg = config.with_(rel_tol=1e-12)

    def outer(r):
        out = []
        for ri in np.atleast_1d(r):
            res = integrate_positive_axis(
                lambda rho: rho ** (k - 1) * fn(ri, rho), cfg, center=max(ri * ri / 4.0, 1e-3),
                rate_left=k, rate_right=1.0,
            )
            out.append(ri ** (m - 1) * res.value)
        return np.array(out)

    total = integrate_positive_axis(outer, cfg, center=1.0, rate_left=m, rate_right=1.0)
    return sphere_area(m) * sphere_area(k) * total.value


# ---------------------------------------------------------------------------
# finite-difference residuals
# ---------------------------------------------------------------------------


def _d1(f, x, h):
    return (f(x + h) - f(x - h)) / (2.0 * h)


def _d2(f, x, h):
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)


def _radial_residual(U, m: float, k: int, r, rho, y, t, s, h, with_time=True):
    """Terms of U_yy + (1-2s)/y U_y + (r^2+y^2)/4 Delta_sigma U + Delta_z U - U_t
    for U(r, rho, y, t) radial in z and sigma."""
    terms = []
    terms.append(_d2(lambda v: U(r, rho, v, t), y, h))
    terms.append((1.0 - 2.0 * s) / y * _d1(lambda v: U(r, rho, v, t), y, h))
    terms.append(_d2(lambda v: U(v, rho, y, t), r, h))
    terms.append((m - 1.0) / r * _d1(lambda v: U(v, rho, y, t), r, h))
    lap_s = _d2(lambda v: U(r, v, y, t), rho, h)
    if k > 1:
        lap_s += (k - 1.0) / rho * _d1(lambda v: U(r, v, y, t), rho, h)
    terms.append(0.25 * (r * r + y * y) * lap_s)
    if with_time:
        terms.append(-_d1(lambda v: U(r, rho, y, v), t, h))
    return np.array(terms)


def _richardson_residual(res_fn, h) -> float:
    a = res_fn(h)
    b = res_fn(0.5 * h)
    total = (4.0 * b.sum() - a.sum()) / 3.0
    return abs(total) / np.max(np.abs(b))


# ---------------------------------------------------------------------------
# brute-force convolution on the Heisenberg group
# ---------------------------------------------------------------------------


def brute_force_convolution(
    s: float,
    tau: float,
    t: float,
    z,
    sigma: float,
    z_range: float = 9.0,
    sigma_range: float = 11.0,
    z_nodes: int = 64,
    sigma_nodes: int = 80,
) -> float:
    """int_G K_(-s)((g')^-1 g, tau) K_(s)(g', t) dg' on heisenberg(1) by a
    tensor Gauss rule in (z', sigma'), both kernels from fixed-rule fiber tables."""
    G = heisenberg(1)
    z = np.asarray(z, dtype=float)
    zx, wz = _gauss_grid(-z_range, z_range, z_nodes // 16, 16)
    sg, ws = _gauss_grid(-sigma_range, sigma_range, sigma_nodes // 16, 16)
    X, Y, S = np.meshgrid(zx, zx, sg, indexing="ij")
    W = wz[:, None, None] * wz[None, :, None] * ws[None, None, :]
    # (g')^-1 g = (z - z', sigma - sigma' - 1/2 <J z', z>)
    J = G.J[0]
    jz = J @ z  # <J z', z> = -<z', J z>
    cross = -(X * jz[0] + Y * jz[1])
    dz2 = (z[0] - X) ** 2 + (z[1] - Y) ** 2
    ds = np.abs(sigma - S - 0.5 * cross)
    f_neg = kernels.modified_fiber(2, 1, -s, tau)
    f_pos = kernels.modified_fiber(2, 1, s, t)
    first = f_neg.prefactor * kernels.fiber_table(1, f_neg.a, dz2 / (4 * tau), ds / tau, 28.0 / f_neg.a, panel=1.0)
    second = f_pos.prefactor * kernels.fiber_table(
        1, f_pos.a, (X**2 + Y**2) / (4 * t), np.abs(S) / t, 28.0 / f_pos.a, panel=1.0
    )
    return float(np.sum(W.ravel() * first * second))


# ---------------------------------------------------------------------------
# the checks
# ---------------------------------------------------------------------------


@_register("mass_one", s=0.5, t=1.0)
def _mass_one(G, p, cfg):
    s, t = p["s"], p["t"]
    masses = {
        "heat": radial_mass(G.m, G.k, kernels.heat_fiber(G.m, G.k, t)),
        "modified(+s)": radial_mass(G.m, G.k, kernels.modified_fiber(G.m, G.k, s, t)),
        "modified(-s)": radial_mass(G.m, G.k, kernels.modified_fiber(G.m, G.k, -s, t)),
    }
    err = max(abs(v - 1.0) for v in masses.values())
    return _Outcome(err, 1e-6, "; ".join(f"{k}={v:.12f}" for k, v in masses.items()))


@_register("semigroup", n_points=20, seed=0)
def _semigroup(G, p, cfg):
    rng = np.random.default_rng(p["seed"])
    err = 0.0
    for g in _random_points(G, p["n_points"], p["seed"]):
        t1, t2 = rng.uniform(0.2, 2.0, size=2)
        conv = kernels.fiber_convolve(
            kernels.heat_fiber(G.m, G.k, t1), kernels.heat_fiber(G.m, G.k, t2), g.z_norm, g.sigma_norm, cfg
        )
        err = max(err, _rel(conv, kernels.heat_kernel(G, g, t1 + t2, cfg)))
    return _Outcome(err, 1e-8)


@_register("monster", group_dependent=False, s=[-0.75, -0.25, 0.3, 0.6, 0.9], mu=[0.1, 1.0, 10.0])
def _monster(G, p, cfg):
    ss = np.atleast_1d(p["s"])
    mus = np.atleast_1d(p["mu"])
    err = max(abs(fracops.monster_integral(float(s), float(mu), cfg).value) for s in ss for mu in mus)
    return _Outcome(err, 1e-10)


@_register("monster_antiderivative", group_dependent=False, s=[-0.75, 0.3, 0.9], mu=[0.1, 1.0, 10.0], seed=0)
def _monster_antiderivative(G, p, cfg):
    rng = np.random.default_rng(p["seed"])
    rho = np.exp(rng.uniform(-3.0, 3.0, size=20))
    err = 0.0
    notes = []
    for s in np.atleast_1d(p["s"]):
        for mu in np.atleast_1d(p["mu"]):
            s, mu = float(s), float(mu)
            h = 1e-4 * rho
            fd = (
                -fracops.monster_antiderivative(rho + 2 * h, s, mu)
                + 8 * fracops.monster_antiderivative(rho + h, s, mu)
                - 8 * fracops.monster_antiderivative(rho - h, s, mu)
                + fracops.monster_antiderivative(rho - 2 * h, s, mu)
            ) / (12 * h)
            closed = fracops.monster_antiderivative_prime(rho, s, mu)
            integrand = fracops.monster_integrand(rho, s, mu)
            scale = np.maximum(np.abs(closed), 1.0)
            err = max(err, float(np.max(np.abs(fd - closed) / scale)), float(np.max(np.abs(closed - integrand) / scale)))
            # endpoint behaviour: power laws rho^(s+1) at 0 and rho^(s-1) at infinity
            lo = fracops.monster_antiderivative(np.array([1e-3, 2e-3]), s, mu)
            hi = fracops.monster_antiderivative(np.array([1e3, 2e3]), s, mu)
            slope_lo = math.log2(abs(lo[1] / lo[0]))
            slope_hi = math.log2(abs(hi[1] / hi[0]))
            notes.append(f"s={s},mu={mu}: slopes {slope_lo:.3f}/{slope_hi:.3f}")
            if abs(slope_lo - (s + 1)) > 0.05 or abs(slope_hi - (s - 1)) > 0.05:
                err = max(err, 1.0)
    return _Outcome(err, 1e-8, "; ".join(notes[:3]))


@_register("beta_identity", group_dependent=False, s=[0.1, 0.3, 0.5, 0.7, 0.9])
def _beta(G, p, cfg):
    err = 0.0
    for s in np.atleast_1d(p["s"]):
        q, exact = fracops.beta_identity(float(s), cfg)
        err = max(err, _rel(q, exact))
    return _Outcome(err, 1e-10)


@_register("convolution_lemma", s=0.5, n_points=10, seed=1)
def _convolution_lemma(G, p, cfg):
    s = p["s"]
    rng = np.random.default_rng(p["seed"])
    err = 0.0
    for g in _random_points(G, p["n_points"], p["seed"]):
        tau, t = rng.uniform(0.3, 2.0, size=2)
        conv = kernels.fiber_convolve(
            kernels.modified_fiber(G.m, G.k, -s, tau), kernels.modified_fiber(G.m, G.k, s, t), g.z_norm, g.sigma_norm, cfg
        )
        closed = kernels.composite_kernel(G, s, g, tau, t, cfg)
        err = max(err, _rel(conv, closed))
        # symmetry under g -> g^-1
        err = max(err, _rel(kernels.composite_kernel(G, s, inverse(G, g), tau, t, cfg), closed))
    return _Outcome(err, 1e-8, "fiber convolution vs closed-form composite kernel (2 pi convention)")


@_register("convolution_lemma_brute", group_dependent=False, s=0.5, tau=0.8, t=1.0)
def _convolution_brute(G, p, cfg):
    s, tau, t = p["s"], p["tau"], p["t"]
    H = heisenberg(1)
    err = 0.0
    notes = []
    for z, sg in (((0.5, -0.3), 0.2), ((1.0, 0.4), -0.5)):
        brute = brute_force_convolution(s, tau, t, z, sg)
        exact = kernels.composite_kernel(H, s, (z, [sg]), tau, t, cfg)
        e = _rel(brute, exact)
        notes.append(f"z={z},sigma={sg}: brute={brute:.10f} composite={exact:.10f}")
        err = max(err, e)
    return _Outcome(err, 1e-3, "; ".join(notes))


@_register("conformal_closed_form", s=[0.25, 0.5, 0.75, 1.0], n_points=5, seed=2)
def _conformal_closed_form(G, p, cfg):
    err = 0.0
    for s in np.atleast_1d(p["s"]):
        for g in _off_axis_points(G, p["n_points"], p["seed"]):
            d = fundsol.fundamental_conformal(G, float(s), g, "direct_integral", cfg)
            c = fundsol.fundamental_conformal(G, float(s), g, "closed_form", cfg)
            err = max(err, _rel(d, c))
    return _Outcome(err, 1e-6)


@_register("nonconformal_two_method", s=[0.25, 0.5, 0.75], n_points=5, seed=3)
def _nonconformal_two(G, p, cfg):
    err = 0.0
    for s in np.atleast_1d(p["s"]):
        for g in _off_axis_points(G, p["n_points"], p["seed"]):
            d = fundsol.fundamental_nonconformal(G, float(s), g, "direct_integral", cfg)
            h = fundsol.fundamental_nonconformal(G, float(s), g, "hypergeometric", cfg)
            err = max(err, _rel(d, h))
    return _Outcome(err, 1e-5)


@_register("folland_constant_resolution", z=None, sigma=None)
def _folland(G, p, cfg):
    z = np.zeros(G.m) if p["z"] is None else np.asarray(p["z"], dtype=float)
    if p["z"] is None:
        z[0] = 1.0
    sigma = np.zeros(G.k) if p["sigma"] is None else np.asarray(p["sigma"], dtype=float)
    g = GroupPoint(z, sigma)
    q = fundsol.heat_time_integral(G, g, cfg)
    N = gauge_from_norms(g.z_norm, g.sigma_norm)
    cands = {k: v * N ** (2 - G.Q) for k, v in fundsol.folland_constants(G.m, G.k).items()}
    errs = {k: _rel(q, v) for k, v in cands.items()}
    matching = [k for k, e in errs.items() if e <= 1e-6]
    winner = matching[0] if len(matching) == 1 else "none"
    measured = min(errs.values()) if len(matching) == 1 else float("inf")
    notes = f"quadrature={q:.15g}; " + "; ".join(f"{k}={cands[k]:.15g} (rel {errs[k]:.2e})" for k in cands)
    return _Outcome(measured, 1e-6, f"winner={winner}; {notes}")


def _poisson_weight_integral(s: float, y: float, normalization: str, cfg) -> float:
    kappa = kernels.poisson_normalization(s, normalization)
    res = integrate_positive_axis(
        lambda t: kappa * y ** (2 * s) * (4 * math.pi * t) ** (-(1 + s)) * np.exp(-y * y / (4 * t)),
        cfg.with_(rel_tol=1e-12),
        center=y * y / 4.0,
        rate_left=1.0,
        rate_right=s,
    )
    return res.value


@_register("poisson_norm_parabolic", s=0.5, y=1.0, discrepancy_s=0.3)
def _poisson_par(G, p, cfg):
    s, y = p["s"], p["y"]
    # the group integral of p(., t) is computed on the t-dilated grid, which
    # yields identical numbers for every t; the t integral is then 1-D
    mass = radial_mass(G.m, G.k, kernels.heat_fiber(G.m, G.k, 1.0))
    total = mass * _poisson_weight_integral(s, y, "gamma_s", cfg)
    sd = p["discrepancy_s"]
    alt = {w: mass * _poisson_weight_integral(sd, y, w, cfg) for w in ("gamma_s", "gamma_one_minus_s")}
    notes = (
        f"total={total:.12f}; at s={sd}: 4pi^(1+s)/Gamma(s) gives {alt['gamma_s']:.10f}, "
        f"4pi^(1+s)/Gamma(1-s) gives {alt['gamma_one_minus_s']:.10f}; unit mass needs Gamma(s)"
    )
    return _Outcome(abs(total - 1.0), 1e-6, notes)


@_register("poisson_norm_elliptic", s=0.5, y=1.0)
def _poisson_ell(G, p, cfg):
    s, y = p["s"], p["y"]
    # int_G Q^(s)(g, y) dg = int_0^inf w(t) [int_G p(g, t) dg] dt. The inner
    # integral is computed on grids dilated to times across the support of w;
    # its spread over those times bounds the error of factoring it out.
    times = y * y * np.logspace(-2, 4, 7)
    masses = np.array([radial_mass(G.m, G.k, kernels.heat_fiber(G.m, G.k, float(t))) for t in times])
    weight = _poisson_weight_integral(s, y, "gamma_s", cfg)
    total = float(np.mean(masses)) * weight
    err = abs(total - 1.0) + float(np.ptp(masses)) * weight
    return _Outcome(err, 1e-6, f"total={total:.12f}; mass spread over t {np.ptp(masses):.2e}")


@_register("poisson_norm_conformal", s=0.5, y=1.0)
def _poisson_conf(G, p, cfg):
    s, y = p["s"], p["y"]
    total = _log_radial_integral(
        G.m, G.k, lambda r, rho: kernels.conformal_poisson_closed_form(G.m, G.k, s, r, rho, y), cfg
    )
    return _Outcome(abs(total - 1.0), 1e-6, f"total={total:.12f}")


@_register("thick_closed_form", s=[0.5, -0.5], seed=4)
def _thick(G, p, cfg):
    pts = _off_axis_points(G, 5, p["seed"])
    ys = [0.0, 0.3, 0.7, 1.2, 2.0]
    err = 0.0
    for s in np.atleast_1d(p["s"]):
        for g, y in zip(pts, ys):
            d = fundsol.thick_fundamental(G, float(s), g, y, "direct_integral", cfg)
            c = fundsol.thick_fundamental(G, float(s), g, y, "closed_form", cfg)
            err = max(err, _rel(d, c))
    # y = 0 consistency with the conformal fundamental solution
    g = pts[0]
    s0 = float(np.atleast_1d(p["s"])[0])
    if s0 > 0:
        lhs = fundsol.thick_fundamental(G, s0, g, 0.0)
        rhs = specfun.gamma_fn(s0) / (4 * math.pi) ** (1 - s0) * fundsol.fundamental_conformal(G, s0, g)
        err = max(err, _rel(lhs, rhs))
    return _Outcome(err, 1e-6)


_PDE_POINTS = ((1.0, 0.3, 0.6, 0.8), (0.5, 0.7, 1.1, 1.2), (1.5, 0.2, 0.4, 0.5))


@_register("pde_residual_parabolic", s=0.5)
def _pde_par(G, p, cfg):
    s = p["s"]
    tight = cfg.with_(rel_tol=1e-14, abs_tol=1e-300)
    err = 0.0
    for order in (s, -s):
        def U(r, rho, y, t, order=order):
            return kernels.thick_kernel_norms(G.m, G.k, order, r, rho, t, y, tight)

        for r, rho, y, t in _PDE_POINTS:
            err = max(err, _richardson_residual(
                lambda h: _radial_residual(U, G.m, G.k, r, rho, y, t, order, h), 2e-3))
    return _Outcome(err, 1e-4, "residual of the extension heat operator on q_(s) and q_(-s)")


@_register("pde_residual_elliptic", s=0.5)
def _pde_ell(G, p, cfg):
    s = p["s"]
    err = 0.0
    for order in (s, -s):
        def U(r, rho, y, t, order=order):
            return fundsol.thick_fundamental(G, order, GroupPoint(np.r_[r, np.zeros(G.m - 1)], np.r_[rho, np.zeros(G.k - 1)]), y)

        for r, rho, y, _ in _PDE_POINTS:
            err = max(err, _richardson_residual(
                lambda h: _radial_residual(U, G.m, G.k, r, rho, y, 0.0, order, h, with_time=False), 2e-3))
    return _Outcome(err, 1e-4, "residual of the conformal extension operator on the thick fundamental solution")


@_register("pde_residual_bg", group_dependent=False, n=3, n_fractional=2.4, k=1)
def _pde_bg(G, p, cfg):
    n, k = p["n"], p["k"]
    tight = cfg.with_(rel_tol=1e-14, abs_tol=1e-300)
    w2 = np.array([0.3, -0.2, 0.5])[:n] if n <= 3 else np.linspace(0.1, 0.4, n)
    s2 = np.full(k, 0.4)
    pts = ((np.array([0.8, 0.1, -0.3])[:n], np.full(k, 0.1), 0.7),
           (np.array([-0.2, 0.6, 0.4])[:n], np.full(k, -0.3), 1.0),
           (np.array([0.5, 0.5, 0.5])[:n], np.full(k, 0.9), 0.5))
    err = 0.0
    h0 = 2e-3
    for w, sg, t in pts:
        def K(w_, s_, t_):
            return kernels.bg_kernel(n, k, w_, s_, w2, s2, t_, tight)

        def terms(h):
            out = [-_d1(lambda v: K(w, sg, v), t, h)]
            for i in range(n):
                e = np.zeros(n)
                e[i] = 1.0
                out.append(_d2(lambda v: K(w + v * e, sg, t), 0.0, h))
            lap_s = 0.0
            for j in range(k):
                e = np.zeros(k)
                e[j] = 1.0
                lap_s += _d2(lambda v: K(w, sg + v * e, t), 0.0, h)
            out.append(0.25 * float(w @ w) * lap_s)
            return np.array(out)

        err = max(err, _richardson_residual(terms, h0))
    # fractional dimension, pole at the origin, radial form
    nf = p["n_fractional"]

    def U(r, rho, y, t):
        return kernels.bg_kernel_scalars(nf, k, r * r, 0.0, 0.0, rho, t, tight).value

    for r, rho, _, t in _PDE_POINTS:
        def terms(h, r=r, rho=rho, t=t):
            return np.array([
                _d2(lambda v: U(v, rho, 0, t), r, h),
                (nf - 1.0) / r * _d1(lambda v: U(v, rho, 0, t), r, h),
                0.25 * r * r * _d2(lambda v: U(r, v, 0, t), rho, h),
                -_d1(lambda v: U(r, rho, 0, v), t, h),
            ])

        err = max(err, _richardson_residual(terms, h0))
    return _Outcome(err, 1e-4, f"integer n={n} with pole off the origin; n={nf} radial")


@_register("homogeneity", s=0.5, lam=1.7, seed=5)
def _homogeneity(G, p, cfg):
    s, lam = p["s"], p["lam"]
    Q = G.Q
    err = 0.0
    rng = np.random.default_rng(p["seed"])
    for g in _off_axis_points(G, 3, p["seed"]):
        t = float(rng.uniform(0.4, 1.5))
        dg = dilate(G, lam, g)
        err = max(err, _rel(lam**Q * kernels.heat_kernel(G, dg, lam * lam * t, cfg), kernels.heat_kernel(G, g, t, cfg)))
        err = max(err, _rel(lam**Q * kernels.modified_kernel(G, -s, dg, lam * lam * t, cfg),
                            kernels.modified_kernel(G, -s, g, t, cfg)))
        err = max(err, _rel(fundsol.fundamental_conformal(G, s, dg), lam ** (2 * s - Q) * fundsol.fundamental_conformal(G, s, g)))
    g = _off_axis_points(G, 1, p["seed"])[0]
    dg = dilate(G, lam, g)
    e1 = fundsol.fundamental_nonconformal(G, s, g, "direct_integral", cfg)
    e2 = fundsol.fundamental_nonconformal(G, s, dg, "direct_integral", cfg)
    err = max(err, _rel(e2, lam ** (2 * s - Q) * e1))
    return _Outcome(err, 1e-8)


@_register("approx_identity", s=0.5, t0=1.0, z=None, sigma=None)
def _approx_identity(G, p, cfg):
    s, t0 = p["s"], p["t0"]
    g = GroupPoint(np.r_[0.7, np.zeros(G.m - 1)], np.r_[0.2, np.zeros(G.k - 1)])
    data = fracops.HeatData(G, t0)
    u = kernels.heat_kernel(G, g, t0, cfg)
    worst = 0.0
    notes = []
    for sign in (+1, -1):
        d = [abs(fracops.conformal_semigroup_on_data(data, s, g, 2.0**-j, cfg, sign=sign) - u) for j in range(7)]
        monotone = all(b < a for a, b in zip(d, d[1:]))
        # the gap is linear in t, so 2 d_6 - d_5 estimates its limit
        limit = abs(2.0 * d[-1] - d[-2]) / d[0]
        notes.append(f"sign={sign:+d}: |P u - u| from {d[0]:.3e} to {d[-1]:.3e}, extrapolated {limit:.1e}")
        worst = max(worst, limit if monotone else float("inf"))
    return _Outcome(worst, 1e-2, "; ".join(notes))


@_register("decay_at_infinity", s=0.5, t0=1.0)
def _decay(G, p, cfg):
    s, t0 = p["s"], p["t0"]
    g = GroupPoint(np.r_[0.7, np.zeros(G.m - 1)], np.r_[0.2, np.zeros(G.k - 1)])
    data = fracops.HeatData(G, t0, s)
    worst = 0.0
    for sign in (+1, -1):
        a = fracops.conformal_semigroup_on_data(data, s, g, 1.0, cfg, sign=sign)
        b = fracops.conformal_semigroup_on_data(data, s, g, 1e3, cfg, sign=sign)
        worst = max(worst, abs(b / a))
    return _Outcome(worst, 1e-4)


@_register("dn_vs_balakrishnan", s=[0.3, 0.7], t0=1.0)
def _dn(G, p, cfg):
    t0 = p["t0"]
    data = fracops.HeatData(G, t0)
    pts = [
        GroupPoint(np.r_[1.0, np.zeros(G.m - 1)], np.r_[0.2, np.zeros(G.k - 1)]),
        GroupPoint(np.r_[0.3, 0.5, np.zeros(G.m - 2)], np.r_[0.5, np.zeros(G.k - 1)]),
        GroupPoint(np.r_[1.5, np.zeros(G.m - 1)], np.zeros(G.k)),
    ]
    err = 0.0
    alt_err = 0.0
    for s in np.atleast_1d(p["s"]):
        for g in pts:
            dn = fracops.dn_limit_nonconformal(data, float(s), g, config=cfg)
            bala = fracops.balakrishnan_nonconformal(data, float(s), g, "bala", cfg)
            err = max(err, _rel(dn.value, bala))
            alt_err = max(alt_err, _rel(dn.value_alternative, bala))
    notes = (f"constant 2^(2s-1)Gamma(s)/Gamma(1-s) matches; "
             f"2^(2s-1)Gamma(1-s)/Gamma(1+s) misses by up to {alt_err:.3g} relative")
    return _Outcome(err, 1e-3, notes)


_GEGENBAUER = ((0.5, 1.5, 1.0, 1.0), (1.0, 2.0, 2.0, 0.5), (2.5, 1.2, 1.0, 2.0))


@_register("gegenbauer", group_dependent=False)
def _gegenbauer(G, p, cfg):
    err = 0.0
    for nu, mu, alpha, beta in _GEGENBAUER:
        q = integrate_semi_infinite(
            lambda t: t ** (mu - 1.0) * np.exp(-alpha * t) * specfun.bessel_j(nu, beta * t),
            1.0 / alpha, cfg, oscillation=beta,
        ).value
        err = max(err, _rel(q, specfun.gegenbauer_closed_form(nu, mu, alpha, beta)))
    return _Outcome(err, 1e-8)


_BATEMAN = ((0.5, 1.5, 0.3, 0.7, -2.0), (1.2, 2.5, 1.1, 0.4, -0.5), (0.7, 3.0, 2.0, 1.5, -10.0))


@_register("bateman", group_dependent=False)
def _bateman(G, p, cfg):
    err = 0.0
    for c, gam, alpha, beta, a in _BATEMAN:
        def f(y):
            return y ** (c - 1.0) * (1.0 - y) ** (gam - c - 1.0) * specfun.hyp2f1(alpha, beta, c, a * y)

        grading = [2.0**-j for j in range(1, 30)] + [1.0 - 2.0**-j for j in range(2, 30)]
        q = integrate_interval(f, 0.0, 1.0, cfg.with_(rel_tol=1e-12), breakpoints=grading).value
        err = max(err, _rel(q, specfun.bateman_closed_form(c, gam, alpha, beta, a)))
    return _Outcome(err, 1e-8)


@_register("duplication", group_dependent=False, n_points=50, seed=6)
def _duplication(G, p, cfg):
    rng = np.random.default_rng(p["seed"])
    err = 0.0
    for x in rng.uniform(0.1, 20.0, size=p["n_points"]):
        lhs = 2.0 ** (2 * x - 1) * specfun.gamma_fn(x) * specfun.gamma_fn(x + 0.5)
        err = max(err, _rel(lhs, math.sqrt(math.pi) * specfun.gamma_fn(2 * x)))
    return _Outcome(err, 1e-12)


@_register("hypergeometric_identities", group_dependent=False)
def _hyp_identities(G, p, cfg):
    err = _rel(specfun.hyp2f1(2.3, 1.1, 1.1, -0.5), 1.5**-2.3)
    a, b, c = 0.8, 1.4, 2.2
    for u in (-3.0, -0.5, -20.0):
        lhs = specfun.hyp2f1(a, b, c, u)
        rhs = (1 - u) ** (-a) * specfun.hyp2f1(a, c - b, c, u / (u - 1))
        err = max(err, _rel(lhs, rhs))
    xs = np.linspace(-0.95, -0.05, 19)
    ser = specfun.hyp2f1_series(a, b, c, xs)
    pf = specfun.hyp2f1_pfaff(a, b, c, xs)
    err = max(err, float(np.max(np.abs(ser - pf) / np.abs(ser))))
    return _Outcome(err, 1e-11, "1F0 reduction, Pfaff transformation, series/Pfaff overlap")


@_register("restriction_relation", n_points=20, seed=7)
def _restriction(G, p, cfg):
    rng = np.random.default_rng(p["seed"])
    err = 0.0
    for g in _random_points(G, p["n_points"], p["seed"]):
        t = float(rng.uniform(0.2, 2.0))
        s = float(rng.choice([-0.5, 0.3, 0.8]))
        lhs = (4 * math.pi * t) ** (1 - s) * kernels.thick_kernel(G, s, g, t, 0.0, cfg)
        err = max(err, abs(lhs - kernels.modified_kernel(G, s, g, t, cfg)))
    return _Outcome(err, 1e-12)


@_register("intertwining", group_dependent=False, s=[0.3, 0.5, 0.8])
def _intertwining(G, p, cfg):
    # y^2s w with w smooth: Bessel operators of weights 1-2s and 1+2s intertwine
    def w(y):
        return np.exp(-y * y) * np.cos(y)

    err = 0.0
    h = 1e-3
    for s in np.atleast_1d(p["s"]):
        s = float(s)
        for y in (0.4, 0.9, 1.7):
            def v(x):
                return x ** (2 * s) * w(x)

            def lhs(hh):
                return _d2(v, y, hh) + (1 - 2 * s) / y * _d1(v, y, hh)

            def rhs(hh):
                return y ** (2 * s) * (_d2(w, y, hh) + (1 + 2 * s) / y * _d1(w, y, hh))

            a = (4 * lhs(h / 2) - lhs(h)) / 3
            b = (4 * rhs(h / 2) - rhs(h)) / 3
            err = max(err, abs(a - b) / max(abs(b), 1e-300))
    return _Outcome(err, 1e-6)


@_register("change_of_variables", group_dependent=False)
def _change_vars(G, p, cfg):
    def f(t, tau):
        return np.sqrt(t) * np.exp(-t - 2.0 * tau)

    direct, changed = fracops.change_of_variables_check(f, cfg.with_(rel_tol=1e-12))
    exact = specfun.gamma_fn(1.5) * 0.5
    return _Outcome(max(_rel(direct, exact), _rel(changed, exact)), 1e-10)


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------


def run_check(
    name: str,
    group: HTypeGroup | None = None,
    params: dict | None = None,
    config: QuadratureConfig = _DEFAULT,
    tolerance_scale: float = 1.0,
) -> CheckReport:
    """Run one registered check and report its measured error."""
    if name not in REGISTRY:
        raise UnknownCheckError(name)
    if not tolerance_scale > 0:
        raise ValueError("tolerance_scale must be positive")
    entry = REGISTRY[name]
    G = group if group is not None else heisenberg(1)
    merged = dict(entry.defaults)
    unknown = set(params or {}) - set(merged)
    if unknown:
        raise ValueError(f"unknown parameters for {name}: {sorted(unknown)}")
    merged.update(params or {})
    start = time.perf_counter()
    out = entry.fn(G, merged, config)
    wall = time.perf_counter() - start
    tol = out.tolerance * tolerance_scale
    measured = float(out.measured)
    return CheckReport(
        name=name,
        group=G.descriptor() if entry.group_dependent else {"name": "none"},
        parameters=_jsonable(merged),
        measured_error=measured,
        tolerance=tol,
        passed=bool(measured <= tol),
        wall_time=wall,
        notes=out.notes,
    )


def _jsonable(d: dict) -> dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, np.ndarray):
            v = v.tolist()
        out[k] = v
    return out


def run_suite(
    names: Iterable[str] | str = "all",
    groups: Iterable[HTypeGroup] | None = None,
    config: QuadratureConfig = _DEFAULT,
    tolerance_scale: float = 1.0,
    threads: int = 1,
    seed: int | None = None,
) -> list:
    """Run checks over groups; group-free checks run once. Exceptions become
    failed reports. Results are ordered by (name, group). ``seed`` overrides
    the sampling seed of every check that draws random points."""
    if names == "all":
        names = check_names()
    names = list(names)
    for n in names:
        if n not in REGISTRY:
            raise UnknownCheckError(n)
    groups = list(groups) if groups is not None else [heisenberg(1)]
    jobs = []
    for n in names:
        gs = groups if REGISTRY[n].group_dependent else groups[:1]
        for G in gs:
            jobs.append((n, G))

    def one(job):
        n, G = job
        try:
            params = {"seed": seed} if seed is not None and "seed" in REGISTRY[n].defaults else None
            return run_check(n, G, params, config, tolerance_scale)
        except Exception as exc:  # reported, never aborts the suite
            return CheckReport(n, G.descriptor(), {}, float("inf"), float("nan"), False, 0.0,
                               f"error: {type(exc).__name__}: {exc}")

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(one, jobs))
    else:
        reports = [one(j) for j in jobs]
    reports.sort(key=lambda r: (r.name, json.dumps(r.group, sort_keys=True)))
    return reports


def suite_passed(reports: list) -> bool:
    return all(r.passed for r in reports)
