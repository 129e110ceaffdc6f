"""Fractional powers of the horizontal Laplacian applied to heat-kernel data.

Data are u = p(., t0) or u = K_(s)(., t0); the semigroups act on them by
shifting time (or by fiber convolution), so every operator value below is a
one-dimensional quadrature in time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .group import HTypeGroup
from .kernels import (
    PointLike,
    _norms,
    fiber_convolve,
    heat_fiber,
    heat_kernel,
    heat_kernel_dt,
    log_sinhc,
    modified_fiber,
    rcoth_minus_one,
)
from .quadrature import (
    QuadratureConfig,
    QuadResult,
    integrate_interval,
    integrate_positive_axis,
)
from .specfun import gamma_fn

__all__ = [
    "HeatData",
    "balakrishnan_nonconformal",
    "conformal_fractional_apply",
    "conformal_semigroup_on_data",
    "monster_integrand",
    "monster_integral",
    "monster_antiderivative",
    "monster_antiderivative_prime",
    "beta_identity",
    "dn_constant",
    "dn_extension",
    "dn_limit_nonconformal",
    "DNResult",
    "change_of_variables_check",
]

_DEFAULT = QuadratureConfig()


@dataclass(frozen=True)
class HeatData:
    """Initial datum u = p(., t0) (``order=None``) or u = K_(order)(., t0)."""

    group: HTypeGroup
    t0: float
    order: float | None = None

    def __post_init__(self):
        if not self.t0 > 0:
            raise ValueError("t0 must be positive")


def _vec(fn):
    def f(t):
        return np.array([fn(float(ti)) for ti in np.atleast_1d(t)])

    return f


def _check_s(s: float) -> float:
    s = float(s)
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    return s


def _difference_quotient_integral(diff, tail_fn, const: float, s: float, t0: float, config: QuadratureConfig,
                                  tail_rate: float) -> float:
    """int_0^inf t^(-1-s) diff(t) dt where diff(t) = tail_fn(t) - const.

    (0, delta) uses the linear Taylor term of diff, (delta, t0) the
    difference itself, and (t0, inf) splits into tail_fn plus the
    closed-form integral of the constant."""
    delta = 1e-6 * t0
    slope = diff(delta) / delta
    head = slope * delta ** (1.0 - s) / (1.0 - s)

    def mid(v):
        t = np.exp(v)
        return t ** (-s) * np.array([diff(float(ti)) for ti in t])

    body = integrate_interval(mid, math.log(delta), math.log(t0), config).value
    tail = integrate_positive_axis(
        _vec(lambda t: t ** (-1.0 - s) * tail_fn(t)), config, center=t0, rate_right=tail_rate, lower=t0
    ).value
    return head + body + tail - const * t0 ** (-s) / s


def balakrishnan_nonconformal(
    data: HeatData,
    s: float,
    g: PointLike,
    method: str = "bala",
    config: QuadratureConfig = _DEFAULT,
) -> float:
    """Balakrishnan's power of -L applied to u = p(., t0) and evaluated at g.

    ``bala``: -s/Gamma(1-s) int t^(-1-s) (p(g, t+t0) - p(g, t0)) dt.
    ``derivative_form``: -1/Gamma(1-s) int tau^(-s) d/dtau p(g, tau+t0) dtau."""
    s = _check_s(s)
    G, t0 = data.group, data.t0
    if data.order is not None:
        raise ValueError("balakrishnan_nonconformal needs heat-kernel data")
    Q = G.Q
    if method == "bala":
        base = heat_kernel(G, g, t0, config)
        val = _difference_quotient_integral(
            lambda t: heat_kernel(G, g, t + t0, config) - base,
            lambda t: heat_kernel(G, g, t + t0, config),
            base,
            s,
            t0,
            config,
            0.5 * Q + s,
        )
        return -s / gamma_fn(1.0 - s) * val
    if method == "derivative_form":
        f = _vec(lambda t: t ** (-s) * heat_kernel_dt(G, g, t + t0, config))
        res = integrate_positive_axis(f, config, center=t0, rate_left=1.0 - s, rate_right=0.5 * Q + s)
        return -res.value / gamma_fn(1.0 - s)
    raise ValueError(f"unknown method {method!r}")


def conformal_semigroup_on_data(data: HeatData, s: float, g: PointLike, tau: float,
                                config: QuadratureConfig = _DEFAULT, sign: int = -1) -> float:
    """P_(sign s), tau applied to u = K_(s)(., t0) (or p(., t0)) by fiber convolution."""
    G = data.group
    zn, sn = _norms(G, g)
    inner = heat_fiber(G.m, G.k, data.t0) if data.order is None else modified_fiber(G.m, G.k, data.order, data.t0)
    outer = modified_fiber(G.m, G.k, sign * s, tau)
    return fiber_convolve(outer, inner, zn, sn, config)


def conformal_fractional_apply(
    data: HeatData,
    s: float,
    g: PointLike,
    config: QuadratureConfig = _DEFAULT,
) -> float:
    """Conformal fractional power applied to u = K_(s)(., t0):

        -s/Gamma(1-s) int tau^(-1-s) (K_(-s,s)(g, tau, t0) - K_(s)(g, t0)) dtau,

    with P_(-s), tau u = K_(-s,s)(., tau, t0) computed by fiber convolution."""
    s = _check_s(s)
    G, t0 = data.group, data.t0
    if data.order is None:
        data = HeatData(G, t0, s)
    zn, sn = _norms(G, g)
    base = modified_fiber(G.m, G.k, s, t0).evaluate(zn, sn, config).value

    def composite(tau):
        return conformal_semigroup_on_data(data, s, g, tau, config)

    val = _difference_quotient_integral(
        lambda t: composite(t) - base, composite, base, s, t0, config, 0.5 * G.Q + s
    )
    return -s / gamma_fn(1.0 - s) * val


# ---------------------------------------------------------------------------
# the cancellation integral
# ---------------------------------------------------------------------------


def _check_order(s: float, mu: float) -> None:
    if not -1 < s < 1 or s == 0:
        raise ValueError("s must lie in (-1, 1) without 0")
    if not mu > 0:
        raise ValueError("mu must be positive")


def monster_integrand(rho, s: float, mu: float):
    """Integrand of A(s, mu) as a function of rho > 0."""
    rho = np.asarray(rho, dtype=float)
    a = mu / (1.0 + rho)
    b = rho * a
    bracket = (1.0 + s) * rho / (1.0 + rho) * rcoth_minus_one(a) - (1.0 - s) / (1.0 + rho) * rcoth_minus_one(b)
    weight = np.exp((1.0 - s) * log_sinhc(b) + (1.0 + s) * log_sinhc(a))
    return rho ** (s - 1.0) * bracket * weight


def monster_integral(s: float, mu: float, config: QuadratureConfig = _DEFAULT) -> QuadResult:
    """A(s, mu) = int_0^inf monster_integrand d rho, which vanishes identically."""
    _check_order(s, mu)
    return integrate_positive_axis(
        lambda r: monster_integrand(r, s, mu), config, center=1.0, rate_left=1.0 + s, rate_right=1.0 - s
    )


def monster_antiderivative(rho, s: float, mu: float):
    """h_{s,mu}(rho), whose derivative is the integrand of A(s, mu)."""
    _check_order(s, mu)
    rho = np.asarray(rho, dtype=float)
    a = mu / (1.0 + rho)
    b = rho * a
    ratio = np.sinh(b) / np.sinh(a)
    lead = mu / math.sinh(mu)
    inner = lead * rho / (1.0 + rho) ** 2 * (ratio + 2.0 * math.cosh(mu) + 1.0 / ratio) - 1.0
    return lead * ratio**s * inner


def monster_antiderivative_prime(rho, s: float, mu: float):
    """Closed form of h'_{s,mu}(rho) after the hyperbolic simplifications."""
    _check_order(s, mu)
    rho = np.asarray(rho, dtype=float)
    a = mu / (1.0 + rho)
    b = rho * a
    weight = np.exp((1.0 - s) * log_sinhc(b) + (1.0 + s) * log_sinhc(a))
    bracket = 1.0 - s - 2.0 * rho / (1.0 + rho) + mu * rho / (1.0 + rho) ** 2 * (
        (1.0 + s) / np.tanh(a) - (1.0 - s) / np.tanh(b)
    )
    return rho ** (s - 1.0) * weight * bracket


def beta_identity(s: float, config: QuadratureConfig = _DEFAULT) -> tuple:
    """(int_0^inf rho^(s-1)/(1+rho) d rho, Gamma(s) Gamma(1-s))."""
    _check_s(s)
    res = integrate_positive_axis(lambda r: r ** (s - 1.0) / (1.0 + r), config, rate_left=s, rate_right=1.0 - s)
    return res.value, gamma_fn(s) * gamma_fn(1.0 - s)


def change_of_variables_check(f, config: QuadratureConfig = _DEFAULT) -> tuple:
    """Double integral of f(t, tau) over the quadrant, directly and in the
    variables v = t + tau, rho = t / tau (Jacobian v / (1 + rho)^2).

    ``f`` must be vectorized and decay exponentially in both arguments."""
    x, w = np.polynomial.legendre.leggauss(60)

    def inner_direct(t):
        out = []
        for ti in np.atleast_1d(t):
            out.append(integrate_positive_axis(lambda tau: f(np.full_like(tau, ti), tau), config).value)
        return np.array(out)

    direct = integrate_positive_axis(inner_direct, config).value

    def inner_new(v):
        out = []
        for vi in np.atleast_1d(v):
            def g(rho):
                return f(vi * rho / (1.0 + rho), vi / (1.0 + rho)) * vi / (1.0 + rho) ** 2

            out.append(integrate_positive_axis(g, config).value)
        return np.array(out)

    changed = integrate_positive_axis(inner_new, config).value
    return direct, changed


# ---------------------------------------------------------------------------
# Dirichlet-to-Neumann
# ---------------------------------------------------------------------------


def dn_constant(s: float, which: str = "derived") -> float:
    """Constant c in (-L)^s f = -c lim y^(1-2s) dF/dy for the extension with
    Poisson normalization 4 pi^(1+s)/Gamma(s).

    ``derived``: 2^(2s-1) Gamma(s)/Gamma(1-s), from expanding F near y = 0.
    ``gamma_one_minus_s``: 2^(2s-1) Gamma(1-s)/Gamma(1+s)."""
    if which == "derived":
        return 2.0 ** (2 * s - 1) * gamma_fn(s) / gamma_fn(1.0 - s)
    if which == "gamma_one_minus_s":
        return 2.0 ** (2 * s - 1) * gamma_fn(1.0 - s) / gamma_fn(1.0 + s)
    raise ValueError(f"unknown constant {which!r}")


def dn_extension(data: HeatData, s: float, g: PointLike, y: float, config: QuadratureConfig = _DEFAULT,
                 value: bool = True) -> tuple:
    """(F(g, y), y^(1-2s) dF/dy (g, y)) for the extension of u = p(., t0):

        F = (y^2/4)^s / Gamma(s) int t^(-1-s) exp(-y^2/4t) p(g, t+t0) dt.

    Both are computed with p(g, t0) subtracted, since the kernel has unit
    mass in t for every y; the y-derivative is taken under the integral."""
    s = _check_s(s)
    if not y > 0:
        raise ValueError("y must be positive")
    G, t0 = data.group, data.t0
    base = heat_kernel(G, g, t0, config)
    cache: dict = {}

    def diff(t):
        if t not in cache:
            cache[t] = heat_kernel(G, g, t + t0, config) - base
        return cache[t]

    a = 0.25 * y * y
    pref = a**s / gamma_fn(s)

    def weight(t):
        return t ** (-1.0 - s) * np.exp(-a / t)

    fv = _vec(lambda t: weight(t) * diff(t))
    dv = _vec(lambda t: weight(t) * (2.0 * s / y - y / (2.0 * t)) * diff(t))
    cfg = config.with_(rel_tol=min(config.rel_tol, 1e-11))
    center = max(a, 1e-3 * t0)
    F = base + pref * integrate_positive_axis(fv, cfg, center=center, rate_left=1.0, rate_right=s).value if value else None
    dF = pref * integrate_positive_axis(dv, cfg, center=center, rate_left=1.0, rate_right=s).value
    return F, y ** (1.0 - 2.0 * s) * dF


@dataclass(frozen=True)
class DNResult:
    value: float
    value_alternative: float
    raw_limit: float
    sequence: tuple
    extrapolation_change: float
    converged: bool


def dn_limit_nonconformal(
    data: HeatData,
    s: float,
    g: PointLike,
    y0: float = 0.5,
    levels: int = 9,
    config: QuadratureConfig = _DEFAULT,
) -> DNResult:
    """Richardson-extrapolated -c lim_{y->0} y^(1-2s) dF/dy along y0 2^-j.

    Near y = 0 the quantity behaves like D0 + c1 y^(2-2s) + c2 y^2 +
    c3 y^(4-2s) + ..., and those exponents are eliminated in turn."""
    s = _check_s(s)
    ys = [y0 * 2.0 ** (-j) for j in range(levels)]
    seq = [dn_extension(data, s, g, y, config, value=False)[1] for y in ys]
    exps = [2.0 - 2.0 * s, 2.0, 4.0 - 2.0 * s, 4.0]
    col = list(seq)
    prev_best = col[-1]
    change = abs(col[-1] - col[-2]) if len(col) > 1 else float("inf")
    for p in exps:
        if len(col) < 2:
            break
        fac = 2.0**p
        new = [(fac * col[i + 1] - col[i]) / (fac - 1.0) for i in range(len(col) - 1)]
        change = abs(new[-1] - prev_best)
        prev_best = new[-1]
        col = new
    limit = col[-1]
    converged = change <= 1e-4 * max(abs(limit), 1e-300)
    return DNResult(
        value=-dn_constant(s, "derived") * limit,
        value_alternative=-dn_constant(s, "gamma_one_minus_s") * limit,
        raw_limit=limit,
        sequence=tuple(seq),
        extrapolation_change=change,
        converged=converged,
    )
