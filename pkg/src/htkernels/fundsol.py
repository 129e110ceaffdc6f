"""Fundamental solutions of the conformal and non-conformal fractional
powers of the horizontal Laplacian, and of their extension operators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .group import HTypeGroup, gauge_from_norms
from .kernels import PointLike, _norms, heat_kernel, modified_kernel, thick_fiber
from .quadrature import QuadratureConfig, QuadResult, integrate_interval, integrate_positive_axis
from .specfun import PoleError, gamma_fn, hyp2f1

__all__ = [
    "ConformalConstant",
    "conformal_constant",
    "conformal_constant_value",
    "fundamental_conformal",
    "fundamental_nonconformal",
    "thick_fundamental",
    "folland_kaplan",
    "folland_constants",
    "riesz_kernel_negative",
    "time_window",
]

_DEFAULT = QuadratureConfig()


@dataclass(frozen=True)
class ConformalConstant:
    s: float
    m: int
    k: int
    value: float


def _gamma_for_order(s: float) -> float:
    # Gamma(s) for s > 0 and |Gamma(s)| for negative orders
    g = gamma_fn(s)
    return abs(g)


def conformal_constant_value(m: int, k: int, s: float) -> float:
    """2^(m/2+2k-3s-1) Gamma((m/2+1-s)/2) Gamma((m/2+k-s)/2)
    / (pi^((m+k+1)/2) Gamma(s)), with |Gamma(s)| for s < 0."""
    if s == 0:
        raise PoleError("s = 0 is a pole of Gamma(s)")
    a1 = 0.5 * (0.5 * m + 1.0 - s)
    a2 = 0.5 * (0.5 * m + k - s)
    for a in (a1, a2):
        if a <= 0 and a == math.floor(a):
            raise PoleError(f"conformal constant has a pole at s = {s} for (m, k) = ({m}, {k})")
    num = 2.0 ** (0.5 * m + 2 * k - 3 * s - 1) * gamma_fn(a1) * gamma_fn(a2)
    return num / (math.pi ** (0.5 * (m + k + 1)) * _gamma_for_order(s))


def conformal_constant(G: HTypeGroup, s: float) -> ConformalConstant:
    s = float(s)
    return ConformalConstant(s, G.m, G.k, conformal_constant_value(G.m, G.k, s))


def _nonzero_point(G: HTypeGroup, g: PointLike) -> tuple:
    zn, sn = _norms(G, g)
    if zn == 0.0 and sn == 0.0:
        raise PoleError("fundamental solutions are singular at the identity")
    return zn, sn


def time_window(f, center: float, step: float = 0.5, floor: float = 1e-17, max_steps: int = 400) -> float:
    """Lower end of the useful t-range for an integrand that vanishes
    rapidly as t -> 0 but whose computed values eventually hit a roundoff
    floor. Walks left (in ln t) from the peak of |t f(t)| and stops where
    the values become negligible or stop decreasing."""
    u = math.log(center) + step * np.arange(-8, 9)
    v = np.abs(np.exp(u) * np.asarray(f(np.exp(u)), dtype=float))
    i = int(np.argmax(v))
    peak = float(v[i])
    if peak == 0.0:
        return float(np.exp(u[0]))
    uu, prev = u[i], peak
    for _ in range(max_steps):
        uu -= step
        t = math.exp(uu)
        cur = abs(t * float(np.asarray(f(np.array([t])))[0]))
        if cur <= floor * peak or cur >= prev:
            return t
        prev = cur
    return math.exp(uu)


def _time_integral(f, center: float, rate_right: float, config: QuadratureConfig) -> QuadResult:
    lower = time_window(f, center)
    return integrate_positive_axis(f, config, center=center, rate_right=rate_right, lower=lower)


def _vectorize(scalar_fn):
    def f(t):
        t = np.atleast_1d(t)
        return np.array([scalar_fn(float(ti)) for ti in t])

    return f


def fundamental_conformal(
    G: HTypeGroup,
    s: float,
    g: PointLike,
    method: str = "closed_form",
    config: QuadratureConfig = _DEFAULT,
) -> float:
    """Fundamental solution of the conformal fractional power, C_(s) N^(2s-Q)."""
    s = float(s)
    if not 0 < s <= 1:
        raise ValueError("s must lie in (0, 1]")
    zn, sn = _nonzero_point(G, g)
    if method == "closed_form":
        return conformal_constant_value(G.m, G.k, s) * gauge_from_norms(zn, sn) ** (2 * s - G.Q)
    if method == "direct_integral":
        f = _vectorize(lambda t: t ** (s - 1.0) * modified_kernel(G, s, g, t, config))
        center = 0.25 * gauge_from_norms(zn, sn) ** 2
        return _time_integral(f, center, 0.5 * G.Q - s, config).value / gamma_fn(s)
    raise ValueError(f"unknown method {method!r}")


def _hypergeometric_form(m: int, k: int, s: float, zn: float, sn: float, gamma_abs: float,
                         config: QuadratureConfig) -> float:
    a = 0.5 * (0.5 * m + k - s)
    x_scale = -16.0 * sn * sn / zn**4
    half_pi = 0.5 * math.pi

    def integrand(v):
        sv, cv = np.sin(half_pi * v), np.cos(half_pi * v)
        y = sv * sv
        one_minus = cv * cv
        jac = math.pi * sv * cv
        # artanh(sqrt y) = 0.5 log((1 + sin)/(1 - sin)) = log((1 + sin)/cos)
        ath = np.log1p(sv) - np.log(cv)
        vals = ath ** (s - 1.0) * one_minus ** (0.25 * m - 1.0) * y ** (0.5 * (k - s - 1.0))
        if x_scale != 0.0:
            vals = vals * hyp2f1(a, a + 0.5, 0.5 * k, x_scale * y)
        return vals * jac

    grading = [2.0 ** (-j) for j in range(1, 20)] + [1.0 - 2.0 ** (-j) for j in range(2, 40)]
    res = integrate_interval(integrand, 0.0, 1.0, config, breakpoints=grading)
    pref = 2.0 ** (k - 2 * s) * gamma_fn(0.5 * m + k - s) / (
        math.pi ** (0.5 * (m + k)) * gamma_abs * gamma_fn(0.5 * k)
    )
    return pref * zn ** (-2.0 * (0.5 * m + k - s)) * res.value


def fundamental_nonconformal(
    G: HTypeGroup,
    s: float,
    g: PointLike,
    method: str = "direct_integral",
    config: QuadratureConfig = _DEFAULT,
) -> float:
    """Fundamental solution of the Balakrishnan power, (1/Gamma(s)) int t^(s-1) p dt.

    ``method="hypergeometric"`` uses the single integral over (0, 1) with a
    Gauss 2F1 factor; it needs |z| bounded away from zero relative to
    |sigma|. ``method="auto"`` picks it when that holds."""
    s = float(s)
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    zn, sn = _nonzero_point(G, g)
    in_domain = zn**4 >= 1e-6 * 16.0 * sn * sn and zn > 0
    if method == "auto":
        method = "hypergeometric" if in_domain else "direct_integral"
    if method == "hypergeometric":
        if not in_domain:
            raise ValueError("hypergeometric form needs |z|^4 >= 1e-6 * 16 |sigma|^2")
        return _hypergeometric_form(G.m, G.k, s, zn, sn, gamma_fn(s), config)
    if method == "direct_integral":
        f = _vectorize(lambda t: t ** (s - 1.0) * heat_kernel(G, g, t, config))
        center = 0.25 * gauge_from_norms(zn, sn) ** 2
        return _time_integral(f, center, 0.5 * G.Q - s, config).value / gamma_fn(s)
    raise ValueError(f"unknown method {method!r}")


def thick_fundamental(
    G: HTypeGroup,
    s: float,
    g: PointLike,
    y: float,
    method: str = "closed_form",
    config: QuadratureConfig = _DEFAULT,
) -> float:
    """Fundamental solution of the extension operator in the thick space,
    int_0^inf q_(s)(g, t, y) dt."""
    s = float(s)
    if s == 0 or not -1 < s <= 1:
        raise ValueError("s must lie in (-1, 0) or (0, 1]")
    if y < 0:
        raise ValueError("y must be non-negative")
    zn, sn = _norms(G, g)
    if zn == 0 and sn == 0 and y == 0:
        raise PoleError("thick fundamental solution is singular at (e, 0)")
    m, k = G.m, G.k
    if method == "closed_form":
        base = (zn * zn + y * y) ** 2 + 16.0 * sn * sn
        const = _gamma_for_order(s) / (4.0 * math.pi) ** (1.0 - s) * conformal_constant_value(m, k, s)
        return const * base ** (-0.5 * (0.5 * m + k - s))
    if method == "direct_integral":
        f = _vectorize(lambda t: thick_fiber(m, k, s, t, y).evaluate(zn, sn, config).value)
        center = 0.25 * gauge_from_norms(math.sqrt(zn * zn + y * y), sn) ** 2
        return _time_integral(f, center, 0.5 * m + k - s, config).value
    raise ValueError(f"unknown method {method!r}")


def folland_constants(m: int, k: int) -> dict:
    """The two candidate constants multiplying N^(2-Q) for int_0^inf p dt:
    a closed form built from Gamma(m/4), and the conformal constant
    C_(1)(m, k)."""
    gamma_quarter = (
        2.0 ** (0.5 * m + 2 * k - 2)
        * gamma_fn(0.25 * m)
        * gamma_fn(0.5 * (0.5 * m + k - 1))
        / math.pi ** (0.5 * (m + k + 1))
    )
    return {"gamma_quarter": gamma_quarter, "conformal_s1": conformal_constant_value(m, k, 1.0)}


def folland_kaplan(G: HTypeGroup, g: PointLike, constant: str = "conformal_s1") -> float:
    """Fundamental solution of the horizontal Laplacian, c N^(2-Q).

    The default constant is the one confirmed by quadrature of
    int_0^inf p(g, t) dt; ``constant="gamma_quarter"`` selects the other."""
    zn, sn = _nonzero_point(G, g)
    c = folland_constants(G.m, G.k)[constant]
    return c * gauge_from_norms(zn, sn) ** (2 - G.Q)


def heat_time_integral(G: HTypeGroup, g: PointLike, config: QuadratureConfig = _DEFAULT) -> float:
    """int_0^inf p(g, t) dt by quadrature."""
    zn, sn = _nonzero_point(G, g)
    f = _vectorize(lambda t: heat_kernel(G, g, t, config))
    center = 0.25 * gauge_from_norms(zn, sn) ** 2
    return _time_integral(f, center, 0.5 * G.Q - 1.0, config).value


def riesz_kernel_negative(
    G: HTypeGroup,
    s: float,
    g: PointLike,
    method: str = "direct_integral",
    config: QuadratureConfig = _DEFAULT,
) -> float:
    """-s/Gamma(1-s) int_0^inf t^(-1-s) p(g, t) dt, finite away from the identity.

    ``method="hypergeometric"`` evaluates the same kernel from the 2F1
    representation with s replaced by -s and Gamma(s) by |Gamma(-s)|; the
    prefactor -s/Gamma(1-s) = 1/Gamma(-s) is negative, hence the sign."""
    s = float(s)
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    zn, sn = _nonzero_point(G, g)
    if method == "hypergeometric":
        if not (zn > 0 and zn**4 >= 1e-6 * 16.0 * sn * sn):
            raise ValueError("hypergeometric form needs |z|^4 >= 1e-6 * 16 |sigma|^2")
        return -_hypergeometric_form(G.m, G.k, -s, zn, sn, abs(gamma_fn(-s)), config)
    if method != "direct_integral":
        raise ValueError(f"unknown method {method!r}")
    f = _vectorize(lambda t: t ** (-1.0 - s) * heat_kernel(G, g, t, config))
    center = 0.25 * gauge_from_norms(zn, sn) ** 2
    res = _time_integral(f, center, 0.5 * G.Q + s, config)
    return -s / gamma_fn(1.0 - s) * res.value
