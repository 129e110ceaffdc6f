"""Adaptive Gauss-Legendre quadrature for the one-dimensional integrals
behind every kernel: semi-infinite ranges with exponential decay, power
singularities at the origin, and Bessel or cosine oscillation.

Panels are refined in batches: each sweep bisects the panels carrying the
largest error estimates and evaluates the integrand once on all new nodes,
so the integrand must accept and return numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .specfun import bessel_j, gamma_fn

__all__ = [
    "QuadratureConfig",
    "QuadResult",
    "integrate_interval",
    "integrate_semi_infinite",
    "integrate_time_power",
    "integrate_positive_axis",
    "radial_fourier",
    "sphere_area",
]

Integrand = Callable[[np.ndarray], np.ndarray]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and limits shared by all quadratures."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_panels: int = 4096
    panel_degree: int = 15
    truncation_factor: float = 40.0

    def __post_init__(self):
        if not self.rel_tol > 0 or not self.abs_tol > 0:
            raise ValueError("tolerances must be positive")
        if self.max_panels < 16:
            raise ValueError("max_panels must be at least 16")
        if self.panel_degree < 2:
            raise ValueError("panel_degree must be at least 2")

    def with_(self, **changes) -> "QuadratureConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    converged: bool = True
    panels: int = 0

    def __float__(self) -> float:
        return self.value

    def scaled(self, factor: float) -> "QuadResult":
        return QuadResult(self.value * factor, self.error * abs(factor), self.converged, self.panels)

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(
            self.value + other.value,
            self.error + other.error,
            self.converged and other.converged,
            self.panels + other.panels,
        )


@lru_cache(maxsize=16)
def _rule(n: int):
    x, w = leggauss(n)
    return x, w


def _sums(f: Integrand, a: np.ndarray, b: np.ndarray, n: int):
    """Gauss sums on [a, b] and magnitude sums for a roundoff floor."""
    x, w = _rule(n)
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    pts = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
    s = (vals * w[None, :]).sum(axis=1) * half
    mag = (np.abs(vals) * w[None, :]).sum(axis=1) * np.abs(half)
    return s, mag


def _halves(f: Integrand, a: np.ndarray, b: np.ndarray, n: int):
    mid = 0.5 * (a + b)
    both_a = np.concatenate([a, mid])
    both_b = np.concatenate([mid, b])
    s, mag = _sums(f, both_a, both_b, n)
    p = a.size
    return s[:p], s[p:], mag[:p] + mag[p:]


def integrate_interval(
    f: Integrand,
    a: float,
    b: float,
    config: QuadratureConfig = QuadratureConfig(),
    breakpoints: Iterable[float] = (),
) -> QuadResult:
    """Adaptive integral of ``f`` over the finite interval [a, b]."""
    if b == a:
        return QuadResult(0.0, 0.0, True, 0)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    edges = sorted({float(a), float(b), *(float(p) for p in breakpoints if a < p < b)})
    lo = np.array(edges[:-1])
    hi = np.array(edges[1:])
    n = config.panel_degree
    whole, _ = _sums(f, lo, hi, n)
    left, right, mag = _halves(f, lo, hi, n)
    val = left + right
    err = np.abs(whole - val)
    converged = False
    while True:
        floor = 50.0 * _EPS * mag
        eff = np.maximum(err, floor)
        total = float(np.sum(val))
        target = max(config.rel_tol * abs(total), config.abs_tol, float(np.sum(floor)))
        tot_err = float(np.sum(eff))
        if tot_err <= target:
            converged = True
            break
        if lo.size >= config.max_panels:
            break
        splittable = (err > floor) & ((hi - lo) > 1e-13 * np.maximum(np.abs(lo), np.abs(hi)))
        if not np.any(splittable):
            break
        cand = np.nonzero(splittable)[0]
        order = cand[np.argsort(-err[cand])]
        remaining = tot_err - np.cumsum(eff[order])
        count = int(np.searchsorted(-remaining, -0.5 * target)) + 1
        count = max(1, min(count, order.size, config.max_panels - lo.size))
        idx = order[:count]
        mid = 0.5 * (lo[idx] + hi[idx])
        new_lo = np.concatenate([lo[idx], mid])
        new_hi = np.concatenate([mid, hi[idx]])
        new_whole = np.concatenate([left[idx], right[idx]])
        nl, nr, nmag = _halves(f, new_lo, new_hi, n)
        keep = np.ones(lo.size, dtype=bool)
        keep[idx] = False
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        left = np.concatenate([left[keep], nl])
        right = np.concatenate([right[keep], nr])
        mag = np.concatenate([mag[keep], nmag])
        val = left + right
        err = np.concatenate([err[keep], np.abs(new_whole - (nl + nr))])
    order = np.argsort(lo, kind="stable")
    total = float(np.sum(val[order]))
    return QuadResult(sign * total, float(np.sum(np.maximum(err, 50.0 * _EPS * mag))), converged, int(lo.size))


def _oscillation_breaks(start: float, stop: float, rho: float, limit: int) -> list:
    if rho <= 0:
        return []
    first = start + 10.0 / rho
    step = math.pi / rho
    if first >= stop:
        return []
    count = min(int((stop - first) / step), limit)
    return list(first + step * np.arange(count + 1))


def integrate_semi_infinite(
    f: Integrand,
    decay_scale: float,
    config: QuadratureConfig = QuadratureConfig(),
    breakpoints: Iterable[float] = (),
    oscillation: float = 0.0,
    start: float = 0.0,
) -> QuadResult:
    """Integral of ``f`` over (start, inf) for an integrand decaying like
    exp(-(r - start) / decay_scale).

    The range is truncated at ``truncation_factor * decay_scale`` and the
    neglected tail is estimated from the exponential envelope and added to
    the error. ``oscillation`` is the angular frequency of a cos/Bessel
    factor; panels are then split at spacing pi / oscillation.
    """
    if not decay_scale > 0:
        raise ValueError("decay_scale must be positive")
    length = config.truncation_factor * decay_scale
    stop = start + length
    # geometric grading towards the start handles endpoint singularities
    grading = [start + length * 2.0 ** (-j) for j in range(1, 13)]
    extra = [p for p in breakpoints if start < p < stop]
    osc = _oscillation_breaks(start, stop, oscillation, config.max_panels // 2)
    res = integrate_interval(f, start, stop, config, breakpoints=grading + extra + osc)
    tail = abs(float(np.asarray(f(np.array([stop])))[0])) * decay_scale
    return QuadResult(res.value, res.error + tail, res.converged, res.panels)


def integrate_positive_axis(
    f: Integrand,
    config: QuadratureConfig = QuadratureConfig(),
    center: float = 1.0,
    rate_left: float = 1.0,
    rate_right: float = 1.0,
    lower: float | None = None,
    upper: float | None = None,
) -> QuadResult:
    """Integral of ``f`` over (0, inf) in the logarithmic variable u = ln t.

    ``rate_left`` and ``rate_right`` are the exponential decay rates of
    t f(t) in u towards -inf and +inf. ``lower``/``upper`` optionally clip
    the range in t (used to stop at a known negligible level).
    """
    u0 = math.log(center)

    def right(v):
        t = np.exp(u0 + v)
        return t * f(t)

    def left(v):
        t = np.exp(u0 - v)
        return t * f(t)

    out = QuadResult(0.0, 0.0, True, 0)
    if upper is None:
        out = out + integrate_semi_infinite(right, 1.0 / rate_right, config)
    elif upper > center:
        out = out + integrate_interval(right, 0.0, math.log(upper) - u0, config)
    if lower is None:
        out = out + integrate_semi_infinite(left, 1.0 / rate_left, config)
    elif lower < center:
        out = out + integrate_interval(left, 0.0, u0 - math.log(lower), config)
    return out


def integrate_time_power(
    s: float,
    f: Integrand,
    config: QuadratureConfig = QuadratureConfig(),
    center: float = 1.0,
    rate_right: float = 1.0,
    rate_left: float | None = None,
    lower: float | None = None,
    upper: float | None = None,
) -> QuadResult:
    """Integral of t^(s-1) f(t) over (0, inf) by the substitution u = ln t.

    With ``f`` bounded at the origin the left tail decays like exp(s u);
    ``rate_right`` is the decay rate of t^s f(t) in u as t grows.
    """
    if rate_left is None:
        if not s > 0:
            raise ValueError("rate_left is required when s <= 0")
        rate_left = s

    def g(t):
        return t ** (s - 1.0) * f(t)

    return integrate_positive_axis(g, config, center, rate_left, rate_right, lower, upper)


def sphere_area(k: int) -> float:
    """Surface measure of the unit sphere in R^k (2 for k = 1)."""
    return 2.0 * math.pi ** (0.5 * k) / gamma_fn(0.5 * k)


def radial_fourier(
    k: int,
    rho: float,
    f: Integrand,
    config: QuadratureConfig = QuadratureConfig(),
    decay_scale: float = 1.0,
) -> QuadResult:
    """Fourier transform of a radial function on R^k at frequency radius rho:

        int_{R^k} exp(-i <w, lam>) f(|lam|) d lam,   |w| = rho.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if rho < 0:
        raise ValueError("rho must be >= 0")
    if rho == 0.0:
        res = integrate_semi_infinite(lambda r: r ** (k - 1) * f(r), decay_scale, config)
        return res.scaled(sphere_area(k))
    if k == 1:
        res = integrate_semi_infinite(lambda r: np.cos(rho * r) * f(r), decay_scale, config, oscillation=rho)
        return res.scaled(2.0)
    nu = 0.5 * k - 1.0

    def g(r):
        return r ** (0.5 * k) * f(r) * bessel_j(nu, rho * r)

    res = integrate_semi_infinite(g, decay_scale, config, oscillation=rho)
    return res.scaled((2.0 * math.pi) ** (0.5 * k) * rho ** (1.0 - 0.5 * k))
