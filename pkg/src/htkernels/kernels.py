"""Heat-type kernels on groups of Heisenberg type.

Every kernel here is a radial Fourier integral in the centre variable of
a "vertical fiber"

    prefactor * int_{R^k} exp(-(i/t) <sigma, lam>) (|lam|/sinh|lam|)^a
                          exp(-(|z|^2 + y^2)/(4t) |lam| coth|lam|) d lam,

so all of them depend on the point only through |z| and |sigma|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .group import GroupPoint, HTypeGroup
from .quadrature import QuadratureConfig, QuadResult, integrate_positive_axis, radial_fourier
from .specfun import bessel_j, gamma_fn

__all__ = [
    "SignedOrder",
    "VerticalFiber",
    "log_sinhc",
    "rcoth",
    "rcoth_minus_one",
    "heat_kernel",
    "heat_kernel_dt",
    "modified_kernel",
    "thick_kernel",
    "bg_kernel",
    "composite_kernel",
    "fiber_convolve",
    "heat_fiber",
    "modified_fiber",
    "poisson_normalization",
    "poisson_kernel_parabolic",
    "poisson_kernel_elliptic",
    "conformal_poisson_closed_form",
    "fiber_table",
    "PointLike",
]

PointLike = Union[GroupPoint, Sequence]
_DEFAULT = QuadratureConfig()


# ---------------------------------------------------------------------------
# elementary pieces
# ---------------------------------------------------------------------------


# Bernoulli numbers B_2 .. B_20 for the Maclaurin series of r coth r
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510, 43867 / 798, -174611 / 330)
_RCOTH_COEF = np.array([2.0 ** (2 * n) * b / math.factorial(2 * n) for n, b in enumerate(_BERNOULLI, start=1)])
_LOG_SINHC_COEF = np.array([-(2.0 ** (2 * n)) * b / (2 * n * math.factorial(2 * n)) for n, b in enumerate(_BERNOULLI, start=1)])


def log_sinhc(r):
    """log(r / sinh r), stable for all r >= 0."""
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    small = r <= 0.5
    x = r[small] ** 2
    acc = np.zeros_like(x)
    for c in _LOG_SINHC_COEF[::-1]:
        acc = (acc + c) * x
    out[small] = acc
    rl = r[~small]
    out[~small] = np.log(2.0 * rl) - rl - np.log1p(-np.exp(-2.0 * rl))
    return out


def rcoth(r):
    """r coth r with value 1 at the origin."""
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    small = r < 1e-3
    rs = r[small]
    out[small] = 1.0 + rs * rs / 3.0 - rs**4 / 45.0
    rl = r[~small]
    e = np.exp(-2.0 * rl)
    out[~small] = rl * (1.0 + e) / (1.0 - e)
    return out


def rcoth_minus_one(r):
    """r coth r - 1 without cancellation for small r."""
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    small = r <= 0.5
    x = r[small] ** 2
    acc = np.zeros_like(x)
    for c in _RCOTH_COEF[::-1]:
        acc = (acc + c) * x
    out[small] = acc
    rl = r[~small]
    out[~small] = rcoth(rl) - 1.0
    return out


def rcsch(r):
    """r / sinh r."""
    return np.exp(log_sinhc(r))


def _decay_scale(rate: float, curvature: float) -> float:
    # exponential tail exp(-rate r) or Gaussian core exp(-curvature r^2)
    scale = 1.0 / rate
    if curvature > 0:
        scale = max(scale, 0.2 / math.sqrt(curvature))
    return scale


def _norms(G: HTypeGroup, g: PointLike) -> tuple:
    if isinstance(g, GroupPoint):
        z, s = g.z, g.sigma
    else:
        z, s = g
    z = np.atleast_1d(np.asarray(z, dtype=float))
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if z.shape != (G.m,) or s.shape != (G.k,):
        raise ValueError(f"point dimensions ({z.size}, {s.size}) do not match group ({G.m}, {G.k})")
    return float(np.linalg.norm(z)), float(np.linalg.norm(s))


def _check_t(t: float, name: str = "t") -> None:
    if not t > 0:
        raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class SignedOrder:
    """Fractional order in (-1, 0) or (0, 1]; the sign picks the kernel family."""

    s: float

    def __post_init__(self):
        s = float(self.s)
        if s == 0.0 or not -1.0 < s <= 1.0:
            raise ValueError("order must lie in (-1, 0) or (0, 1]")
        object.__setattr__(self, "s", s)

    def __float__(self) -> float:
        return self.s


def _order(s) -> float:
    return float(SignedOrder(float(s)))


# ---------------------------------------------------------------------------
# vertical fibers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VerticalFiber:
    """prefactor * int exp(-(i/t)<sigma,lam>) (|lam|/sinh|lam|)^a
    exp(-(|z|^2 + offset)/(4t) |lam| coth|lam|) d lam on a group with
    first-layer dimension m and centre dimension k."""

    a: float
    t: float
    prefactor: float
    m: int
    k: int
    offset: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("fiber exponent must be positive")
        _check_t(self.t)
        if self.offset < 0:
            raise ValueError("offset must be non-negative")

    def gauss_scale(self, z_norm: float) -> float:
        return (z_norm * z_norm + self.offset) / (4.0 * self.t)

    def symbol(self, r, z_norm: float):
        c = self.gauss_scale(z_norm)
        return np.exp(self.a * log_sinhc(r) - c * rcoth(r))

    def evaluate(self, z_norm: float, sigma_norm: float, config: QuadratureConfig = _DEFAULT) -> QuadResult:
        c = self.gauss_scale(z_norm)
        scale = _decay_scale(self.a + c, c / 3.0)
        res = radial_fourier(self.k, sigma_norm / self.t, lambda r: self.symbol(r, z_norm), config, scale)
        return res.scaled(self.prefactor)

    def frequency_symbol(self, xi, z_norm: float):
        """The same kernel written as int exp(-i<sigma, xi>) S(|xi|) d xi."""
        return self.prefactor * self.t**self.k * self.symbol(self.t * np.asarray(xi), z_norm)


def heat_fiber(m: int, k: int, t: float) -> VerticalFiber:
    return VerticalFiber(0.5 * m, t, 2.0**k * (4.0 * math.pi * t) ** (-(0.5 * m + k)), m, k)


def modified_fiber(m: int, k: int, s: float, t: float) -> VerticalFiber:
    return VerticalFiber(0.5 * m + 1.0 - s, t, 2.0**k * (4.0 * math.pi * t) ** (-(0.5 * m + k)), m, k)


def thick_fiber(m: int, k: int, s: float, t: float, y: float) -> VerticalFiber:
    a = 0.5 * m + 1.0 - s
    pref = 2.0**k * (4.0 * math.pi * t) ** (-(0.5 * m + k + 1.0 - s))
    return VerticalFiber(a, t, pref, m, k, offset=y * y)


def _out(res: QuadResult, full_output: bool):
    return res if full_output else res.value


# ---------------------------------------------------------------------------
# thin kernels
# ---------------------------------------------------------------------------


def heat_kernel(G: HTypeGroup, g: PointLike, t: float, config: QuadratureConfig = _DEFAULT, full_output: bool = False):
    """Heat kernel p(g, t) of the horizontal Laplacian with pole at the identity."""
    _check_t(t)
    zn, sn = _norms(G, g)
    return _out(heat_fiber(G.m, G.k, t).evaluate(zn, sn, config), full_output)


def heat_kernel_dt(G: HTypeGroup, g: PointLike, t: float, config: QuadratureConfig = _DEFAULT) -> float:
    """Time derivative of p(g, t), differentiated under the fiber integral."""
    _check_t(t)
    zn, sn = _norms(G, g)
    m, k = G.m, G.k
    fib = heat_fiber(m, k, t)
    c = fib.gauss_scale(zn)

    def f(r):
        # d/dt of (4 pi t)^{-(m/2+k)} int e^{-i<sigma,xi>} |xi|^{m/2} sinh(t|xi|)^{-m/2}
        # exp(-|z|^2/4 |xi| coth(t|xi|)) d xi, returned in the lambda = t xi variable
        sc = rcsch(r)
        return fib.symbol(r, zn) * (-0.5 * m * rcoth(r) + c * sc * sc) / t

    scale = _decay_scale(0.5 * m + c, c / 3.0)
    res = radial_fourier(k, sn / t, f, config, scale)
    return res.value * fib.prefactor


def modified_kernel(
    G: HTypeGroup, s: float, g: PointLike, t: float, config: QuadratureConfig = _DEFAULT, full_output: bool = False
):
    """Modified heat kernel with fiber exponent m/2 + 1 - s (s = 1 gives p)."""
    s = _order(s)
    _check_t(t)
    zn, sn = _norms(G, g)
    return _out(modified_fiber(G.m, G.k, s, t).evaluate(zn, sn, config), full_output)


def thick_kernel(
    G: HTypeGroup,
    s: float,
    g: PointLike,
    t: float,
    y: float,
    config: QuadratureConfig = _DEFAULT,
    full_output: bool = False,
):
    """Kernel in the thick space G x R_y; depends on z and y via |z|^2 + y^2."""
    s = _order(s)
    _check_t(t)
    if y < 0:
        raise ValueError("y must be non-negative")
    zn, sn = _norms(G, g)
    return _out(thick_fiber(G.m, G.k, s, t, y).evaluate(zn, sn, config), full_output)


def thick_kernel_norms(m: int, k: int, s: float, z_norm: float, sigma_norm: float, t: float, y: float,
                       config: QuadratureConfig = _DEFAULT) -> float:
    return thick_fiber(m, k, s, t, y).evaluate(z_norm, sigma_norm, config).value


def bg_kernel(
    n: float,
    k: int,
    w,
    sigma,
    w2,
    sigma2,
    t: float,
    config: QuadratureConfig = _DEFAULT,
    full_output: bool = False,
):
    """Heat kernel of d/dt - Delta_w - |w|^2/4 Delta_sigma on R^n x R^k with
    pole (w2, sigma2). ``n`` may be fractional when both w and w2 are given
    only through their norms and inner product."""
    _check_t(t)
    if not n > 0:
        raise ValueError("n must be positive")
    w = np.atleast_1d(np.asarray(w, dtype=float))
    w2 = np.atleast_1d(np.asarray(w2, dtype=float))
    sg = np.atleast_1d(np.asarray(sigma, dtype=float))
    sg2 = np.atleast_1d(np.asarray(sigma2, dtype=float))
    if w.shape != w2.shape or sg.shape != (k,) or sg2.shape != (k,):
        raise ValueError("dimension mismatch in bg_kernel arguments")
    return _out(
        bg_kernel_scalars(n, k, float(w @ w), float(w2 @ w2), float(w @ w2), float(np.linalg.norm(sg - sg2)), t, config),
        full_output,
    )


def bg_kernel_scalars(
    n: float, k: int, w_sq: float, w2_sq: float, w_dot: float, sigma_dist: float, t: float,
    config: QuadratureConfig = _DEFAULT,
) -> QuadResult:
    """bg_kernel from |w|^2, |w2|^2, <w, w2> and |sigma - sigma2|."""
    A = (w_sq + w2_sq) / (4.0 * t)
    B = w_dot / (2.0 * t)

    def f(r):
        return np.exp(0.5 * n * log_sinhc(r) - A * rcoth(r) + B * rcsch(r))

    scale = _decay_scale(0.5 * n + A, max(A / 2.0, 0.0) / 3.0)
    res = radial_fourier(k, sigma_dist / t, f, config, scale)
    return res.scaled(2.0**k * (4.0 * math.pi * t) ** (-(0.5 * n + k)))


def composite_kernel(
    G: HTypeGroup,
    s: float,
    g: PointLike,
    tau: float,
    t: float,
    config: QuadratureConfig = _DEFAULT,
    full_output: bool = False,
):
    """Kernel of the composition of the (-s) flow at time tau with the (s)
    flow at time t, in the 2 pi phase convention

        int exp(2 pi i <sigma, lam>) (2 pi t|lam| / sinh 2 pi t|lam|)^(1-s)
            (2 pi tau|lam| / sinh 2 pi tau|lam|)^(1+s)
            (|lam| / (2 sinh 2 pi (t+tau)|lam|))^(m/2)
            exp(-(pi/2)|z|^2 |lam| coth(2 pi (t+tau)|lam|)) d lam.
    """
    s = _order(s)
    if s <= 0:
        raise ValueError("composite kernel needs s > 0")
    _check_t(t)
    _check_t(tau, "tau")
    if t < 1e-6 or tau < 1e-6:
        raise ValueError("times below 1e-6 are not evaluated; use the limiting kernel")
    zn, sn = _norms(G, g)
    return _out(_composite_norms(G.m, G.k, s, zn, sn, tau, t, config), full_output)


def _composite_norms(m, k, s, zn, sn, tau, t, config) -> QuadResult:
    T = t + tau
    two_pi = 2.0 * math.pi

    def f(r):
        return np.exp(
            (1.0 - s) * log_sinhc(two_pi * t * r)
            + (1.0 + s) * log_sinhc(two_pi * tau * r)
            + 0.5 * m * (log_sinhc(two_pi * T * r) - math.log(4.0 * math.pi * T))
            - 0.5 * math.pi * zn * zn / (two_pi * T) * rcoth(two_pi * T * r)
        )

    rate = two_pi * ((1.0 - s) * t + (1.0 + s) * tau + 0.5 * m * T) + 0.5 * math.pi * zn * zn
    curv = 0.5 * math.pi * zn * zn * two_pi * T / 3.0
    return radial_fourier(k, two_pi * sn, f, config, _decay_scale(rate, curv))


def fiber_convolve(
    f1: VerticalFiber,
    f2: VerticalFiber,
    z_norm: float,
    sigma_norm: float,
    config: QuadratureConfig = _DEFAULT,
    full_output: bool = False,
):
    """Group convolution of two thin fiber kernels, evaluated at a point
    with the given |z| and |sigma|.

    For each centre frequency xi the two centred Gaussians in z are
    combined by the twisted convolution, which uses |J(xi) z| = |xi||z|
    and <J(xi) z, z> = 0; the coth scales then add up to coth of the
    total time. One radial Fourier transform finishes the job.
    """
    if f1.offset or f2.offset:
        raise ValueError("fiber convolution needs thin fibers (offset = 0)")
    if (f1.m, f1.k) != (f2.m, f2.k):
        raise ValueError("fibers belong to different groups")
    m, k = f1.m, f1.k
    t1, t2 = f1.t, f2.t
    T = t1 + t2
    log_const = (
        k * math.log(2.0 * math.pi)
        + math.log(f1.prefactor * f2.prefactor)
        + k * math.log(t1 * t2)
        + 0.5 * m * math.log(4.0 * math.pi * t1 * t2 / T)
    )
    zz = z_norm * z_norm

    def phi(xi):
        a1, a2 = t1 * xi, t2 * xi
        return np.exp(
            log_const
            + (f1.a - 0.5 * m) * log_sinhc(a1)
            + (f2.a - 0.5 * m) * log_sinhc(a2)
            + 0.5 * m * log_sinhc(T * xi)
            - 0.25 * zz / T * rcoth(T * xi)
        )

    rate = (f1.a * t1 + f2.a * t2) + 0.25 * zz
    curv = 0.25 * zz * T / 3.0
    res = radial_fourier(k, sigma_norm, phi, config, _decay_scale(rate, curv))
    return _out(res, full_output)


# ---------------------------------------------------------------------------
# Poisson kernels
# ---------------------------------------------------------------------------


def poisson_normalization(s: float, which: str = "gamma_s") -> float:
    """4 pi^(1+s) / Gamma(s) (``"gamma_s"``) or 4 pi^(1+s) / Gamma(1-s)
    (``"gamma_one_minus_s"``). Only the first gives unit total mass."""
    if which == "gamma_s":
        return 4.0 * math.pi ** (1.0 + s) / gamma_fn(s)
    if which == "gamma_one_minus_s":
        return 4.0 * math.pi ** (1.0 + s) / gamma_fn(1.0 - s)
    raise ValueError(f"unknown normalization {which!r}")


def _check_fractional(s: float) -> float:
    s = float(s)
    if not 0.0 < s < 1.0:
        raise ValueError("s must lie in (0, 1)")
    return s


def poisson_kernel_parabolic(
    G: HTypeGroup,
    s: float,
    g: PointLike,
    t: float,
    y: float,
    variant: str = "nonconformal",
    config: QuadratureConfig = _DEFAULT,
    normalization: str = "gamma_s",
) -> float:
    """Time-dependent Poisson kernel of the extension problem."""
    s = _check_fractional(s)
    _check_t(t)
    _check_t(y, "y")
    kappa = poisson_normalization(s, normalization)
    if variant == "nonconformal":
        weight = (4.0 * math.pi * t) ** (-(1.0 + s)) * math.exp(-y * y / (4.0 * t))
        return kappa * y ** (2 * s) * weight * heat_kernel(G, g, t, config)
    if variant == "conformal":
        return kappa * y ** (2 * s) * thick_kernel(G, -s, g, t, y, config)
    raise ValueError(f"unknown variant {variant!r}")


def conformal_poisson_closed_form(m: int, k: int, s: float, z_norm: float, sigma_norm: float, y: float) -> float:
    from .fundsol import conformal_constant_value

    Q = m + 2 * k
    const = 2.0 ** (-2.0 * s) * abs(gamma_fn(-s)) / gamma_fn(s) * conformal_constant_value(m, k, -s)
    base = (z_norm**2 + y * y) ** 2 + 16.0 * sigma_norm**2
    return const * y ** (2 * s) * base ** (-(Q + 2.0 * s) / 4.0)


def poisson_kernel_elliptic(
    G: HTypeGroup,
    s: float,
    g: PointLike,
    y: float,
    variant: str = "nonconformal",
    config: QuadratureConfig = _DEFAULT,
    method: str | None = None,
    normalization: str = "gamma_s",
) -> float:
    """Time-integrated Poisson kernel. The nonconformal one is a time
    quadrature of the parabolic kernel; the conformal one defaults to its
    closed form (``method="direct_integral"`` integrates in time instead)."""
    s = _check_fractional(s)
    _check_t(y, "y")
    zn, sn = _norms(G, g)
    if variant == "conformal" and (method or "closed_form") == "closed_form":
        return conformal_poisson_closed_form(G.m, G.k, s, zn, sn, y)
    if variant not in ("nonconformal", "conformal"):
        raise ValueError(f"unknown variant {variant!r}")

    def f(t):
        return np.array([poisson_kernel_parabolic(G, s, g, float(ti), y, variant, config, normalization) for ti in t])

    from .fundsol import time_window

    peak = 0.25 * (zn * zn + y * y + 4.0 * sn)
    lower = time_window(f, peak)
    res = integrate_positive_axis(
        f, config.with_(rel_tol=max(config.rel_tol, 1e-10)), center=peak, rate_right=0.5 * G.Q + s, lower=lower
    )
    return res.value


# ---------------------------------------------------------------------------
# batched evaluation on a fixed rule (used by brute-force oracles)
# ---------------------------------------------------------------------------


def fiber_table(
    k: int,
    a: float,
    c,
    rho,
    r_max: float,
    panel: float = 0.5,
    nodes: int = 20,
    chunk: int = 4096,
) -> np.ndarray:
    """int_{R^k} exp(-i<w,lam>) (|lam|/sinh|lam|)^a exp(-c |lam| coth|lam|) d lam
    for arrays of c and |w| = rho, using one fixed composite Gauss rule
    on [0, r_max]. Intended for brute-force cross-checks where thousands of
    points are needed; accuracy is controlled by ``panel`` and ``nodes``."""
    c = np.asarray(c, dtype=float).ravel()
    rho = np.asarray(rho, dtype=float).ravel()
    x, w = np.polynomial.legendre.leggauss(nodes)
    n_pan = max(1, int(math.ceil(r_max / panel)))
    edges = np.linspace(0.0, r_max, n_pan + 1)
    half = 0.5 * np.diff(edges)
    r = (0.5 * (edges[:-1] + edges[1:]))[:, None] + half[:, None] * x[None, :]
    wr = (half[:, None] * w[None, :]).ravel()
    r = r.ravel()
    lsc = a * log_sinhc(r)
    rc = rcoth(r)
    out = np.empty_like(c)
    nu = 0.5 * k - 1.0
    for start in range(0, c.size, chunk):
        sl = slice(start, start + chunk)
        sym = np.exp(lsc[None, :] - c[sl, None] * rc[None, :]) * wr[None, :]
        rr = rho[sl, None] * r[None, :]
        if k == 1:
            out[sl] = 2.0 * np.sum(sym * np.cos(rr), axis=1)
        else:
            jv = bessel_j(nu, rr.ravel()).reshape(rr.shape)
            rad = r[None, :] ** (0.5 * k)
            safe = np.where(rho[sl] > 0, rho[sl], 1.0)
            val = np.sum(sym * rad * jv, axis=1) * (2.0 * math.pi) ** (0.5 * k) * safe ** (1.0 - 0.5 * k)
            zero = rho[sl] == 0
            if np.any(zero):
                area = 2.0 * math.pi ** (0.5 * k) / gamma_fn(0.5 * k)
                val[zero] = area * np.sum(sym[zero] * r[None, :] ** (k - 1), axis=1)
            out[sl] = val
    return out
